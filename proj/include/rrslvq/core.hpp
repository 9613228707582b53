#ifndef RRSLVQ_CORE_HPP_
#define RRSLVQ_CORE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrslvq {

using Label = int;

/// One stream element: feature vector plus dense class label in [0, C).
struct LabeledSample {
  std::vector<double> x;
  Label y = 0;

  std::size_t dim() const noexcept { return x.size(); }
  bool operator==(const LabeledSample&) const = default;
};

struct StreamMeta {
  std::size_t d = 1;
  std::size_t classes = 2;
  std::string name;
  std::optional<std::size_t> length_hint;

  void validate() const {
    if (d < 1) throw std::invalid_argument("stream meta: dimensionality must be >= 1");
    if (classes < 2) throw std::invalid_argument("stream meta: class count must be >= 2");
  }
};

/// Thrown whenever a sample's dimensionality disagrees with the model,
/// detector or stream it is handed to.
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(got)) {}
};

inline void require_dim(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

inline void require_sample(const StreamMeta& meta, const LabeledSample& s) {
  require_dim(meta.d, s.dim());
  if (s.y < 0 || static_cast<std::size_t>(s.y) >= meta.classes) {
    throw std::invalid_argument("label " + std::to_string(s.y) + " outside [0, " +
                                std::to_string(meta.classes) + ")");
  }
}

/// A sample together with the generator's ground-truth drift mark.
struct StreamEvent {
  LabeledSample sample;
  bool drift = false;
};

/// Pull-based, single-consumer stream of labeled samples.
class StreamSource {
 public:
  virtual ~StreamSource() = default;

  virtual const StreamMeta& meta() const = 0;

  /// Next element, or nullopt once the stream is exhausted.
  virtual std::optional<StreamEvent> next() = 0;

  /// Whether drift marks emitted by this source carry ground truth.
  virtual bool has_drift_truth() const { return false; }
};

/// Up to k samples in emission order; shorter when the source runs dry.
inline std::vector<LabeledSample> stream_take(StreamSource& source, std::size_t k) {
  std::vector<LabeledSample> out;
  out.reserve(k);
  while (out.size() < k) {
    auto event = source.next();
    if (!event) break;
    out.push_back(std::move(event->sample));
  }
  return out;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace rrslvq

#endif  // RRSLVQ_CORE_HPP_
