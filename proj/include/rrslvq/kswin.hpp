#ifndef RRSLVQ_KSWIN_HPP_
#define RRSLVQ_KSWIN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrslvq/core.hpp"
#include "rrslvq/rng.hpp"

namespace rrslvq {

struct KswinConfig {
  std::size_t n = 300;    ///< sliding window capacity
  std::size_t r = 30;     ///< size of the recent and the sampled comparison windows
  double alpha = 0.0001;  ///< significance level, used as given

  void validate() const {
    if (r < 1 || 2 * r > n) throw std::invalid_argument("kswin: need 1 <= r <= n/2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("kswin: alpha must lie in (0, 1)");
  }
};

/// Detector invoked on a window holding fewer than n samples.
class InsufficientHistory : public std::logic_error {
 public:
  InsufficientHistory() : std::logic_error("kswin: sliding window not yet full") {}
};

/// FIFO memory of the last n labeled samples. Index 0 is the oldest element.
class SlidingWindow {
 public:
  explicit SlidingWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("sliding window capacity must be positive");
  }

  void push(LabeledSample s) {
    if (!buffer_.empty()) require_dim(buffer_.front().dim(), s.dim());
    if (buffer_.size() == capacity_) buffer_.pop_front();
    buffer_.push_back(std::move(s));
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return buffer_.size(); }
  bool full() const noexcept { return buffer_.size() == capacity_; }
  bool empty() const noexcept { return buffer_.empty(); }
  std::size_t dim() const noexcept { return buffer_.empty() ? 0 : buffer_.front().dim(); }

  const LabeledSample& operator[](std::size_t i) const { return buffer_[i]; }
  const LabeledSample& newest() const { return buffer_.back(); }

  void clear() noexcept { buffer_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<LabeledSample> buffer_;
};

/// Window indices of the two comparison sets.
struct WindowSplit {
  std::vector<std::size_t> sampled;  ///< W: r distinct indices from the non-recent part
  std::vector<std::size_t> recent;   ///< R: the r newest indices, oldest first
};

/// R is the r newest elements; W is r indices drawn uniformly without
/// replacement from [0, n - r).
inline WindowSplit split_windows(const SlidingWindow& window, std::size_t r, SeededRng& rng) {
  if (!window.full()) throw InsufficientHistory();
  const std::size_t n = window.size();
  if (r < 1 || 2 * r > n) throw std::invalid_argument("split_windows: need 1 <= r <= n/2");
  WindowSplit split;
  split.sampled = rng.sample_without_replacement(n - r, r);
  split.recent.reserve(r);
  for (std::size_t i = n - r; i < n; ++i) split.recent.push_back(i);
  return split;
}

/// Empirical CDF at x: fraction of values <= x.
inline double ecdf_eval(std::span<const double> values, double x) {
  if (values.empty()) throw std::invalid_argument("ecdf_eval: empty sample");
  const auto count = std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; });
  return static_cast<double>(count) / static_cast<double>(values.size());
}

namespace detail {

// Both inputs sorted ascending. Walks the pooled distinct values; between
// consecutive points both ECDFs are constant, so this is the exact sup.
inline double ks_sorted(std::span<const double> a, std::span<const double> b) noexcept {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < a.size() || j < b.size()) {
    double point;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      point = a[i];
    } else {
      point = b[j];
    }
    while (i < a.size() && a[i] <= point) ++i;
    while (j < b.size() && b[j] <= point) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

}  // namespace detail

/// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return detail::ks_sorted(sa, sb);
}

/// Rejection distance for two equal-size windows of r samples: sqrt(-ln(alpha) / r).
inline double ks_threshold(double alpha, std::size_t r) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_threshold: alpha must lie in (0, 1)");
  if (r < 1) throw std::invalid_argument("ks_threshold: r must be positive");
  return std::sqrt(-std::log(alpha) / static_cast<double>(r));
}

struct DriftSignal {
  bool detected = false;
  std::vector<double> statistics;           ///< one KS distance per dimension
  double threshold = 0.0;
  std::vector<std::size_t> exceeded_dims;   ///< ascending
  std::vector<LabeledSample> recent_window; ///< R with labels, oldest first

  double max_statistic() const noexcept {
    return statistics.empty() ? 0.0 : *std::max_element(statistics.begin(), statistics.end());
  }
};

/// Dimension indices joined with ';' ("" when empty).
inline std::string join_dims(const std::vector<std::size_t>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(dims[i]);
  }
  return out;
}

/// CSV row: t,detected,max_statistic,exceeded_dims
inline std::string to_csv_row(const DriftSignal& signal, std::size_t t) {
  char stat[32];
  std::snprintf(stat, sizeof stat, "%.6f", signal.max_statistic());
  return std::to_string(t) + ',' + (signal.detected ? "1" : "0") + ',' + stat + ',' +
         join_dims(signal.exceeded_dims);
}

/// Per-dimension KS test of the r newest samples against r samples drawn from
/// the older part of a full window.
inline DriftSignal detect(const SlidingWindow& window, const KswinConfig& cfg, SeededRng& rng) {
  cfg.validate();
  if (window.capacity() != cfg.n) throw std::invalid_argument("detect: window capacity differs from n");
  const WindowSplit split = split_windows(window, cfg.r, rng);
  const std::size_t d = window.dim();

  DriftSignal signal;
  signal.threshold = ks_threshold(cfg.alpha, cfg.r);
  signal.statistics.resize(d);
  std::vector<double> sampled(cfg.r);
  std::vector<double> recent(cfg.r);
  for (std::size_t dim = 0; dim < d; ++dim) {
    for (std::size_t k = 0; k < cfg.r; ++k) {
      sampled[k] = window[split.sampled[k]].x[dim];
      recent[k] = window[split.recent[k]].x[dim];
    }
    std::sort(sampled.begin(), sampled.end());
    std::sort(recent.begin(), recent.end());
    const double stat = detail::ks_sorted(sampled, recent);
    signal.statistics[dim] = stat;
    if (stat > signal.threshold) signal.exceeded_dims.push_back(dim);
  }
  signal.detected = !signal.exceeded_dims.empty();
  signal.recent_window.reserve(cfg.r);
  for (std::size_t idx : split.recent) signal.recent_window.push_back(window[idx]);
  return signal;
}

/**
 * KSWIN drift detector: owns the sliding window and the sampling RNG.
 *
 * The window is never cleared on detection; what to do with a signal is up
 * to the caller.
 */
class KswinDetector {
 public:
  KswinDetector(KswinConfig cfg, std::uint64_t seed) : cfg_(cfg), window_(cfg.n), rng_(seed) {
    cfg_.validate();
  }

  /// Push one sample; returns the test outcome once the window is full.
  std::optional<DriftSignal> add(const LabeledSample& s) {
    window_.push(s);
    if (!window_.full()) return std::nullopt;
    return detect(window_, cfg_, rng_);
  }

  /// Push a batch, then test once. True on detection.
  bool observe(std::span<const LabeledSample> batch) {
    for (const auto& s : batch) window_.push(s);
    if (!window_.full()) {
      last_.reset();
      return false;
    }
    last_ = detect(window_, cfg_, rng_);
    return last_->detected;
  }

  const std::optional<DriftSignal>& last_signal() const noexcept { return last_; }
  const SlidingWindow& window() const noexcept { return window_; }
  const KswinConfig& config() const noexcept { return cfg_; }
  SeededRng& rng() noexcept { return rng_; }

 private:
  KswinConfig cfg_;
  SlidingWindow window_;
  SeededRng rng_;
  std::optional<DriftSignal> last_;
};

}  // namespace rrslvq

#endif  // RRSLVQ_KSWIN_HPP_
