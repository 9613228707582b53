#ifndef RRSLVQ_GENERATORS_HPP_
#define RRSLVQ_GENERATORS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrslvq/core.hpp"
#include "rrslvq/rng.hpp"

namespace rrslvq {

/**
 * A synthetic source that can emit from one of several concepts.
 *
 * Stationary generators expose at least two concepts so a drift schedule can
 * switch between them; generators with built-in incremental drift (RBF,
 * hyperplane) and RTG expose a single one.
 */
class ConceptGenerator {
 public:
  virtual ~ConceptGenerator() = default;
  virtual const StreamMeta& meta() const = 0;
  virtual std::size_t concept_count() const = 0;
  virtual LabeledSample draw(std::size_t concept_index, SeededRng& rng) = 0;
};

// ---------------------------------------------------------------------------
// SEA

inline constexpr std::array<double, 4> kSeaThresholds{8.0, 9.0, 7.0, 9.5};

/// Noiseless SEA rule: class 1 iff f1 + f2 <= theta. f3 is ignored.
inline Label sea_label(std::span<const double> f, double theta) { return f[0] + f[1] <= theta ? 1 : 0; }

struct SeaConfig {
  std::vector<int> blocks{1, 2};  ///< 1-based block per concept index
  double noise = 0.10;
};

class SeaGenerator final : public ConceptGenerator {
 public:
  explicit SeaGenerator(SeaConfig cfg = {}) : cfg_(std::move(cfg)) {
    if (cfg_.blocks.empty()) throw std::invalid_argument("sea: at least one block required");
    for (int b : cfg_.blocks) {
      if (b < 1 || b > 4) throw std::invalid_argument("sea: block must be in 1..4");
    }
    if (!(cfg_.noise >= 0.0 && cfg_.noise <= 1.0)) throw std::invalid_argument("sea: noise must lie in [0, 1]");
    meta_ = StreamMeta{3, 2, "sea", std::nullopt};
  }

  const StreamMeta& meta() const override { return meta_; }
  std::size_t concept_count() const override { return cfg_.blocks.size(); }
  double threshold(std::size_t concept_index) const {
    return kSeaThresholds[static_cast<std::size_t>(cfg_.blocks.at(concept_index) - 1)];
  }

  LabeledSample draw(std::size_t concept_index, SeededRng& rng) override {
    LabeledSample s;
    s.x = {rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
    s.y = sea_label(s.x, threshold(concept_index));
    if (rng.bernoulli(cfg_.noise)) s.y = 1 - s.y;
    return s;
  }

 private:
  SeaConfig cfg_;
  StreamMeta meta_;
};

// ---------------------------------------------------------------------------
// MIXED

/// Positive iff at least two of: v, w, y < 0.5 + 0.3 sin(3 pi x). Reversed when inverted.
inline Label mixed_label(bool v, bool w, double x, double y, bool inverted) {
  const bool curve = y < 0.5 + 0.3 * std::sin(3.0 * std::numbers::pi * x);
  const int hits = int(v) + int(w) + int(curve);
  const bool positive = hits >= 2;
  return (positive != inverted) ? 1 : 0;
}

struct MixedConfig {
  double noise = 0.0;
};

/// Features (v, w, x, y) with v, w in {0, 1}. Concept 1 is the inverted rule.
class MixedGenerator final : public ConceptGenerator {
 public:
  explicit MixedGenerator(MixedConfig cfg = {}) : cfg_(cfg) { meta_ = StreamMeta{4, 2, "mixed", std::nullopt}; }

  const StreamMeta& meta() const override { return meta_; }
  std::size_t concept_count() const override { return 2; }

  LabeledSample draw(std::size_t concept_index, SeededRng& rng) override {
    const bool v = rng.bernoulli(0.5);
    const bool w = rng.bernoulli(0.5);
    const double x = rng.uniform();
    const double y = rng.uniform();
    LabeledSample s{{v ? 1.0 : 0.0, w ? 1.0 : 0.0, x, y}, mixed_label(v, w, x, y, concept_index % 2 == 1)};
    if (cfg_.noise > 0.0 && rng.bernoulli(cfg_.noise)) s.y = 1 - s.y;
    return s;
  }

 private:
  MixedConfig cfg_;
  StreamMeta meta_;
};

// ---------------------------------------------------------------------------
// Random tree

struct RtgConfig {
  std::size_t features = 10;
  std::size_t classes = 2;
  std::size_t max_depth = 5;
  std::size_t first_leaf_level = 3;
  double leaf_fraction = 0.15;
};

/// Binary decision tree over features in [0, 1]. Node 0 is the root.
class RandomTree {
 public:
  struct Node {
    bool leaf = true;
    Label label = 0;
    std::size_t feature = 0;
    double threshold = 0.5;
    std::size_t left = 0;   ///< x[feature] < threshold
    std::size_t right = 0;  ///< x[feature] >= threshold
  };

  RandomTree() = default;
  explicit RandomTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("random tree: no nodes");
  }

  /// Random splits down to a bounded depth; thresholds stay inside the
  /// interval still reachable for the chosen feature.
  static RandomTree build(const RtgConfig& cfg, SeededRng& rng) {
    if (cfg.features < 1 || cfg.classes < 2) throw std::invalid_argument("rtg: bad configuration");
    RandomTree tree;
    std::vector<double> lo(cfg.features, 0.0);
    std::vector<double> hi(cfg.features, 1.0);
    tree.grow(cfg, rng, 0, lo, hi);
    return tree;
  }

  Label classify(std::span<const double> x) const {
    std::size_t at = 0;
    while (!nodes_[at].leaf) {
      const auto& node = nodes_[at];
      at = x[node.feature] < node.threshold ? node.left : node.right;
    }
    return nodes_[at].label;
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  std::size_t grow(const RtgConfig& cfg, SeededRng& rng, std::size_t depth, std::vector<double>& lo,
                   std::vector<double>& hi) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    const bool stop = depth >= cfg.max_depth || (depth >= cfg.first_leaf_level && rng.bernoulli(cfg.leaf_fraction));
    if (stop) {
      nodes_[id].leaf = true;
      nodes_[id].label = static_cast<Label>(rng.index(cfg.classes));
      return id;
    }
    const std::size_t feature = rng.index(cfg.features);
    const double threshold = rng.uniform(lo[feature], hi[feature]);
    nodes_[id].leaf = false;
    nodes_[id].feature = feature;
    nodes_[id].threshold = threshold;

    const double saved_hi = hi[feature];
    hi[feature] = threshold;
    const std::size_t left = grow(cfg, rng, depth + 1, lo, hi);
    hi[feature] = saved_hi;

    const double saved_lo = lo[feature];
    lo[feature] = threshold;
    const std::size_t right = grow(cfg, rng, depth + 1, lo, hi);
    lo[feature] = saved_lo;

    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  std::vector<Node> nodes_;
};

class RtgGenerator final : public ConceptGenerator {
 public:
  RtgGenerator(RtgConfig cfg, std::uint64_t tree_seed) : cfg_(cfg) {
    SeededRng tree_rng(tree_seed);
    tree_ = RandomTree::build(cfg_, tree_rng);
    meta_ = StreamMeta{cfg_.features, cfg_.classes, "rtg", std::nullopt};
  }

  RtgGenerator(RtgConfig cfg, RandomTree tree) : cfg_(cfg), tree_(std::move(tree)) {
    meta_ = StreamMeta{cfg_.features, cfg_.classes, "rtg", std::nullopt};
  }

  const StreamMeta& meta() const override { return meta_; }
  std::size_t concept_count() const override { return 1; }
  const RandomTree& tree() const noexcept { return tree_; }

  LabeledSample draw(std::size_t, SeededRng& rng) override {
    LabeledSample s;
    s.x.resize(cfg_.features);
    for (auto& v : s.x) v = rng.uniform();
    s.y = tree_.classify(s.x);
    return s;
  }

 private:
  RtgConfig cfg_;
  RandomTree tree_;
  StreamMeta meta_;
};

// ---------------------------------------------------------------------------
// Radial basis function with drifting centroids

struct RbfCentroid {
  std::vector<double> center;
  Label label = 0;
  double stddev = 0.0;
  double weight = 1.0;
  std::vector<double> direction;  ///< unit length unless set otherwise
};

struct RbfConfig {
  std::size_t centroids = 50;
  std::size_t classes = 5;
  std::size_t features = 10;
  double speed = 0.0001;
};

class RbfGenerator final : public ConceptGenerator {
 public:
  /// Centers U(0,1)^d, stddev U(0,1), weight U(0,1), random unit drift direction.
  RbfGenerator(RbfConfig cfg, std::uint64_t model_seed) : cfg_(cfg) {
    if (cfg_.centroids < 1 || cfg_.features < 1 || cfg_.classes < 2) {
      throw std::invalid_argument("rbf: bad configuration");
    }
    SeededRng rng(model_seed);
    centroids_.resize(cfg_.centroids);
    for (auto& c : centroids_) {
      c.center.resize(cfg_.features);
      for (auto& v : c.center) v = rng.uniform();
      c.label = static_cast<Label>(rng.index(cfg_.classes));
      c.stddev = rng.uniform();
      c.weight = rng.uniform();
      c.direction = random_unit(rng, cfg_.features);
    }
    meta_ = StreamMeta{cfg_.features, cfg_.classes, "rbf", std::nullopt};
  }

  RbfGenerator(RbfConfig cfg, std::vector<RbfCentroid> centroids) : cfg_(cfg), centroids_(std::move(centroids)) {
    if (centroids_.empty()) throw std::invalid_argument("rbf: no centroids");
    for (const auto& c : centroids_) {
      require_dim(cfg_.features, c.center.size());
      require_dim(cfg_.features, c.direction.size());
    }
    meta_ = StreamMeta{cfg_.features, cfg_.classes, "rbf", std::nullopt};
  }

  const StreamMeta& meta() const override { return meta_; }
  std::size_t concept_count() const override { return 1; }
  const std::vector<RbfCentroid>& centroids() const noexcept { return centroids_; }

  LabeledSample draw(std::size_t, SeededRng& rng) override {
    double total = 0.0;
    for (const auto& c : centroids_) total += c.weight;
    double pick = rng.uniform() * total;
    std::size_t chosen = 0;
    for (; chosen + 1 < centroids_.size(); ++chosen) {
      if (pick < centroids_[chosen].weight) break;
      pick -= centroids_[chosen].weight;
    }
    // Skip zero-weight centroids that the running subtraction may land on.
    while (centroids_[chosen].weight <= 0.0 && chosen > 0) --chosen;
    const auto& c = centroids_[chosen];

    std::vector<double> offset(cfg_.features);
    double norm = 0.0;
    for (auto& v : offset) {
      v = rng.uniform(-1.0, 1.0);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double length = rng.normal() * c.stddev;
    LabeledSample s;
    s.x.resize(cfg_.features);
    for (std::size_t i = 0; i < cfg_.features; ++i) {
      s.x[i] = c.center[i] + (norm > 0.0 ? offset[i] / norm * length : 0.0);
    }
    s.y = c.label;
    advance();
    return s;
  }

 private:
  static std::vector<double> random_unit(SeededRng& rng, std::size_t d) {
    std::vector<double> v(d);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& e : v) {
        e = rng.uniform(-1.0, 1.0);
        norm += e * e;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& e : v) e /= norm;
    return v;
  }

  void advance() {
    if (cfg_.speed == 0.0) return;
    for (auto& c : centroids_) {
      for (std::size_t i = 0; i < cfg_.features; ++i) c.center[i] += cfg_.speed * c.direction[i];
    }
  }

  RbfConfig cfg_;
  std::vector<RbfCentroid> centroids_;
  StreamMeta meta_;
};

// ---------------------------------------------------------------------------
// Rotating hyperplane

struct HyperplaneConfig {
  std::size_t features = 10;
  double magnitude = 0.001;
  double noise = 0.10;
  double direction_flip = 0.10;
};

/// Class 1 iff sum w_i x_i >= sum w_i / 2 (ties go to class 1).
inline Label hyperplane_label(std::span<const double> weights, std::span<const double> x) {
  double dot = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    dot += weights[i] * x[i];
    total += weights[i];
  }
  return dot >= total / 2.0 ? 1 : 0;
}

class HyperplaneGenerator final : public ConceptGenerator {
 public:
  HyperplaneGenerator(HyperplaneConfig cfg, std::uint64_t model_seed) : cfg_(cfg) {
    if (cfg_.features < 1) throw std::invalid_argument("hyperplane: need at least one feature");
    SeededRng rng(model_seed);
    weights_.resize(cfg_.features);
    directions_.resize(cfg_.features);
    for (auto& w : weights_) w = rng.uniform();
    for (auto& s : directions_) s = rng.bernoulli(0.5) ? 1.0 : -1.0;
    meta_ = StreamMeta{cfg_.features, 2, "hyper", std::nullopt};
  }

  HyperplaneGenerator(HyperplaneConfig cfg, std::vector<double> weights)
      : cfg_(cfg), weights_(std::move(weights)), directions_(weights_.size(), 1.0) {
    require_dim(cfg_.features, weights_.size());
    meta_ = StreamMeta{cfg_.features, 2, "hyper", std::nullopt};
  }

  const StreamMeta& meta() const override { return meta_; }
  std::size_t concept_count() const override { return 1; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  LabeledSample draw(std::size_t, SeededRng& rng) override {
    LabeledSample s;
    s.x.resize(cfg_.features);
    for (auto& v : s.x) v = rng.uniform();
    s.y = hyperplane_label(weights_, s.x);
    if (rng.bernoulli(cfg_.noise)) s.y = 1 - s.y;
    if (cfg_.magnitude != 0.0) {
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (rng.bernoulli(cfg_.direction_flip)) directions_[i] = -directions_[i];
        weights_[i] = std::clamp(weights_[i] + cfg_.magnitude * directions_[i], 0.0, 1.0);
      }
    }
    return s;
  }

 private:
  HyperplaneConfig cfg_;
  std::vector<double> weights_;
  std::vector<double> directions_;
  StreamMeta meta_;
};

// ---------------------------------------------------------------------------
// Drift schedules

enum class DriftKind { none, abrupt, gradual, frequent_abrupt, frequent_gradual };

inline const char* to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::none: return "none";
    case DriftKind::abrupt: return "abrupt";
    case DriftKind::gradual: return "gradual";
    case DriftKind::frequent_abrupt: return "frequent_abrupt";
    case DriftKind::frequent_gradual: return "frequent_gradual";
  }
  return "none";
}

inline std::optional<DriftKind> parse_drift_kind(std::string_view s) {
  for (auto k : {DriftKind::none, DriftKind::abrupt, DriftKind::gradual, DriftKind::frequent_abrupt,
                 DriftKind::frequent_gradual}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct DriftSchedule {
  DriftKind kind = DriftKind::none;
  std::size_t position = 0;  ///< first drift start (0-based sample index)
  std::size_t width = 1;     ///< gradual transition width
  std::size_t period = 1;    ///< gap between the end of one drift and the next start

  bool gradual() const noexcept { return kind == DriftKind::gradual || kind == DriftKind::frequent_gradual; }
  bool frequent() const noexcept {
    return kind == DriftKind::frequent_abrupt || kind == DriftKind::frequent_gradual;
  }

  void validate() const {
    if (gradual() && width < 1) throw std::invalid_argument("drift schedule: width must be >= 1");
    if (frequent() && period < 1) throw std::invalid_argument("drift schedule: period must be >= 1");
  }

  /// Span of one transition: a single sample for abrupt kinds, [start, start + width] for gradual.
  std::size_t transition_span() const noexcept { return gradual() ? width : 0; }
};

/// Schedule state at one time step.
struct SchedulePoint {
  std::size_t from = 0;         ///< concept before the current/last drift
  std::size_t to = 0;           ///< concept after it
  double new_probability = 0.0; ///< chance of emitting from `to`
  bool mark = false;            ///< ground-truth drift flag
};

/// Sigmoid mixing weight of the new concept, 0.5 at the drift start.
inline double gradual_probability(std::size_t t, std::size_t start, std::size_t width) {
  const double z = -4.0 * (static_cast<double>(t) - static_cast<double>(start)) / static_cast<double>(width);
  return 1.0 / (1.0 + std::exp(z));
}

/// Evaluates a schedule for time t over a two-concept alternation 0, 1, 0, ...
inline SchedulePoint schedule_at(const DriftSchedule& s, std::size_t t) {
  SchedulePoint pt;
  if (s.kind == DriftKind::none || t < s.position) return pt;
  const std::size_t span = s.transition_span();
  std::size_t k = 0;            // index of the drift whose start is the latest <= t
  std::size_t offset = t - s.position;
  if (s.frequent()) {
    const std::size_t cycle = span + s.period;
    k = offset / cycle;
    offset = offset % cycle;
  }
  pt.from = k % 2;
  pt.to = (k + 1) % 2;
  if (!s.gradual()) {
    pt.new_probability = 1.0;
    pt.mark = offset == 0;
  } else if (offset <= span) {
    pt.new_probability = gradual_probability(offset, 0, s.width);
    pt.mark = true;
  } else {
    pt.new_probability = 1.0;
  }
  return pt;
}

/**
 * A generator run under a drift schedule. Owns the generator and the RNG that
 * drives both sampling and the gradual-mixing draws.
 */
class ConceptStream final : public StreamSource {
 public:
  ConceptStream(std::unique_ptr<ConceptGenerator> base, DriftSchedule schedule, std::uint64_t seed,
                std::optional<std::size_t> length = std::nullopt)
      : base_(std::move(base)), schedule_(schedule), rng_(seed), length_(length) {
    if (!base_) throw std::invalid_argument("concept stream: no generator");
    schedule_.validate();
    if (schedule_.kind != DriftKind::none && base_->concept_count() < 2) {
      throw std::invalid_argument("drift schedule requires a generator with two concepts (" + base_->meta().name +
                                  " has one)");
    }
    meta_ = base_->meta();
    meta_.length_hint = length_;
  }

  const StreamMeta& meta() const override { return meta_; }
  bool has_drift_truth() const override { return true; }
  const DriftSchedule& schedule() const noexcept { return schedule_; }
  ConceptGenerator& generator() noexcept { return *base_; }
  std::size_t position() const noexcept { return t_; }
  /// Concept used for the most recent sample.
  std::size_t last_concept() const noexcept { return last_concept_; }

  std::optional<StreamEvent> next() override {
    if (length_ && t_ >= *length_) return std::nullopt;
    const SchedulePoint pt = schedule_at(schedule_, t_);
    std::size_t concept_index = pt.from;
    if (schedule_.kind != DriftKind::none) {
      if (pt.new_probability >= 1.0 || (pt.new_probability > 0.0 && rng_.uniform() < pt.new_probability)) {
        concept_index = pt.to;
      }
    }
    last_concept_ = concept_index;
    StreamEvent ev{base_->draw(concept_index, rng_), pt.mark};
    ++t_;
    return ev;
  }

 private:
  std::unique_ptr<ConceptGenerator> base_;
  DriftSchedule schedule_;
  SeededRng rng_;
  std::optional<std::size_t> length_;
  StreamMeta meta_;
  std::size_t t_ = 0;
  std::size_t last_concept_ = 0;
};

inline std::unique_ptr<ConceptStream> compose_drift(std::unique_ptr<ConceptGenerator> base, DriftSchedule schedule,
                                                    std::uint64_t seed,
                                                    std::optional<std::size_t> length = std::nullopt) {
  return std::make_unique<ConceptStream>(std::move(base), schedule, seed, length);
}

}  // namespace rrslvq

#endif  // RRSLVQ_GENERATORS_HPP_
