#ifndef RRSLVQ_REACTIVE_HPP_
#define RRSLVQ_REACTIVE_HPP_

#include <span>
#include <stdexcept>
#include <vector>

#include "rrslvq/core.hpp"
#include "rrslvq/kswin.hpp"
#include "rrslvq/rng.hpp"
#include "rrslvq/rslvq.hpp"

namespace rrslvq {

struct AdaptationReport {
  std::size_t t = 0;  ///< 1-based index of the sample that triggered it
  std::vector<std::size_t> exceeded_dims;
  double max_statistic = 0.0;
  std::vector<double> replacement_mean;
  std::size_t samples_retrained = 0;
};

/**
 * Reactive RSLVQ: an RSLVQ classifier watched by a KSWIN detector.
 *
 * On a detection every prototype is moved to the mean of the recent window R,
 * its optimizer state is cleared, and the model is retrained once over R in
 * window order. The sliding window itself is left untouched.
 */
class RrslvqModel {
 public:
  RrslvqModel(StreamMeta meta, RslvqConfig rslvq_cfg, KswinConfig kswin_cfg, std::uint64_t seed)
      : rng_(seed), classifier_(meta, rslvq_cfg, rng_), kswin_(kswin_cfg), window_(kswin_cfg.n) {
    kswin_.validate();
  }

  const RslvqModel& classifier() const noexcept { return classifier_; }
  RslvqModel& classifier() noexcept { return classifier_; }
  const SlidingWindow& window() const noexcept { return window_; }
  const KswinConfig& detector_config() const noexcept { return kswin_; }
  const StreamMeta& meta() const noexcept { return classifier_.meta(); }
  const std::vector<AdaptationReport>& adaptation_log() const noexcept { return log_; }
  std::size_t samples_seen() const noexcept { return t_; }
  std::size_t detections() const noexcept { return detections_; }

  Label predict(std::span<const double> x) const { return classifier_.predict(x); }

  /// Test-then-train step: prediction is made before any state changes.
  Label process(const LabeledSample& s) {
    const Label guess = classifier_.predict(s.x);
    learn(s);
    return guess;
  }

  /// Window update, drift test, optional adaptation, then the regular update.
  void learn(const LabeledSample& s) {
    require_sample(classifier_.meta(), s);
    ++t_;
    window_.push(s);
    if (window_.full()) {
      DriftSignal signal = detect(window_, kswin_, rng_);
      if (signal.detected) {
        ++detections_;
        adapt(signal.recent_window, signal.exceeded_dims, signal.max_statistic());
      }
    }
    classifier_.learn_one(s);
  }

  /// Move every prototype to mean(R) and clear optimizer state. Labels stay.
  std::vector<double> replace_prototypes(std::span<const LabeledSample> recent) {
    if (recent.empty()) throw std::invalid_argument("adapt: empty recent window");
    const std::size_t d = classifier_.meta().d;
    std::vector<double> mean(d, 0.0);
    for (const auto& s : recent) {
      require_dim(d, s.dim());
      for (std::size_t i = 0; i < d; ++i) mean[i] += s.x[i];
    }
    for (auto& v : mean) v /= static_cast<double>(recent.size());
    for (auto& p : classifier_.prototypes()) {
      p.theta = mean;
      p.reset_optimizer();
    }
    return mean;
  }

  /// Replacement followed by a single retraining pass over R.
  void adapt(std::span<const LabeledSample> recent, std::vector<std::size_t> exceeded_dims = {},
             double max_statistic = 0.0) {
    AdaptationReport report;
    report.t = t_;
    report.exceeded_dims = std::move(exceeded_dims);
    report.max_statistic = max_statistic;
    report.replacement_mean = replace_prototypes(recent);
    for (const auto& s : recent) classifier_.learn_one(s);
    report.samples_retrained = recent.size();
    log_.push_back(std::move(report));
  }

  /// Adapt on the current r newest window elements regardless of any test.
  void force_adapt() {
    if (window_.size() < kswin_.r) throw InsufficientHistory();
    std::vector<LabeledSample> recent;
    recent.reserve(kswin_.r);
    for (std::size_t i = window_.size() - kswin_.r; i < window_.size(); ++i) recent.push_back(window_[i]);
    adapt(recent);
  }

  /// Stored reals: prototype coordinates plus window features, d * (m + n).
  std::size_t footprint() const noexcept {
    return classifier_.meta().d * (classifier_.size() + kswin_.n);
  }

 private:
  SeededRng rng_;
  RslvqModel classifier_;
  KswinConfig kswin_;
  SlidingWindow window_;
  std::vector<AdaptationReport> log_;
  std::size_t t_ = 0;
  std::size_t detections_ = 0;
};

}  // namespace rrslvq

#endif  // RRSLVQ_REACTIVE_HPP_
