#ifndef RRSLVQ_EVALUATION_HPP_
#define RRSLVQ_EVALUATION_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rrslvq/core.hpp"
#include "rrslvq/kswin.hpp"
#include "rrslvq/reactive.hpp"

namespace rrslvq {

/// Anything that can be evaluated prequentially.
template <typename L>
concept Learner = requires(L& learner, const L& cl, const LabeledSample& s, std::span<const double> x) {
  { cl.predict(x) } -> std::convertible_to<Label>;
  learner.learn(s);
  { cl.footprint() } -> std::convertible_to<std::size_t>;
};

/// Detector used by the carrier experiment: sees one batch per time step.
template <typename D>
concept BatchDetector = requires(D& detector, std::span<const LabeledSample> batch) {
  { detector.observe(batch) } -> std::convertible_to<bool>;
};

template <typename M>
std::size_t footprint(const M& model) {
  return model.footprint();
}

// ---------------------------------------------------------------------------
// Confusion matrix and kappa

/// Rows are true classes, columns are predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 2) : classes_(classes), cells_(classes * classes, 0) {}
  ConfusionMatrix(std::size_t classes, std::vector<std::size_t> cells) : classes_(classes), cells_(std::move(cells)) {
    if (cells_.size() != classes_ * classes_) throw std::invalid_argument("confusion matrix: wrong cell count");
  }

  void add(Label truth, Label predicted) {
    if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= classes_ ||
        static_cast<std::size_t>(predicted) >= classes_) {
      throw std::invalid_argument("confusion matrix: label out of range");
    }
    ++cells_[static_cast<std::size_t>(truth) * classes_ + static_cast<std::size_t>(predicted)];
  }

  std::size_t classes() const noexcept { return classes_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return cells_.at(truth * classes_ + predicted); }
  std::size_t total() const noexcept {
    std::size_t sum = 0;
    for (auto c : cells_) sum += c;
    return sum;
  }
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_;
  std::vector<std::size_t> cells_;
};

/// Cohen's kappa; 0 when chance agreement is already 1.
inline double kappa(const ConfusionMatrix& cm) {
  const double total = static_cast<double>(cm.total());
  if (total == 0.0) throw std::invalid_argument("kappa: empty confusion matrix");
  double observed = 0.0;
  double chance = 0.0;
  for (std::size_t k = 0; k < cm.classes(); ++k) {
    observed += static_cast<double>(cm.at(k, k));
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < cm.classes(); ++j) {
      row += static_cast<double>(cm.at(k, j));
      col += static_cast<double>(cm.at(j, k));
    }
    chance += row * col;
  }
  observed /= total;
  chance /= total * total;
  if (chance >= 1.0) return 0.0;
  return (observed - chance) / (1.0 - chance);
}

// ---------------------------------------------------------------------------
// Prequential evaluation

struct PrequentialRecord {
  std::size_t t = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double kappa = 0.0;
  double windowed_accuracy = 0.0;  ///< over the trailing window (200 by default)
  std::size_t footprint = 0;
  double wall_ms = 0.0;
  ConfusionMatrix confusion;
};

/// Running test-then-train statistics.
class PrequentialEvaluator {
 public:
  explicit PrequentialEvaluator(std::size_t classes, std::size_t window = 200)
      : confusion_(classes), recent_(window, 0) {
    if (window == 0) throw std::invalid_argument("prequential: window must be positive");
  }

  void add(Label truth, Label predicted) {
    confusion_.add(truth, predicted);
    const std::uint8_t hit = truth == predicted ? 1 : 0;
    correct_ += hit;
    ++t_;
    const std::size_t slot = (t_ - 1) % recent_.size();
    if (t_ > recent_.size()) recent_hits_ -= recent_[slot];
    recent_[slot] = hit;
    recent_hits_ += hit;
  }

  std::size_t t() const noexcept { return t_; }
  std::size_t correct() const noexcept { return correct_; }
  double accuracy() const noexcept { return t_ ? static_cast<double>(correct_) / static_cast<double>(t_) : 0.0; }
  double windowed_accuracy() const noexcept {
    const std::size_t n = std::min(t_, recent_.size());
    return n ? static_cast<double>(recent_hits_) / static_cast<double>(n) : 0.0;
  }
  const ConfusionMatrix& confusion() const noexcept { return confusion_; }

  PrequentialRecord record(std::size_t footprint, double wall_ms) const {
    PrequentialRecord rec;
    rec.t = t_;
    rec.correct = correct_;
    rec.accuracy = accuracy();
    rec.kappa = t_ ? rrslvq::kappa(confusion_) : 0.0;
    rec.windowed_accuracy = windowed_accuracy();
    rec.footprint = footprint;
    rec.wall_ms = wall_ms;
    rec.confusion = confusion_;
    return rec;
  }

 private:
  ConfusionMatrix confusion_;
  std::vector<std::uint8_t> recent_;
  std::size_t recent_hits_ = 0;
  std::size_t correct_ = 0;
  std::size_t t_ = 0;
};

struct PrequentialOptions {
  std::size_t snapshot_every = 100;
  std::size_t window = 200;
  bool timing = false;
  /// Called after every scored sample with (t, truth, prediction, evaluator).
  std::function<void(std::size_t, Label, Label, const PrequentialEvaluator&)> on_sample;
};

struct PrequentialResult {
  std::vector<PrequentialRecord> snapshots;
  PrequentialRecord summary;
};

namespace detail {

template <typename L>
Label safe_predict(const L& learner, std::span<const double> x) {
  if constexpr (requires { learner.trained(); }) {
    if (!learner.trained()) return 0;
  }
  return static_cast<Label>(learner.predict(x));
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/**
 * Interleaved test-then-train over at most max_t samples.
 *
 * Snapshots are taken every `snapshot_every` samples; the summary reflects
 * the last processed sample, where the running accuracy is the overall mean.
 */
template <Learner L>
PrequentialResult prequential_run(StreamSource& stream, L& learner, std::size_t max_t,
                                  const PrequentialOptions& options = {}) {
  const StreamMeta& meta = stream.meta();
  PrequentialEvaluator eval(meta.classes, options.window);
  PrequentialResult result;
  detail::Stopwatch clock(options.timing);
  while (eval.t() < max_t) {
    auto event = stream.next();
    if (!event) break;
    const LabeledSample& s = event->sample;
    require_sample(meta, s);
    const Label guess = detail::safe_predict(learner, s.x);
    eval.add(s.y, guess);
    learner.learn(s);
    if (options.on_sample) options.on_sample(eval.t(), s.y, guess, eval);
    if (options.snapshot_every && eval.t() % options.snapshot_every == 0) {
      result.snapshots.push_back(eval.record(learner.footprint(), clock.elapsed_ms()));
    }
  }
  result.summary = eval.record(learner.footprint(), clock.elapsed_ms());
  return result;
}

// ---------------------------------------------------------------------------
// Detector scoring

struct DetectorEvalRecord {
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tp = 0;
  std::size_t tolerance = 10;

  std::size_t steps() const noexcept { return tn + fp + fn + tp; }
};

/**
 * Scores per-step detector output against per-step ground truth.
 *
 * A truth mark at t is a true positive when a not yet credited signal fires
 * in [t, t + tolerance] (earliest one is consumed). Signals never credited are
 * false positives; uncredited marks are false negatives.
 */
inline DetectorEvalRecord detector_confusion(const std::vector<bool>& signals, const std::vector<bool>& truth,
                                             std::size_t tolerance = 10) {
  if (signals.size() != truth.size()) throw std::invalid_argument("detector_confusion: length mismatch");
  const std::size_t steps = signals.size();
  std::vector<bool> credited(steps, false);
  DetectorEvalRecord rec;
  rec.tolerance = tolerance;
  std::size_t cursor = 0;  // no signal before cursor is available any more
  for (std::size_t t = 0; t < steps; ++t) {
    if (!truth[t]) continue;
    cursor = std::max(cursor, t);
    const std::size_t end = std::min(steps - 1, t + tolerance);
    bool hit = false;
    for (std::size_t s = cursor; s <= end; ++s) {
      if (signals[s] && !credited[s]) {
        credited[s] = true;
        cursor = s + 1;
        hit = true;
        break;
      }
    }
    if (hit) {
      ++rec.tp;
    } else {
      ++rec.fn;
    }
  }
  for (std::size_t s = 0; s < steps; ++s) {
    if (signals[s] && !credited[s]) ++rec.fp;
  }
  rec.tn = steps - rec.tp - rec.fp - rec.fn;
  return rec;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes carrier

/// Incremental Gaussian naive Bayes with Welford per-class statistics.
class NaiveBayesModel {
 public:
  static constexpr double kVarianceFloor = 1e-9;

  NaiveBayesModel(std::size_t d, std::size_t classes)
      : d_(d), classes_(classes), counts_(classes, 0), mean_(classes * d, 0.0), m2_(classes * d, 0.0) {
    if (d == 0 || classes < 2) throw std::invalid_argument("naive bayes: bad shape");
  }

  void learn(const LabeledSample& s) {
    require_dim(d_, s.dim());
    if (s.y < 0 || static_cast<std::size_t>(s.y) >= classes_) throw std::invalid_argument("naive bayes: bad label");
    const auto c = static_cast<std::size_t>(s.y);
    const double n = static_cast<double>(++counts_[c]);
    for (std::size_t i = 0; i < d_; ++i) {
      double& mean = mean_[c * d_ + i];
      const double delta = s.x[i] - mean;
      mean += delta / n;
      m2_[c * d_ + i] += delta * (s.x[i] - mean);
    }
    ++total_;
  }

  bool trained() const noexcept { return total_ > 0; }

  Label predict(std::span<const double> x) const {
    require_dim(d_, x.size());
    if (!trained()) throw std::logic_error("naive bayes: predict before any learning");
    Label best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes_; ++c) {
      if (counts_[c] == 0) continue;
      double score = std::log(static_cast<double>(counts_[c]) / static_cast<double>(total_));
      for (std::size_t i = 0; i < d_; ++i) {
        const double var = variance(c, i);
        const double diff = x[i] - mean_[c * d_ + i];
        score += -0.5 * std::log(2.0 * std::numbers::pi * var) - diff * diff / (2.0 * var);
      }
      if (score > best_score) {
        best_score = score;
        best = static_cast<Label>(c);
      }
    }
    return best;
  }

  void reset() {
    std::fill(counts_.begin(), counts_.end(), 0);
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
    total_ = 0;
  }

  double prior(std::size_t c) const {
    return total_ ? static_cast<double>(counts_.at(c)) / static_cast<double>(total_) : 0.0;
  }
  double mean(std::size_t c, std::size_t i) const { return mean_.at(c * d_ + i); }
  /// Unbiased variance, floored.
  double variance(std::size_t c, std::size_t i) const {
    const std::size_t n = counts_.at(c);
    const double raw = n > 1 ? m2_[c * d_ + i] / static_cast<double>(n - 1) : 0.0;
    return std::max(raw, kVarianceFloor);
  }
  std::size_t count(std::size_t c) const { return counts_.at(c); }

  /// Means and variances per class and dimension plus one count per class.
  std::size_t footprint() const noexcept { return 2 * classes_ * d_ + classes_; }

 private:
  std::size_t d_;
  std::size_t classes_;
  std::vector<std::size_t> counts_;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::size_t total_ = 0;
};

/// Detector that never fires (carrier baseline without drift handling).
struct NeverDetector {
  bool observe(std::span<const LabeledSample>) const noexcept { return false; }
};

struct CarrierResult {
  PrequentialResult prequential;
  std::vector<bool> signals;  ///< one per time step (batch)
  std::vector<bool> truth;    ///< any ground-truth mark inside the batch
  std::size_t resets = 0;
};

/**
 * Naive Bayes carrier run: samples are scored and learned one at a time; at
 * the end of every batch the detector sees the batch, and when it fires the
 * model is discarded and rebuilt from that batch alone.
 */
template <BatchDetector D>
CarrierResult detector_carrier_run(StreamSource& stream, D& detector, std::size_t max_t, std::size_t batch = 10,
                                   const PrequentialOptions& options = {}) {
  if (batch == 0) throw std::invalid_argument("carrier: batch size must be positive");
  const StreamMeta& meta = stream.meta();
  NaiveBayesModel model(meta.d, meta.classes);
  PrequentialEvaluator eval(meta.classes, options.window);
  CarrierResult result;
  detail::Stopwatch clock(options.timing);
  std::vector<LabeledSample> current;
  current.reserve(batch);
  bool marked = false;

  auto close_batch = [&] {
    if (current.empty()) return;
    const bool fired = detector.observe(std::span<const LabeledSample>(current));
    if (fired) {
      model.reset();
      for (const auto& s : current) model.learn(s);
      ++result.resets;
    }
    result.signals.push_back(fired);
    result.truth.push_back(marked);
    current.clear();
    marked = false;
  };

  while (eval.t() < max_t) {
    auto event = stream.next();
    if (!event) break;
    const LabeledSample& s = event->sample;
    require_sample(meta, s);
    const Label guess = model.trained() ? model.predict(s.x) : 0;
    eval.add(s.y, guess);
    model.learn(s);
    marked = marked || event->drift;
    current.push_back(s);
    if (options.on_sample) options.on_sample(eval.t(), s.y, guess, eval);
    if (current.size() == batch) close_batch();
    if (options.snapshot_every && eval.t() % options.snapshot_every == 0) {
      result.prequential.snapshots.push_back(eval.record(model.footprint(), clock.elapsed_ms()));
    }
  }
  close_batch();
  result.prequential.summary = eval.record(model.footprint(), clock.elapsed_ms());
  return result;
}

// ---------------------------------------------------------------------------
// Risk ordering under drift

struct RiskCheckRecord {
  double err_stale = 0.0;
  double err_adapted = 0.0;
  double random_floor = 0.0;
};

/// Feed k samples of a stream through the model's full learning step.
inline void train_on(StreamSource& stream, RrslvqModel& model, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    auto event = stream.next();
    if (!event) break;
    model.learn(event->sample);
  }
}

/**
 * Compares the 0/1 error on k fresh conceptB samples of the frozen model
 * (trained beforehand on conceptA) with that of a copy adapted on r further
 * conceptB samples.
 */
inline RiskCheckRecord risk_check(StreamSource& concept_b, const RrslvqModel& model, std::size_t k) {
  const std::vector<LabeledSample> test = stream_take(concept_b, k);
  if (test.empty()) throw std::invalid_argument("risk_check: conceptB produced no samples");
  const std::vector<LabeledSample> recent = stream_take(concept_b, model.detector_config().r);

  auto error = [&test](const RrslvqModel& m) {
    std::size_t wrong = 0;
    for (const auto& s : test) wrong += m.predict(s.x) != s.y ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(test.size());
  };

  RiskCheckRecord rec;
  rec.err_stale = error(model);
  RrslvqModel adapted = model;
  adapted.adapt(recent);
  rec.err_adapted = error(adapted);
  rec.random_floor = 1.0 - 1.0 / static_cast<double>(model.meta().classes);
  return rec;
}

/// Convenience overload: trains on k conceptA samples first.
inline RiskCheckRecord risk_check(StreamSource& concept_a, StreamSource& concept_b, RrslvqModel& model,
                                  std::size_t k) {
  train_on(concept_a, model, k);
  return risk_check(concept_b, model, k);
}

// ---------------------------------------------------------------------------

/// Coefficient of determination of the least-squares line through (x, y).
inline double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit_r2: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace rrslvq

#endif  // RRSLVQ_EVALUATION_HPP_
