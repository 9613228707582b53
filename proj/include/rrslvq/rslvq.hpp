#ifndef RRSLVQ_RSLVQ_HPP_
#define RRSLVQ_RSLVQ_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrslvq/core.hpp"
#include "rrslvq/rng.hpp"

namespace rrslvq {

struct RslvqConfig {
  std::size_t prototypes_per_class = 1;
  double sigma = 1.0;     ///< Gaussian kernel width
  double gamma = 0.9;     ///< decay of both running means
  double epsilon = 1e-8;

  void validate() const {
    if (prototypes_per_class < 1) throw std::invalid_argument("rslvq: prototypes_per_class must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("rslvq: sigma must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("rslvq: gamma must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("rslvq: epsilon must be positive");
  }
};

struct Prototype {
  std::vector<double> theta;
  Label label = 0;
  std::vector<double> grad_sq_mean;   ///< E[g^2]
  std::vector<double> delta_sq_mean;  ///< E[dtheta^2]

  Prototype() = default;
  Prototype(std::vector<double> position, Label c)
      : theta(std::move(position)), label(c), grad_sq_mean(theta.size(), 0.0), delta_sq_mean(theta.size(), 0.0) {}

  void reset_optimizer() {
    std::fill(grad_sq_mean.begin(), grad_sq_mean.end(), 0.0);
    std::fill(delta_sq_mean.begin(), delta_sq_mean.end(), 0.0);
  }
};

/**
 * Adadelta-style update of one prototype against gradient g.
 *
 * E[g^2] is refreshed first; the step uses the previous E[dtheta^2] and that
 * running mean is refreshed with the step afterwards.
 */
inline void rmsprop_step(Prototype& p, std::span<const double> g, const RslvqConfig& cfg) {
  require_dim(p.theta.size(), g.size());
  const double keep = cfg.gamma;
  const double mix = 1.0 - cfg.gamma;
  for (std::size_t i = 0; i < g.size(); ++i) {
    p.grad_sq_mean[i] = keep * p.grad_sq_mean[i] + mix * g[i] * g[i];
    const double step =
        std::sqrt(p.delta_sq_mean[i] + cfg.epsilon) / std::sqrt(p.grad_sq_mean[i] + cfg.epsilon) * g[i];
    p.theta[i] -= step;
    p.delta_sq_mean[i] = keep * p.delta_sq_mean[i] + mix * step * step;
  }
}

/// Robust soft LVQ: class-labelled Gaussian mixture trained one sample at a time.
class RslvqModel {
 public:
  /// Prototypes drawn from N(0, sigma * I); labels assigned round-robin.
  RslvqModel(StreamMeta meta, RslvqConfig cfg, SeededRng& rng) : meta_(std::move(meta)), cfg_(cfg) {
    meta_.validate();
    cfg_.validate();
    const std::size_t m = cfg_.prototypes_per_class * meta_.classes;
    const double spread = std::sqrt(cfg_.sigma);
    prototypes_.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> theta(meta_.d);
      for (auto& v : theta) v = rng.normal(0.0, spread);
      prototypes_.emplace_back(std::move(theta), static_cast<Label>(j % meta_.classes));
    }
  }

  /// Model over caller-supplied prototypes (tests, snapshots).
  RslvqModel(StreamMeta meta, RslvqConfig cfg, std::vector<Prototype> prototypes)
      : meta_(std::move(meta)), cfg_(cfg), prototypes_(std::move(prototypes)) {
    meta_.validate();
    cfg_.validate();
    if (prototypes_.empty()) throw std::invalid_argument("rslvq: no prototypes");
    for (const auto& p : prototypes_) {
      require_dim(meta_.d, p.theta.size());
      if (p.label < 0 || static_cast<std::size_t>(p.label) >= meta_.classes) {
        throw std::invalid_argument("rslvq: prototype label out of range");
      }
      if (p.grad_sq_mean.size() != meta_.d || p.delta_sq_mean.size() != meta_.d) {
        throw std::invalid_argument("rslvq: optimizer state length differs from d");
      }
    }
  }

  const StreamMeta& meta() const noexcept { return meta_; }
  const RslvqConfig& config() const noexcept { return cfg_; }
  std::span<const Prototype> prototypes() const noexcept { return prototypes_; }
  std::span<Prototype> prototypes() noexcept { return prototypes_; }
  std::size_t size() const noexcept { return prototypes_.size(); }

  /// P(j|x) for every prototype, normalised over all of them.
  std::vector<double> posterior(std::span<const double> x) const {
    require_dim(meta_.d, x.size());
    std::vector<double> out(prototypes_.size());
    const double scale = 1.0 / (2.0 * cfg_.sigma * cfg_.sigma);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < prototypes_.size(); ++j) {
      out[j] = -squared_distance(x, prototypes_[j].theta) * scale;
      top = std::max(top, out[j]);
    }
    double total = 0.0;
    for (auto& v : out) {
      v = std::exp(v - top);
      total += v;
    }
    for (auto& v : out) v /= total;
    return out;
  }

  /// Posterior mass on prototypes whose label differs from y.
  double loss_ratio(std::span<const double> x, Label y) const {
    check_label(y);
    return wrong_mass(posterior(x), y);
  }

  /// Per-prototype gradient, m rows of length d.
  std::vector<std::vector<double>> gradient(std::span<const double> x, Label y) const {
    check_label(y);
    const auto post = posterior(x);
    const double ls = wrong_mass(post, y);
    std::vector<std::vector<double>> grads(prototypes_.size(), std::vector<double>(meta_.d));
    for (std::size_t j = 0; j < prototypes_.size(); ++j) {
      const double weight = prototypes_[j].label == y ? -post[j] * ls : post[j] * (1.0 - ls);
      for (std::size_t i = 0; i < meta_.d; ++i) grads[j][i] = weight * (x[i] - prototypes_[j].theta[i]);
    }
    return grads;
  }

  /// One update of every prototype with (x, y).
  void learn_one(const LabeledSample& s) {
    require_sample(meta_, s);
    const auto post = posterior(s.x);
    const double ls = wrong_mass(post, s.y);
    std::vector<double> g(meta_.d);
    for (std::size_t j = 0; j < prototypes_.size(); ++j) {
      auto& p = prototypes_[j];
      const double weight = p.label == s.y ? -post[j] * ls : post[j] * (1.0 - ls);
      for (std::size_t i = 0; i < meta_.d; ++i) g[i] = weight * (s.x[i] - p.theta[i]);
      rmsprop_step(p, g, cfg_);
    }
  }

  void learn(const LabeledSample& s) { learn_one(s); }

  /// Label of the nearest prototype (first one on exact ties).
  Label predict(std::span<const double> x) const {
    require_dim(meta_.d, x.size());
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < prototypes_.size(); ++j) {
      const double dist = squared_distance(x, prototypes_[j].theta);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    return prototypes_[best].label;
  }

  /// Stored reals for prototype coordinates: d * m.
  std::size_t footprint() const noexcept { return meta_.d * prototypes_.size(); }

  /// One prototype per line: label, then coordinates (shortest round-trip form).
  void write_snapshot(std::ostream& os) const {
    char buf[32];
    for (const auto& p : prototypes_) {
      os << p.label;
      for (double v : p.theta) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        os << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
      }
      os << '\n';
    }
  }

 private:
  void check_label(Label y) const {
    if (y < 0 || static_cast<std::size_t>(y) >= meta_.classes) {
      throw std::invalid_argument("rslvq: label out of range");
    }
  }

  double wrong_mass(const std::vector<double>& post, Label y) const noexcept {
    double ls = 0.0;
    for (std::size_t j = 0; j < prototypes_.size(); ++j) {
      if (prototypes_[j].label != y) ls += post[j];
    }
    return ls;
  }

  StreamMeta meta_;
  RslvqConfig cfg_;
  std::vector<Prototype> prototypes_;
};

}  // namespace rrslvq

#endif  // RRSLVQ_RSLVQ_HPP_
