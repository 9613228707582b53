#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "rrslvq/rng.hpp"
#include "rrslvq/rslvq.hpp"

using namespace rrslvq;

namespace {

StreamMeta meta1d() { return StreamMeta{1, 2, "line", std::nullopt}; }

RslvqModel two_points(double a, double b, RslvqConfig cfg = {}) {
  return RslvqModel(meta1d(), cfg, std::vector<Prototype>{Prototype({a}, 0), Prototype({b}, 1)});
}

}  // namespace

TEST(RslvqConfig, Validation) {
  EXPECT_NO_THROW(RslvqConfig{}.validate());
  EXPECT_THROW((RslvqConfig{0, 1.0, 0.9, 1e-8}.validate()), std::invalid_argument);
  EXPECT_THROW((RslvqConfig{1, 0.0, 0.9, 1e-8}.validate()), std::invalid_argument);
  EXPECT_THROW((RslvqConfig{1, 1.0, 1.0, 1e-8}.validate()), std::invalid_argument);
  EXPECT_THROW((RslvqConfig{1, 1.0, 0.9, 0.0}.validate()), std::invalid_argument);
}

TEST(RslvqInit, ShapeAndLabels) {
  SeededRng rng(1);
  RslvqModel m(StreamMeta{4, 3, "x", std::nullopt}, RslvqConfig{2}, rng);
  ASSERT_EQ(m.size(), 6u);
  std::vector<int> per_class(3, 0);
  for (const auto& p : m.prototypes()) {
    EXPECT_EQ(p.theta.size(), 4u);
    ++per_class[static_cast<std::size_t>(p.label)];
    for (double v : p.grad_sq_mean) EXPECT_EQ(v, 0.0);
    for (double v : p.delta_sq_mean) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(per_class, (std::vector<int>{2, 2, 2}));
}

TEST(RslvqInit, SeedDeterminesPrototypes) {
  SeededRng a(7), b(7);
  RslvqModel m1(StreamMeta{3, 2, "x", std::nullopt}, RslvqConfig{}, a);
  RslvqModel m2(StreamMeta{3, 2, "x", std::nullopt}, RslvqConfig{}, b);
  for (std::size_t j = 0; j < m1.size(); ++j) EXPECT_EQ(m1.prototypes()[j].theta, m2.prototypes()[j].theta);
}

TEST(RslvqInit, SpreadIsSqrtSigma) {
  SeededRng rng(2);
  RslvqConfig cfg;
  cfg.sigma = 4.0;
  cfg.prototypes_per_class = 500;
  RslvqModel m(StreamMeta{10, 2, "x", std::nullopt}, cfg, rng);
  double sq = 0.0;
  std::size_t n = 0;
  for (const auto& p : m.prototypes()) {
    for (double v : p.theta) {
      sq += v * v;
      ++n;
    }
  }
  EXPECT_NEAR(sq / static_cast<double>(n), 4.0, 0.15);
}

TEST(RslvqInit, RejectsBadPrototypes) {
  EXPECT_THROW(RslvqModel(meta1d(), RslvqConfig{}, std::vector<Prototype>{}), std::invalid_argument);
  EXPECT_THROW(RslvqModel(meta1d(), RslvqConfig{}, std::vector<Prototype>{Prototype({0.0, 1.0}, 0)}),
               DimensionMismatch);
  EXPECT_THROW(RslvqModel(meta1d(), RslvqConfig{}, std::vector<Prototype>{Prototype({0.0}, 2)}),
               std::invalid_argument);
}

TEST(Posterior, Examples) {
  RslvqModel single(meta1d(), RslvqConfig{}, std::vector<Prototype>{Prototype({3.0}, 0)});
  EXPECT_EQ(single.posterior(std::vector<double>{-1.0}), (std::vector<double>{1.0}));

  const auto eq = two_points(-1.0, 1.0).posterior(std::vector<double>{0.0});
  EXPECT_DOUBLE_EQ(eq[0], 0.5);
  EXPECT_DOUBLE_EQ(eq[1], 0.5);

  const auto p = two_points(1.0, -2.0).posterior(std::vector<double>{0.0});
  EXPECT_NEAR(p[0], 0.81757, 1e-5);
  EXPECT_NEAR(p[1], 0.18243, 1e-5);
}

TEST(Posterior, NormalisedAndStable) {
  SeededRng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 1 + rng.index(10);
    RslvqConfig cfg;
    cfg.prototypes_per_class = 1 + rng.index(10);
    RslvqModel m(StreamMeta{d, 2, "x", std::nullopt}, cfg, rng);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.normal(0.0, 3.0);
    const auto post = m.posterior(x);
    ASSERT_NEAR(std::accumulate(post.begin(), post.end(), 0.0), 1.0, 1e-12);
  }
  // Far away input: no overflow or NaN.
  const auto far = two_points(0.0, 1.0).posterior(std::vector<double>{1000.0});
  EXPECT_TRUE(std::isfinite(far[0]));
  EXPECT_TRUE(std::isfinite(far[1]));
  EXPECT_NEAR(far[0] + far[1], 1.0, 1e-12);
}

TEST(Posterior, DimensionMismatch) {
  EXPECT_THROW(two_points(0, 1).posterior(std::vector<double>{1.0, 2.0}), DimensionMismatch);
}

TEST(LossRatio, Examples) {
  RslvqModel same(meta1d(), RslvqConfig{}, std::vector<Prototype>{Prototype({1.0}, 0), Prototype({2.0}, 0)});
  EXPECT_EQ(same.loss_ratio(std::vector<double>{0.0}, 0), 0.0);
  EXPECT_NEAR(two_points(1.0, -2.0).loss_ratio(std::vector<double>{0.0}, 0), 0.18243, 1e-5);
  EXPECT_NEAR(two_points(0.0, 10.0).loss_ratio(std::vector<double>{10.0}, 0), 1.0, 1e-8);
}

TEST(Gradient, Examples) {
  const auto g = two_points(1.0, -2.0).gradient(std::vector<double>{0.0}, 0);
  EXPECT_NEAR(g[0][0], 0.14915, 1e-5);
  EXPECT_NEAR(g[1][0], 0.298293, 1e-6);

  RslvqModel same(meta1d(), RslvqConfig{}, std::vector<Prototype>{Prototype({1.0}, 0), Prototype({2.0}, 0)});
  for (const auto& row : same.gradient(std::vector<double>{0.0}, 0)) EXPECT_EQ(row[0], 0.0);

  const auto on_top = two_points(3.0, -2.0).gradient(std::vector<double>{3.0}, 0);
  EXPECT_EQ(on_top[0][0], 0.0);
}

TEST(RmspropStep, ZeroGradientDecaysState) {
  Prototype p({1.0, 2.0}, 0);
  p.grad_sq_mean = {0.5, 0.2};
  p.delta_sq_mean = {0.1, 0.3};
  rmsprop_step(p, std::vector<double>{0.0, 0.0}, RslvqConfig{});
  EXPECT_EQ(p.theta, (std::vector<double>{1.0, 2.0}));
  EXPECT_DOUBLE_EQ(p.grad_sq_mean[0], 0.45);
  EXPECT_DOUBLE_EQ(p.delta_sq_mean[1], 0.27);
}

TEST(RmspropStep, FreshPrototypeExample) {
  Prototype p({0.0}, 0);
  rmsprop_step(p, std::vector<double>{0.5}, RslvqConfig{});
  EXPECT_DOUBLE_EQ(p.grad_sq_mean[0], 0.025);
  const double step = std::sqrt(1e-8) / std::sqrt(0.025 + 1e-8) * 0.5;
  EXPECT_NEAR(step, 3.1623e-4, 1e-7);
  EXPECT_DOUBLE_EQ(p.theta[0], -step);
  EXPECT_DOUBLE_EQ(p.delta_sq_mean[0], 0.1 * step * step);
}

TEST(RmspropStep, StepGrowsUnderRepeatedGradient) {
  Prototype p({0.0}, 0);
  double last = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double before = p.theta[0];
    rmsprop_step(p, std::vector<double>{0.5}, RslvqConfig{});
    const double step = before - p.theta[0];
    ASSERT_GT(step, last) << "step " << i;
    ASSERT_GE(p.grad_sq_mean[0], 0.0);
    ASSERT_GE(p.delta_sq_mean[0], 0.0);
    last = step;
  }
}

TEST(LearnOne, AttractionAndRepulsion) {
  SeededRng rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = 1 + rng.index(4);
    RslvqModel m(StreamMeta{d, 3, "x", std::nullopt}, RslvqConfig{1 + rng.index(2)}, rng);
    LabeledSample s{std::vector<double>(d), static_cast<Label>(rng.index(3))};
    for (auto& v : s.x) v = rng.normal();
    RslvqModel before = m;
    m.learn_one(s);
    for (std::size_t j = 0; j < m.size(); ++j) {
      const auto& old = before.prototypes()[j].theta;
      const auto& now = m.prototypes()[j].theta;
      // displacement = c * (x - theta_old) with c >= 0 for the same class, c <= 0 otherwise
      double dot = 0.0, norm_dir = 0.0, norm_move = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double dir = s.x[i] - old[i];
        const double move = now[i] - old[i];
        dot += dir * move;
        norm_dir += dir * dir;
        norm_move += move * move;
      }
      if (norm_move == 0.0) continue;
      const double cosine = dot / std::sqrt(norm_dir * norm_move);
      if (m.prototypes()[j].label == s.y) {
        ASSERT_GT(cosine, 0.0);
      } else {
        ASSERT_LT(cosine, 0.0);
      }
    }
  }
}

TEST(LearnOne, RejectsBadSamples) {
  auto m = two_points(0, 1);
  EXPECT_THROW(m.learn_one(LabeledSample{{1.0, 2.0}, 0}), DimensionMismatch);
  EXPECT_THROW(m.learn_one(LabeledSample{{1.0}, 5}), std::invalid_argument);
}

TEST(LearnOne, SeparatedGaussiansAreLearned) {
  SeededRng rng(5);
  RslvqModel m(meta1d(), RslvqConfig{}, rng);
  for (int i = 0; i < 500; ++i) {
    const Label y = i % 2;
    m.learn_one(LabeledSample{{rng.normal(y == 0 ? -5.0 : 5.0, 0.5)}, y});
  }
  const double neg = m.prototypes()[0].theta[0];
  const double pos = m.prototypes()[1].theta[0];
  EXPECT_LT(neg, pos);
  EXPECT_EQ(m.predict(std::vector<double>{-5.0}), 0);
  EXPECT_EQ(m.predict(std::vector<double>{5.0}), 1);
}

// Target behaviour: both prototypes end within 1.0 of their class means
// after 500 samples. With epsilon = 1e-8 the first steps are ~1e-4 long, and
// the prototypes are still near the origin here. Kept as a target.
TEST(LearnOne, SeparatedGaussiansReachClassMeans) {
  SeededRng rng(5);
  RslvqModel m(meta1d(), RslvqConfig{}, rng);
  for (int i = 0; i < 500; ++i) {
    const Label y = i % 2;
    m.learn_one(LabeledSample{{rng.normal(y == 0 ? -5.0 : 5.0, 0.5)}, y});
  }
  EXPECT_NEAR(m.prototypes()[0].theta[0], -5.0, 1.0);
  EXPECT_NEAR(m.prototypes()[1].theta[0], 5.0, 1.0);
}

TEST(Predict, Examples) {
  RslvqModel m(StreamMeta{2, 2, "x", std::nullopt}, RslvqConfig{},
               std::vector<Prototype>{Prototype({0.0, 0.0}, 0), Prototype({10.0, 10.0}, 1)});
  EXPECT_EQ(m.predict(std::vector<double>{1.0, 1.0}), 0);
  EXPECT_EQ(m.predict(std::vector<double>{10.0, 10.0}), 1);
  EXPECT_EQ(m.predict(std::vector<double>{0.0, 0.0}), 0);
}

TEST(Predict, BruteForceAndSigmaInvariance) {
  SeededRng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.index(6);
    RslvqConfig cfg;
    cfg.prototypes_per_class = 1 + rng.index(3);
    RslvqModel m(StreamMeta{d, 3, "x", std::nullopt}, cfg, rng);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.normal();
    std::size_t best = 0;
    for (std::size_t j = 1; j < m.size(); ++j) {
      if (squared_distance(x, m.prototypes()[j].theta) < squared_distance(x, m.prototypes()[best].theta)) best = j;
    }
    ASSERT_EQ(m.predict(x), m.prototypes()[best].label);
    RslvqConfig wide = cfg;
    wide.sigma = 25.0;
    RslvqModel w(m.meta(), wide, std::vector<Prototype>(m.prototypes().begin(), m.prototypes().end()));
    ASSERT_EQ(w.predict(x), m.predict(x));
  }
}

TEST(Snapshot, Format) {
  RslvqModel m(StreamMeta{2, 2, "x", std::nullopt}, RslvqConfig{},
               std::vector<Prototype>{Prototype({0.5, -1.0}, 0), Prototype({3.0, 0.1}, 1)});
  std::ostringstream os;
  m.write_snapshot(os);
  EXPECT_EQ(os.str(), "0,0.5,-1\n1,3,0.1\n");
  EXPECT_EQ(m.footprint(), 4u);
}
