#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "modnet/environment.hpp"
#include "modnet/errors.hpp"
#include "modnet/estimator.hpp"
#include "modnet/rng.hpp"

using namespace modnet;

namespace {

// frozen from an independent 30-digit evaluation of sqrt(ln(40)/100)
constexpr double kRadius50 = 0.192064558263984152;

}  // namespace

TEST(RecordOutcome, CountsSuccessesAndTrials) {
  FitEstimate e;
  e = record_outcome(e, Outcome::success);
  EXPECT_EQ(e.successes, 1u);
  EXPECT_EQ(e.trials, 1u);
  EXPECT_DOUBLE_EQ(*e.mean(), 1.0);

  const FitEstimate before{8, 10};
  const FitEstimate after = record_outcome(before, Outcome::failure);
  EXPECT_EQ(after, (FitEstimate{8, 11}));
  EXPECT_EQ(before, (FitEstimate{8, 10}));
  EXPECT_DOUBLE_EQ(*after.mean(), 8.0 / 11.0);
}

TEST(RecordOutcome, NoDataHasNoMean) {
  EXPECT_FALSE(FitEstimate{}.mean().has_value());
  EXPECT_FALSE(FitEstimate{}.has_data());
}

TEST(RecordOutcome, DaytimeSpecialistRecovers80Percent) {
  ModelOracle o{ModelId{0}, ServerId{0}, {0.8}, 0, std::nullopt};
  // draw 100 responses and keep searching seeds until exactly 80 succeed, then
  // check the estimator reproduces that ratio
  FitEstimate e;
  for (std::uint64_t seed = 1;; ++seed) {
    Rng rng(seed);
    FitEstimate trial;
    for (int i = 0; i < 100; ++i) trial = record_outcome(trial, sample_response(o, Context{0}, rng));
    if (trial.successes == 80) {
      e = trial;
      break;
    }
  }
  EXPECT_DOUBLE_EQ(*e.mean(), 0.80);
}

TEST(RecordOutcome, OrderIndependent) {
  std::vector<Outcome> outcomes;
  for (int i = 0; i < 37; ++i) outcomes.push_back(i % 3 == 0 ? Outcome::success : Outcome::failure);
  std::mt19937 g(7);
  FitEstimate reference;
  for (auto o : outcomes) reference = record_outcome(reference, o);
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(outcomes.begin(), outcomes.end(), g);
    FitEstimate e;
    for (auto o : outcomes) e = record_outcome(e, o);
    EXPECT_EQ(e, reference);
  }
}

TEST(RecordBatch, RejectsMoreSuccessesThanTrials) {
  EXPECT_THROW(record_batch({}, 5, 4), ParameterError);
  EXPECT_EQ(record_batch({1, 2}, 3, 4), (FitEstimate{4, 6}));
}

TEST(ConfidenceRadius, ClosedFormValue) {
  EXPECT_NEAR(confidence_radius(50, 0.05), kRadius50, 1e-15);
  EXPECT_NEAR(confidence_radius(200, 0.05), kRadius50 / 2.0, 1e-15);
  for (std::uint64_t n : {1u, 3u, 17u, 1000u}) {
    EXPECT_NEAR(confidence_radius(4 * n, 0.1) / confidence_radius(n, 0.1), 0.5, 1e-15);
  }
}

TEST(ConfidenceRadius, Errors) {
  EXPECT_THROW(confidence_radius(0, 0.05), NoDataError);
  EXPECT_THROW(confidence_radius(10, 0.0), ParameterError);
  EXPECT_THROW(confidence_radius(10, 1.0), ParameterError);
  EXPECT_THROW(confidence_radius(10, -0.5), ParameterError);
}

TEST(ConfidenceRadius, Monotone) {
  for (std::uint64_t n = 1; n < 500; ++n) {
    EXPECT_GT(confidence_radius(n, 0.05), confidence_radius(n + 1, 0.05));
  }
  double prev = 0.0;
  for (double d : {0.5, 0.2, 0.1, 0.01, 1e-4, 1e-9}) {
    const double r = confidence_radius(20, d);
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(Bounds, ClampedAtDomainEdges) {
  EXPECT_DOUBLE_EQ(bounds({10, 10}, 0.05).ucb, 1.0);
  EXPECT_DOUBLE_EQ(bounds({0, 50}, 0.05).lcb, 0.0);
  const auto b = bounds({40, 50}, 0.05);
  EXPECT_NEAR(b.lcb, 0.8 - kRadius50, 1e-15);
  EXPECT_NEAR(b.ucb, 0.8 + kRadius50, 1e-15);
  EXPECT_THROW(bounds({}, 0.05), NoDataError);
}

TEST(Bounds, OrderedInsideUnitInterval) {
  std::mt19937_64 g(11);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t n = 1 + g() % 400;
    const std::uint64_t s = g() % (n + 1);
    const double delta = std::uniform_real_distribution<double>(1e-6, 0.999)(g);
    const FitEstimate e{s, n};
    const auto b = bounds(e, delta);
    const double m = std::clamp(*e.mean(), 0.0, 1.0);
    EXPECT_LE(0.0, b.lcb);
    EXPECT_LE(b.lcb, m);
    EXPECT_LE(m, b.ucb);
    EXPECT_LE(b.ucb, 1.0);
  }
}

TEST(ConfidenceParams, UnionBoundSplit) {
  const auto p = ConfidenceParams::from_budget(0.05, 5, 50);
  EXPECT_DOUBLE_EQ(p.epsilon, 0.05);
  EXPECT_DOUBLE_EQ(p.delta, 0.05 / 250.0);
  EXPECT_THROW(ConfidenceParams::from_budget(0.0, 5, 50), ParameterError);
  EXPECT_THROW(ConfidenceParams::from_budget(0.05, 0, 50), ParameterError);
}

TEST(RequiredPilots, ClosedForm) {
  EXPECT_EQ(required_pilots(0.05, 0.1), 738u);
  // halving the gap quadruples the count, up to the ceiling
  const auto a = required_pilots(0.05, 0.2);
  const auto b = required_pilots(0.05, 0.1);
  EXPECT_LE(4 * a - 4, b);
  EXPECT_GE(4 * a, b);
}

TEST(RequiredPilots, AffineInLogInverseEpsilon) {
  const double gap = 1.0;  // keep the ceiling's rounding small relative to the slope
  const double c1 = 2.0 * std::log(2.0 / 0.1) / (gap * gap);
  const double c2 = 2.0 * std::log(2.0 / 0.01) / (gap * gap);
  const double c3 = 2.0 * std::log(2.0 / 0.001) / (gap * gap);
  EXPECT_NEAR(c2 - c1, c3 - c2, 1e-12);
  EXPECT_EQ(required_pilots(0.1, gap), static_cast<std::uint64_t>(std::ceil(c1)));
  EXPECT_EQ(required_pilots(0.01, gap), static_cast<std::uint64_t>(std::ceil(c2)));
  EXPECT_EQ(required_pilots(0.001, gap), static_cast<std::uint64_t>(std::ceil(c3)));
}

TEST(RequiredPilots, Errors) {
  EXPECT_THROW(required_pilots(0.05, 0.0), DivergenceError);
  EXPECT_THROW(required_pilots(0.05, 1.5), ParameterError);
  EXPECT_THROW(required_pilots(0.05, -0.1), ParameterError);
  EXPECT_THROW(required_pilots(0.0, 0.1), ParameterError);
  EXPECT_THROW(required_pilots(1.0, 0.1), ParameterError);
}

TEST(KlDivergence, Values) {
  const std::vector<double> half{0.5, 0.5};
  const std::vector<double> point{1.0, 0.0};
  EXPECT_DOUBLE_EQ(kl_divergence(half, half), 0.0);
  EXPECT_NEAR(kl_divergence(point, half), 0.693147180559945309, 1e-15);
  EXPECT_THROW(kl_divergence(half, point), ParameterError);
}

TEST(KlDivergence, InputChecks) {
  const std::vector<double> a{0.5, 0.5};
  const std::vector<double> b{0.2, 0.3, 0.5};
  const std::vector<double> unnormalized{0.5, 0.6};
  const std::vector<double> negative{1.5, -0.5};
  EXPECT_THROW(kl_divergence(a, b), ParameterError);
  EXPECT_THROW(kl_divergence(unnormalized, a), ParameterError);
  EXPECT_THROW(kl_divergence(a, unnormalized), ParameterError);
  EXPECT_THROW(kl_divergence(negative, a), ParameterError);
}

TEST(KlDivergence, GibbsInequalityOnRandomPairs) {
  std::mt19937_64 g(3);
  std::exponential_distribution<double> ex(1.0);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t k = 2 + g() % 6;
    std::vector<double> p(k), q(k);
    for (auto& v : p) v = ex(g);
    for (auto& v : q) v = ex(g);
    const double sp = std::accumulate(p.begin(), p.end(), 0.0);
    const double sq = std::accumulate(q.begin(), q.end(), 0.0);
    for (auto& v : p) v /= sp;
    for (auto& v : q) v /= sq;
    EXPECT_GE(kl_divergence(p, q), 0.0);
    EXPECT_EQ(kl_divergence(p, p), 0.0);
  }
}
