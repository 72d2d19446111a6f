#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "grg/error.hpp"
#include "grg/stats.hpp"
#include "grg/weights.hpp"
#include "oracles.hpp"

namespace {

using namespace grg;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected grg::Error";
  return ErrorKind::kIo;
}

TEST(Weights, ConstantModelGivesIdenticalWeights) {
  const auto w = sample_weights(ConstantWeights{2.0}, 10, 7);
  ASSERT_EQ(w.size(), 10u);
  for (double x : w.values()) EXPECT_DOUBLE_EQ(x, 2.5);
  EXPECT_DOUBLE_EQ(w.sum(), 25.0);
  EXPECT_DOUBLE_EQ(w.sum_sq(), 62.5);
}

TEST(Weights, ConstantWeightRejectsLambdaAtLeastN) {
  EXPECT_EQ(kind_of([] { constant_weight(10.0, 10); }), ErrorKind::kConstantWeightDomain);
  EXPECT_EQ(kind_of([] { sample_weights(ConstantWeights{12.0}, 10, 1); }),
            ErrorKind::kConstantWeightDomain);
  EXPECT_DOUBLE_EQ(constant_weight(2.0, 10), 2.5);
}

TEST(Weights, InvalidParametersAreRejected) {
  EXPECT_EQ(kind_of([] { validate(WeightModel{ExponentialWeights{0.0}}); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { validate(WeightModel{ParetoWeights{-1.0, 1.0}}); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { validate(WeightModel{ParetoWeights{1.5, 0.0}}); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { validate(WeightModel{LogNormalWeights{0.0, 0.0}}); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { validate(WeightModel{GammaWeights{-1.0, 1.0}}); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { validate(WeightModel{ParetoLogWeights{0.5, 1.0}}); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { validate(WeightModel{ConstantWeights{0.0}}); }), ErrorKind::kParameterDomain);
}

TEST(Weights, ParetoSamplesRespectSupportAndSeed) {
  const WeightModel m = ParetoWeights{1.5, 1.0};
  const auto a = sample_weights(m, 10'000, 99);
  const auto b = sample_weights(m, 10'000, 99);
  ASSERT_EQ(a.size(), 10'000u);
  EXPECT_GE(*std::min_element(a.values().begin(), a.values().end()), 1.0);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  const auto c = sample_weights(m, 10'000, 100);
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST(Weights, ExponentialSampleMean) {
  const auto w = sample_weights(ExponentialWeights{1.0}, 100'000, 3);
  EXPECT_NEAR(w.sum() / 1e5, 1.0, 0.02);
}

TEST(Weights, SamplersMatchTheirDistributionFunctions) {
  const std::vector<WeightModel> models = {ExponentialWeights{2.0}, LogNormalWeights{0.3, 0.8},
                                           GammaWeights{0.7, 2.0},  GammaWeights{3.5, 0.5},
                                           ParetoWeights{1.5, 2.0}, ParetoLogWeights{1.5, 1.0},
                                           ParetoLogWeights{2.5, 3.0}};
  for (const auto& m : models) {
    const auto w = sample_weights(m, 50'000, 11);
    const auto ks = ks_one_sample(w.values(), [&](double x) { return 1.0 - survival(m, x); });
    EXPECT_GT(ks.p_value, 0.01) << model_name(m) << " D=" << ks.d_stat;
  }
}

TEST(Weights, SumsAreAccurateForHeavyTails) {
  const auto w = sample_weights(ParetoWeights{1.1, 1.0}, 1'000'000, 5);
  std::vector<long double> v(w.values().begin(), w.values().end());
  std::sort(v.begin(), v.end());
  long double s = 0.0L, s2 = 0.0L;
  for (long double x : v) {
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(w.sum() / static_cast<double>(s), 1.0, 1e-12);
  EXPECT_NEAR(w.sum_sq() / static_cast<double>(s2), 1.0, 1e-12);
  EXPECT_GE(w.sum_sq(), w.sum() * w.sum() / 1e6);
}

TEST(Weights, WeightVectorRejectsNonPositive) {
  EXPECT_EQ(kind_of([] { WeightVector({1.0, 0.0}); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { sample_weights(ExponentialWeights{1.0}, 0, 1); }), ErrorKind::kParameterDomain);
}

TEST(Weights, AnalyticMoments) {
  const auto e = analytic_moments(ExponentialWeights{2.0});
  EXPECT_DOUBLE_EQ(e.mean, 0.5);
  EXPECT_DOUBLE_EQ(e.variance, 0.25);
  const auto g = analytic_moments(GammaWeights{3.0, 2.0});
  EXPECT_DOUBLE_EQ(g.mean, 6.0);
  EXPECT_DOUBLE_EQ(g.variance, 12.0);
  const auto ln = analytic_moments(LogNormalWeights{0.0, 1.0});
  EXPECT_NEAR(ln.mean, std::exp(0.5), 1e-14);
  EXPECT_NEAR(ln.variance, (std::exp(1.0) - 1.0) * std::exp(1.0), 1e-13);
  const auto p = analytic_moments(ParetoWeights{1.5, 1.0});
  EXPECT_DOUBLE_EQ(p.mean, 3.0);
  EXPECT_FALSE(p.finite_variance());
  const auto p3 = analytic_moments(ParetoWeights{3.0, 2.0});
  EXPECT_DOUBLE_EQ(p3.mean, 3.0);
  EXPECT_DOUBLE_EQ(p3.second, 12.0);
  const auto c = analytic_moments(ConstantWeights{2.0}, 10);
  EXPECT_DOUBLE_EQ(c.mean, 2.5);
  EXPECT_DOUBLE_EQ(c.variance, 0.0);
}

TEST(Weights, ParetoLogMomentsAgreeWithTailIntegral) {
  for (double alpha : {1.2, 1.5, 2.5, 3.5}) {
    const WeightModel m = ParetoLogWeights{alpha, 2.0};
    EXPECT_NEAR(analytic_moments(m).mean / oracle::paretolog_tail_first(2.0, alpha, 2.0), 1.0, 1e-12)
        << alpha;
  }
  // Second moment for alpha > 2 by Simpson in log space.
  const double alpha = 3.5, xm = 2.0;
  const double second = oracle::simpson(
      [&](double v) {
        const double x = xm * std::exp(v);
        return 2.0 * x * x * oracle::paretolog_survival(x, alpha, xm);
      },
      0.0, 40.0, 40'000) + xm * xm;
  EXPECT_NEAR(analytic_moments(ParetoLogWeights{alpha, xm}).second / second, 1.0, 1e-9);
}

TEST(Weights, TruncatedMomentsParetoExamples) {
  const WeightModel m = ParetoWeights{1.5, 1.0};
  EXPECT_NEAR(truncated_second_moment(m, 100.0), 27.0, 1e-9);
  EXPECT_NEAR(truncated_first_moment_tail(m, 100.0), 0.3, 1e-9);
  EXPECT_EQ(truncated_second_moment(m, 1.0), 0.0);
  EXPECT_EQ(truncated_second_moment(m, 0.5), 0.0);
  EXPECT_NEAR(truncated_first_moment_tail(m, 1.0), 3.0, 1e-12);
}

TEST(Weights, TruncatedMomentsExponentialClosedForms) {
  const WeightModel m = ExponentialWeights{1.0};
  EXPECT_NEAR(truncated_second_moment(m, 50.0), 2.0, 1e-8);
  for (double x : {0.1, 1.0, 3.0, 10.0, 30.0}) {
    const double second = 2.0 - std::exp(-x) * (x * x + 2.0 * x + 2.0);
    const double tail = (x + 1.0) * std::exp(-x);
    EXPECT_NEAR(truncated_second_moment(m, x), second, 1e-10 + 1e-12 * second) << x;
    EXPECT_NEAR(truncated_first_moment_tail(m, x), tail, 1e-10 * tail + 1e-300) << x;
  }
}

TEST(Weights, TruncatedMomentsParetoLogClosedForms) {
  for (double alpha : {1.1, 1.5, 1.9}) {
    const WeightModel m = ParetoLogWeights{alpha, 1.5};
    for (double x : {1.6, 10.0, 1e3, 1e6, 1e12}) {
      const double s = oracle::paretolog_truncated_second(x, alpha, 1.5);
      const double t = oracle::paretolog_tail_first(x, alpha, 1.5);
      EXPECT_NEAR(truncated_second_moment(m, x) / s, 1.0, 1e-8) << alpha << " " << x;
      EXPECT_NEAR(truncated_first_moment_tail(m, x) / t, 1.0, 1e-8) << alpha << " " << x;
    }
  }
}

TEST(Weights, TruncatedMomentsLogNormalAndGammaBySimpson) {
  const WeightModel ln = LogNormalWeights{0.2, 0.7};
  const WeightModel g = GammaWeights{2.5, 1.5};
  for (double x : {0.5, 2.0, 8.0}) {
    const double ln2 = oracle::simpson([&](double w) { return w * w * density(ln, w); }, 1e-12, x, 20'000);
    const double g2 = oracle::simpson([&](double w) { return w * w * density(g, w); }, 0.0, x, 20'000);
    EXPECT_NEAR(truncated_second_moment(ln, x), ln2, 1e-9);
    EXPECT_NEAR(truncated_second_moment(g, x), g2, 1e-9);
    const double g1 = oracle::simpson([&](double w) { return w * density(g, w); }, x, 200.0, 200'000);
    EXPECT_NEAR(truncated_first_moment_tail(g, x), g1, 1e-9);
  }
}

TEST(Weights, TruncatedMomentsAreMonotone) {
  const std::vector<WeightModel> models = {ExponentialWeights{1.0}, LogNormalWeights{0.0, 1.0},
                                           GammaWeights{0.5, 1.0}, ParetoWeights{1.3, 1.0},
                                           ParetoLogWeights{1.7, 1.0}};
  for (const auto& m : models) {
    double prev_second = -1.0;
    double prev_tail = std::numeric_limits<double>::infinity();
    for (double x = 0.05; x < 1e8; x *= 1.7) {
      const double s = truncated_second_moment(m, x);
      const double t = truncated_first_moment_tail(m, x);
      EXPECT_GE(s, prev_second) << model_name(m) << " x=" << x;
      EXPECT_LE(t, prev_tail) << model_name(m) << " x=" << x;
      EXPECT_GE(s, 0.0);
      EXPECT_GE(t, 0.0);
      prev_second = s;
      prev_tail = t;
    }
  }
}

TEST(Weights, TruncatedSecondMomentConvergesForFiniteVariance) {
  const WeightModel m = ParetoWeights{3.0, 1.0};
  const double full = analytic_moments(m).second;
  for (double x : {10.0, 100.0, 1e4}) {
    const double tail = 3.0 * x * x * std::pow(x, -3.0);  // E W^2 I(W > x)
    EXPECT_NEAR(truncated_second_moment(m, x) + tail, full, 1e-9);
  }
}

TEST(Weights, ConstantModelHasNoTruncatedMoments) {
  EXPECT_EQ(kind_of([] { truncated_second_moment(ConstantWeights{1.0}, 2.0); }),
            ErrorKind::kUnsupportedModel);
}

TEST(Weights, TailParams) {
  const auto p = tail_params(ParetoWeights{1.5, 2.0});
  ASSERT_TRUE(p.has_value());
  EXPECT_DOUBLE_EQ(p->alpha, 1.5);
  EXPECT_NEAR(p->c, std::pow(2.0, 1.5), 1e-12);
  EXPECT_DOUBLE_EQ(p->h(100.0), 1.0);
  const auto q = tail_params(ParetoLogWeights{1.5, 2.0});
  ASSERT_TRUE(q.has_value());
  EXPECT_NEAR(q->h(2.0 * std::exp(3.0)), 4.0, 1e-12);
  EXPECT_FALSE(tail_params(ExponentialWeights{1.0}).has_value());
}

TEST(Weights, Lemma1RatiosPareto) {
  const std::vector<double> grid = {100.0, 1e4, 1e6};
  const auto rows = lemma1_ratio_check(ParetoWeights{1.5, 1.0}, grid);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].ratio_second, 0.9, 1e-9);
  EXPECT_NEAR(rows[0].ratio_tail_karamata, 1.0, 1e-9);
  EXPECT_NEAR(rows[0].ratio_tail_printed, 3.0, 1e-9);
  EXPECT_NEAR(rows[1].ratio_second, 0.99, 1e-9);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.ratio_second, 1.0, 0.1);
    EXPECT_NEAR(r.ratio_tail_karamata, 1.0, 0.01);
  }
  EXPECT_NEAR(rows[2].ratio_second, 1.0, 0.01);
}

TEST(Weights, Lemma1RatiosParetoLogApproachOne) {
  for (double alpha : {1.2, 1.5, 1.8}) {
    const std::vector<double> grid = {1e6, 1e12, 1e50};
    const auto rows = lemma1_ratio_check(ParetoLogWeights{alpha, 1.0}, grid);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      const double gap = std::abs(r.ratio_second - 1.0) + std::abs(r.ratio_tail_karamata - 1.0);
      EXPECT_LT(gap, prev) << alpha << " x=" << r.x;
      prev = gap;
    }
    EXPECT_NEAR(rows.back().ratio_second, 1.0, 0.05);
    EXPECT_NEAR(rows.back().ratio_tail_karamata, 1.0, 0.05);
  }
}

TEST(Weights, Lemma1RejectsModelsWithoutRegularTail) {
  const std::vector<double> grid = {10.0};
  EXPECT_EQ(kind_of([&] { lemma1_ratio_check(ExponentialWeights{1.0}, grid); }),
            ErrorKind::kUnsupportedModel);
  EXPECT_EQ(kind_of([&] { lemma1_ratio_check(ParetoWeights{2.5, 1.0}, grid); }),
            ErrorKind::kHypothesisViolation);
}

double norming_gap(const WeightModel& m, std::size_t n, double a) {
  return a * a - static_cast<double>(n) * truncated_second_moment(m, a);
}

TEST(Weights, NormingParetoExample) {
  const WeightModel m = ParetoWeights{1.5, 1.0};
  const double a = compute_norming(m, 1000);
  EXPECT_GT(a, 197.0);
  EXPECT_LT(a, 199.0);
  EXPECT_LT(norming_gap(m, 1000, 197.0), 0.0);
  EXPECT_GT(norming_gap(m, 1000, 199.0), 0.0);
}

TEST(Weights, NormingSolvesItsEquation) {
  const std::vector<WeightModel> models = {ParetoWeights{1.2, 1.0}, ParetoWeights{1.5, 1.0},
                                           ParetoWeights{1.8, 1.0}, ParetoLogWeights{1.2, 1.0},
                                           ParetoLogWeights{1.5, 1.0}, ParetoLogWeights{1.8, 1.0}};
  for (const auto& m : models) {
    for (std::size_t n : {1'000u, 100'000u, 1'000'000u}) {
      const double a = compute_norming(m, n);
      const double rel = std::abs(a * a / (static_cast<double>(n) * truncated_second_moment(m, a)) - 1.0);
      EXPECT_LE(rel, 1e-8) << model_name(m) << " n=" << n;
      // Largest root: the equation has no sign change above a.
      EXPECT_GT(norming_gap(m, n, a * 1.01), 0.0);
      EXPECT_GT(norming_gap(m, n, a * 10.0), 0.0);
    }
  }
}

TEST(Weights, NormingScalesRegularly) {
  for (double alpha : {1.2, 1.5, 1.8}) {
    const WeightModel m = ParetoWeights{alpha, 1.0};
    const double r = compute_norming(m, 2'000'000) / compute_norming(m, 1'000'000);
    EXPECT_NEAR(r / std::pow(2.0, 1.0 / alpha), 1.0, 0.02) << alpha;
  }
  const double a1 = compute_norming(ParetoWeights{1.5, 1.0}, 1000);
  const double a2 = compute_norming(ParetoWeights{1.5, 1.0}, 2000);
  EXPECT_GT(a2, a1);
}

TEST(Weights, NormingErrors) {
  EXPECT_EQ(kind_of([] { compute_norming(ParetoWeights{1.5, 1.0}, 0); }), ErrorKind::kParameterDomain);
  EXPECT_EQ(kind_of([] { compute_norming(ParetoWeights{1.5, 1.0}, 2); }), ErrorKind::kBracketing);
}

}  // namespace
