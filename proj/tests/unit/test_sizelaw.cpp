#include "size_lens/sizelaw.hpp"

#include "size_lens/adclus.hpp"
#include "size_lens/bayesgen.hpp"

#include "expect_error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace size_lens;

namespace {

WeightSolution solution(std::vector<double> weights, std::vector<std::size_t> sizes) {
  WeightSolution s;
  s.weights = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  s.feature_sizes = sizes;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    s.feature_names.push_back("f" + std::to_string(k + 1));
    if (weights[k] > 0) s.nonzero_feature_indices.push_back(static_cast<Eigen::Index>(k));
  }
  s.fr_nonzero = s.nonzero_feature_indices.size();
  s.fr_total = weights.size();
  return s;
}

// Nested features of sizes 2, 3, 4, 6 over six objects. Each one adds pairs
// the smaller ones lack, so the design is full rank.
FeatureMatrix nested_features() {
  Eigen::MatrixXd f(6, 4);
  f << 1, 1, 1, 1,
       1, 1, 1, 1,
       0, 1, 1, 1,
       0, 0, 1, 1,
       0, 0, 0, 1,
       0, 0, 0, 1;
  return FeatureMatrix({"a", "b", "c", "d", "e", "g"}, {"s2", "s3", "s4", "s6"}, f);
}

WeightSolution planted_fit(double exponent) {
  const FeatureMatrix f = nested_features();
  Eigen::VectorXd w(4);
  const auto sizes = f.feature_sizes();
  for (int k = 0; k < 4; ++k) w(k) = std::pow(static_cast<double>(sizes[k]), -exponent);
  return fit(f, predict(f, w));
}

}  // namespace

TEST(ExtractPoints, KeepsOnlyPositiveWeights) {
  const SizeLawPoints pts = extract_points(solution({0.5, 0, 0.2}, {2, 5, 4}));
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].feature_name, "f1");
  EXPECT_EQ(pts[1].feature_name, "f3");
  EXPECT_DOUBLE_EQ(pts[0].log_weight, std::log(0.5));
  EXPECT_DOUBLE_EQ(pts[1].log_size, std::log(4.0));
}

TEST(ExtractPoints, ZScoresArePopulationStandardized) {
  const SizeLawPoints pts =
      extract_points(solution({std::exp(1.0), std::exp(2.0), std::exp(3.0)}, {2, 3, 4}));
  EXPECT_NEAR(pts[0].z_log_weight, -1.2247, 1e-4);
  EXPECT_NEAR(pts[1].z_log_weight, 0.0, 1e-12);
  EXPECT_NEAR(pts[2].z_log_weight, 1.2247, 1e-4);
}

TEST(ExtractPoints, SinglePointHasZeroZ) {
  const SizeLawPoints pts = extract_points(solution({0, 0.4}, {3, 2}));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].z_log_weight, 0.0);
  EXPECT_EQ(pts[0].z_log_size, 0.0);
  EXPECT_SL_ERROR(analyze(solution({0, 0.4}, {3, 2})), ErrorCode::TooFewPoints);
}

TEST(ExtractPoints, Errors) {
  EXPECT_SL_ERROR(extract_points(solution({0, 0}, {1, 2})), ErrorCode::NoActiveFeatures);
  EXPECT_SL_ERROR(extract_points(solution({0.3, 0.1}, {0, 2})), ErrorCode::ZeroSizeActiveFeature);
}

TEST(ZScores, MeanZeroUnitPopulationSd) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> v(25);
  for (double& x : v) x = g(rng);
  const auto z = z_scores(v);
  double mean = 0, ss = 0;
  for (double x : z) mean += x;
  mean /= 25;
  for (double x : z) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(ss / 25), 1.0, 1e-12);
}

TEST(Pearson, PerfectNegative) {
  EXPECT_DOUBLE_EQ(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{-1, -2, -3}), -1.0);
}

TEST(Pearson, Errors) {
  EXPECT_SL_ERROR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}), ErrorCode::ZeroVariance);
  EXPECT_SL_ERROR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5}), ErrorCode::LengthMismatch);
}

TEST(Pearson, FourPointsAgainstDirectFormula) {
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 0, 3, 2};
  EXPECT_NEAR(pearson(x, y), oracle::pearson(x, y), 1e-15);
  EXPECT_NEAR(pearson(x, y), 0.6, 1e-15);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> x(12), y(12), y2(12);
  for (int i = 0; i < 12; ++i) {
    x[i] = u(rng);
    y[i] = u(rng);
    y2[i] = 7.0 + 3.5 * y[i];
  }
  EXPECT_NEAR(pearson(x, y), pearson(x, y2), 1e-13);
}

TEST(Spearman, ReversedOrder) {
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{9, 5, 2, -1}), -1.0);
}

TEST(Spearman, TiesGetAverageRanks) {
  const std::vector<double> x = {1, 1, 2}, y = {3, 3, 1};
  EXPECT_EQ(average_ranks(x), (std::vector<double>{1.5, 1.5, 3}));
  EXPECT_EQ(average_ranks(y), (std::vector<double>{2.5, 2.5, 1}));
  EXPECT_DOUBLE_EQ(spearman(x, y), -1.0);
}

TEST(Spearman, MatchesRankingOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(10), y(10);
    for (int i = 0; i < 10; ++i) {
      x[i] = small(rng);
      y[i] = small(rng) * 0.5;
    }
    EXPECT_EQ(average_ranks(x), oracle::ranks_by_counting(x));
    bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (x_const || y_const) continue;
    EXPECT_NEAR(spearman(x, y), oracle::spearman(x, y), 1e-14);
  }
}

TEST(Spearman, LogInvariantForPositiveInputs) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(9), y(9), lx(9), ly(9);
    for (int i = 0; i < 9; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
      lx[i] = std::log(x[i]);
      ly[i] = std::log(y[i]);
    }
    EXPECT_EQ(spearman(x, y), spearman(lx, ly));
  }
}

TEST(FitLine, ExactLine) {
  const std::vector<double> x = {0, 1, 2, 5}, y = {5, 4, 3, 0};
  const LineFit l = fit_line(x, y);
  EXPECT_NEAR(l.slope, -1.0, 1e-15);
  EXPECT_NEAR(l.intercept, 5.0, 1e-14);
}

TEST(FitLine, AgainstNormalEquations) {
  const std::vector<double> x = {0.5, 1.7, 2.2, 4.1}, y = {3.0, 1.9, 2.4, 0.2};
  const LineFit l = fit_line(x, y);
  const oracle::Line o = oracle::normal_equations_line(x, y);
  EXPECT_NEAR(l.slope, o.slope, 1e-13);
  EXPECT_NEAR(l.intercept, o.intercept, 1e-13);
}

TEST(FitLine, StandardizedSlopeEqualsPearson) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(15), y(15);
    for (int i = 0; i < 15; ++i) {
      x[i] = g(rng);
      y[i] = 0.3 * x[i] + g(rng);
    }
    const auto zx = z_scores(x), zy = z_scores(y);
    EXPECT_NEAR(fit_line(zx, zy).slope, pearson(x, y), 1e-10);
  }
}

TEST(FitLine, ConstantPredictor) {
  EXPECT_SL_ERROR(fit_line(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), ErrorCode::ZeroVariance);
}

TEST(TTest, ClosedForm) {
  const TTestResult r = one_sample_ttest_negative(std::vector<double>{-0.5, -0.7, -0.6});
  EXPECT_NEAR(r.mean, -0.6, 1e-15);
  EXPECT_NEAR(r.sample_sd, 0.1, 1e-15);
  EXPECT_EQ(r.degrees_of_freedom, 2u);
  EXPECT_NEAR(r.t_statistic, -10.392304845413264, 1e-9);
  // scipy.stats.t.cdf(-10.392304845413264, 2)
  EXPECT_NEAR(r.p_value_one_sided, 0.004566305693137726, 1e-12);
}

TEST(TTest, PublishedPearsonColumn) {
  const std::vector<double> r = {0.01,  -0.15, -0.94, -0.68, -0.42, -1.00, -0.24, -0.53, -0.52,
                                 -0.99, -0.95, -0.20, -0.46, -0.97, -0.87, -0.85, -0.96};
  const TTestResult t = one_sample_ttest_negative(r);
  EXPECT_EQ(t.degrees_of_freedom, 16u);
  EXPECT_NEAR(t.t_statistic, -7.65, 0.6);
  EXPECT_NEAR(t.t_statistic, -7.604988889688135, 1e-9);
  EXPECT_LT(t.p_value_one_sided, 1e-4);
  // scipy.stats.ttest_1samp(r, 0, alternative="less").pvalue
  EXPECT_NEAR(t.p_value_one_sided, 5.314511030504382e-07, 1e-15);
}

TEST(TTest, Errors) {
  EXPECT_SL_ERROR(one_sample_ttest_negative(std::vector<double>{1, 1, 1}), ErrorCode::ZeroVariance);
  EXPECT_SL_ERROR(one_sample_ttest_negative(std::vector<double>{1}), ErrorCode::TooFewPoints);
}

TEST(TTest, ScaleInvariant) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(-0.4, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(10), w(10);
    for (int i = 0; i < 10; ++i) {
      v[i] = g(rng);
      w[i] = 4.25 * v[i];
    }
    EXPECT_NEAR(one_sample_ttest_negative(v).t_statistic, one_sample_ttest_negative(w).t_statistic, 1e-10);
  }
}

TEST(CorrelationPValue, TwoSidedFromT) {
  // 2 * scipy.stats.t.sf(0.6 * sqrt(2 / 0.64), 2)
  EXPECT_NEAR(correlation_p_value(0.6, 4), 0.4, 1e-12);
  EXPECT_NEAR(correlation_p_value(-0.6, 4), 0.4, 1e-12);
  EXPECT_EQ(correlation_p_value(-1.0, 5), 0.0);
}

TEST(Analyze, InverseSizeLaw) {
  const SizeLawStats s = analyze(planted_fit(1.0));
  EXPECT_EQ(s.n_points, 4u);
  EXPECT_NEAR(s.pearson, -1.0, 1e-6);
  EXPECT_NEAR(s.slope, -1.0, 1e-6);
  EXPECT_NEAR(s.spearman, -1.0, 1e-12);
}

TEST(Analyze, InverseSquaredLaw) {
  const SizeLawStats s = analyze(planted_fit(2.0));
  EXPECT_NEAR(s.slope, -2.0, 1e-6);
  EXPECT_NEAR(s.pearson, -1.0, 1e-6);
}

TEST(Analyze, UniformWeightsAreZeroVariance) {
  EXPECT_SL_ERROR(analyze(planted_fit(0.0)), ErrorCode::ZeroVariance);
}

TEST(Analyze, EqualSizesAreZeroVariance) {
  EXPECT_SL_ERROR(analyze(solution({0.1, 0.2, 0.3}, {2, 2, 2})), ErrorCode::ZeroVariance);
}

TEST(Analyze, PlantedPipelineGivesPearsonMinusOne) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PlantedDataset d = plant_dataset(12, 8, WeightLaw::InverseSize, 0.0, seed);
    const SizeLawStats s = analyze(fit(d.features, d.similarity));
    EXPECT_NEAR(s.pearson, -1.0, 1e-6) << seed;
  }
}

TEST(Correlations, AlwaysInUnitInterval) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x(3 + trial % 7), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = u(rng);
      y[i] = trial % 3 == 0 ? 2 * x[i] : u(rng);
    }
    const double p = pearson(x, y), s = spearman(x, y);
    EXPECT_GE(p, -1.0);
    EXPECT_LE(p, 1.0);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}
