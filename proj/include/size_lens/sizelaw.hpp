#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace size_lens {

struct WeightSolution;

/// One non-zero-weight feature on the log-log size/weight plane.
struct SizeLawPoint {
  std::string feature_name;
  double weight = 0.0;
  std::size_t size = 0;
  double log_weight = 0.0;
  double log_size = 0.0;
  double z_log_weight = 0.0;
  double z_log_size = 0.0;
};

using SizeLawPoints = std::vector<SizeLawPoint>;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

struct SizeLawStats {
  double pearson = 0.0;   // log weight vs log size
  double spearman = 0.0;  // raw weight vs raw size
  double slope = 0.0;     // log weight on log size; the size principle predicts -1
  double intercept = 0.0;
  std::size_t n_points = 0;
  double pearson_p_value = 0.0;   // two-sided
  double spearman_p_value = 0.0;  // two-sided
};

struct TTestResult {
  double t_statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value_one_sided = 0.0;  // H1: mean < 0
  double mean = 0.0;
  double sample_sd = 0.0;
};

/// Natural logs and population z-scores for every feature with w_k > 0.
/// Throws NoActiveFeatures, ZeroSizeActiveFeature.
SizeLawPoints extract_points(const WeightSolution& solution);

/// Population (divide-by-n) z-scores. All zeros when the input has no spread.
std::vector<double> z_scores(std::span<const double> values);

/// 1-based ranks; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Throws LengthMismatch (also for fewer than 2 values) and ZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

/// Ordinary least squares of y on x. Throws ZeroVariance when x is constant.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value of a correlation via t = r sqrt((n-2)/(1-r^2)) on n-2 df.
double correlation_p_value(double r, std::size_t n);

/// One-sample t-test of mean < 0 with sample (n-1) standard deviation.
TTestResult one_sample_ttest_negative(std::span<const double> values);

/// The size-principle test on a fitted solution. Throws TooFewPoints (< 3 active
/// features) and ZeroVariance (constant log sizes or log weights).
SizeLawStats analyze(const WeightSolution& solution);

}  // namespace size_lens
