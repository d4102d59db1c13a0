#include "size_lens/sizelaw.hpp"

#include "size_lens/adclus.hpp"
#include "size_lens/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace size_lens {

namespace {

// Fitted weights that agree to this many log units are treated as identical;
// NNLS recovers a planted constant only up to rounding.
constexpr double kLogWeightSpreadFloor = 1e-9;

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double spread(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

bool is_constant(std::span<const double> v) {
  if (v.empty()) return true;
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  return !(spread(v) > 4.0 * std::numeric_limits<double>::epsilon() * scale);
}

void require_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "vectors have lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::LengthMismatch, "at least 2 paired values are required");
  }
}

struct Moments {
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  double mx = 0.0;
  double my = 0.0;
};

Moments centered_moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  m.mx = mean_of(x);
  m.my = mean_of(y);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mx;
    const double dy = y[i] - m.my;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

/// Replaces runs of weights that agree within kLogWeightSpreadFloor (in log
/// space) by their first member, so rounding noise does not break rank ties.
std::vector<double> snap_near_ties(std::span<const double> weights) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weights[a] < weights[b]; });
  std::vector<double> out(weights.begin(), weights.end());
  for (std::size_t t = 1; t < order.size(); ++t) {
    const double prev = weights[order[t - 1]];
    const double cur = weights[order[t]];
    if (std::log(cur) - std::log(prev) <= kLogWeightSpreadFloor) out[order[t]] = out[order[t - 1]];
  }
  return out;
}

}  // namespace

std::vector<double> z_scores(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.size() < 2 || is_constant(values)) return out;
  const double mu = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mu) / sd;
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    // positions start..end-1 hold ranks start+1..end
    const double shared = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t t = start; t < end; ++t) ranks[order[t]] = shared;
    start = end;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  if (is_constant(x) || is_constant(y)) {
    throw Error(ErrorCode::ZeroVariance, "correlation is undefined for a constant vector");
  }
  const Moments m = centered_moments(x, y);
  const double r = m.sxy / std::sqrt(m.sxx * m.syy);
  return std::clamp(r, -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  if (is_constant(x)) {
    throw Error(ErrorCode::ZeroVariance, "cannot fit a line against a constant predictor");
  }
  const Moments m = centered_moments(x, y);
  LineFit line;
  line.slope = m.sxy / m.sxx;
  line.intercept = m.my - line.slope * m.mx;
  return line;
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3 || !std::isfinite(r)) return std::numeric_limits<double>::quiet_NaN();
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r2));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

TTestResult one_sample_ttest_negative(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "a one-sample t-test needs at least 2 values");
  }
  if (is_constant(values)) {
    throw Error(ErrorCode::ZeroVariance, "all values are identical");
  }
  const double n = static_cast<double>(values.size());
  TTestResult out;
  out.mean = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sample_sd = std::sqrt(ss / (n - 1.0));
  out.degrees_of_freedom = values.size() - 1;
  out.t_statistic = out.mean / (out.sample_sd / std::sqrt(n));
  const boost::math::students_t dist(static_cast<double>(out.degrees_of_freedom));
  out.p_value_one_sided = boost::math::cdf(dist, out.t_statistic);
  return out;
}

SizeLawPoints extract_points(const WeightSolution& solution) {
  if (solution.nonzero_feature_indices.empty()) {
    throw Error(ErrorCode::NoActiveFeatures, "no feature received a positive weight");
  }
  SizeLawPoints points;
  points.reserve(solution.nonzero_feature_indices.size());
  for (Eigen::Index k : solution.nonzero_feature_indices) {
    SizeLawPoint pt;
    pt.feature_name = solution.feature_names.at(static_cast<std::size_t>(k));
    pt.weight = solution.weights(k);
    pt.size = solution.feature_sizes.at(static_cast<std::size_t>(k));
    if (pt.size == 0) {
      throw Error(ErrorCode::ZeroSizeActiveFeature,
                  "feature '" + pt.feature_name + "' has a positive weight but no objects");
    }
    pt.log_weight = std::log(pt.weight);
    pt.log_size = std::log(static_cast<double>(pt.size));
    points.push_back(std::move(pt));
  }
  std::vector<double> lw, ls;
  for (const auto& p : points) {
    lw.push_back(p.log_weight);
    ls.push_back(p.log_size);
  }
  const auto zw = z_scores(lw);
  const auto zs = z_scores(ls);
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].z_log_weight = zw[i];
    points[i].z_log_size = zs[i];
  }
  return points;
}

SizeLawStats analyze(const WeightSolution& solution) {
  const SizeLawPoints points = extract_points(solution);
  if (points.size() < 3) {
    throw Error(ErrorCode::TooFewPoints,
                "size-law statistics need at least 3 non-zero weights, got " + std::to_string(points.size()));
  }
  std::vector<double> log_w, log_s, raw_w, raw_s;
  for (const auto& p : points) {
    log_w.push_back(p.log_weight);
    log_s.push_back(p.log_size);
    raw_w.push_back(p.weight);
    raw_s.push_back(static_cast<double>(p.size));
  }
  if (spread(log_s) == 0.0) {
    throw Error(ErrorCode::ZeroVariance, "all non-zero-weight features have the same size");
  }
  if (!(spread(log_w) > kLogWeightSpreadFloor)) {
    throw Error(ErrorCode::ZeroVariance, "all non-zero weights are identical");
  }
  SizeLawStats stats;
  stats.n_points = points.size();
  stats.pearson = pearson(log_s, log_w);
  stats.spearman = spearman(raw_s, snap_near_ties(raw_w));
  const LineFit line = fit_line(log_s, log_w);
  stats.slope = line.slope;
  stats.intercept = line.intercept;
  stats.pearson_p_value = correlation_p_value(stats.pearson, stats.n_points);
  stats.spearman_p_value = correlation_p_value(stats.spearman, stats.n_points);
  return stats;
}

}  // namespace size_lens
