#pragma once

#include "size_lens/adclus.hpp"
#include "size_lens/matrices.hpp"
#include "size_lens/sizelaw.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace size_lens {

/// One row of the size/weight correlation table plus the points behind its plot.
/// Statistics are empty ("NA") when the dataset is degenerate.
struct SizeLawReport {
  std::string set_name;
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::size_t fr_nonzero = 0;
  std::size_t fr_total = 0;
  std::optional<double> r_squared_mp;
  std::optional<double> slope;  // raw log-log space
  std::optional<double> intercept;
  std::optional<double> pearson_p_value;
  std::optional<double> spearman_p_value;
  std::size_t n_points = 0;
  SizeLawPoints points;
  /// Why the statistics are missing; empty for a complete row.
  std::string degenerate_reason;

  bool degenerate() const noexcept { return !degenerate_reason.empty(); }
};

/// Runs the size-law analysis on a fit. Statistics errors (no or too few active
/// features, zero variance) become a degenerate report instead of propagating.
SizeLawReport make_report(const std::string& set_name, const WeightSolution& solution);

/// "table.csv" -> "table.full.csv"; other names get ".full.csv" appended.
std::string full_table_path(const std::string& path);

/// Display table (2 decimals for correlations and R2, 4 for the slope) at `path`
/// and the full-precision companion at full_table_path(path). Throws IoError.
void write_table(std::span<const SizeLawReport> reports, const std::string& path);

/// Parses a full-precision table back into reports (points are not stored).
std::vector<SizeLawReport> read_full_table(const std::string& path);

/// Log-log scatter on z-scored coordinates with the slope -1 reference line (red)
/// and the least-squares line (black). Byte-deterministic. Throws TooFewPoints.
std::string render_scatter_svg(const SizeLawReport& report);
void write_scatter_svg(const SizeLawReport& report, const std::string& path);

struct NamedTTest {
  std::string name;
  TTestResult result;
  std::size_t excluded = 0;  // degenerate rows left out of the test
};

/// "<0.0001" below 1e-4, otherwise 4 decimals.
std::string format_p_value(double p);

/// CSV: statistic,t,df,p_one_sided,mean,sd,n,excluded.
void write_ttest_summary(std::span<const NamedTTest> results, const std::string& path);

// Matrix writers, inverse of the ingest readers. Values are written with 17
// significant digits.
void write_feature_csv(const FeatureMatrix& features, const std::string& path);
void write_similarity_csv(const SimilarityMatrix& similarity, const std::string& path);
void write_weights_csv(const std::vector<std::string>& feature_names, const std::vector<std::size_t>& sizes,
                       const Eigen::VectorXd& weights, const std::string& path);

}  // namespace size_lens
