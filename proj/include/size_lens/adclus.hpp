#pragma once

#include "size_lens/matrices.hpp"
#include "size_lens/nnls.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace size_lens {

/// One row per object pair (i < j), one column per feature; cell = f_ik * f_jk.
struct DesignMatrix {
  Eigen::MatrixXd cells;
  std::vector<PairIndex> pairs;
  std::vector<std::string> feature_names;
};

struct FitOptions {
  NnlsOptions solver;
  /// Appends a constant column. Its coefficient is constrained non-negative like
  /// the feature weights and is never counted in the feature ratio.
  bool intercept = false;
};

/// Additive-clustering weights for s_ij = sum_k w_k f_ik f_jk.
struct WeightSolution {
  std::vector<std::string> feature_names;
  Eigen::VectorXd weights;
  std::vector<Eigen::Index> nonzero_feature_indices;
  std::vector<std::size_t> feature_sizes;
  /// Squared Pearson correlation of predicted vs observed off-diagonal similarity.
  /// Empty when either side is constant.
  std::optional<double> r_squared;
  std::size_t fr_nonzero = 0;
  std::size_t fr_total = 0;
  double intercept = 0.0;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  std::vector<std::string> warnings;
};

DesignMatrix build_design(const FeatureMatrix& features);

/// NNLS regression of the pairwise design onto the upper-triangle similarities.
/// Throws LabelMismatch when the two inputs list different objects, and
/// IterationLimitExceeded when the solver fails to converge.
WeightSolution fit(const FeatureMatrix& features, const SimilarityMatrix& similarity,
                   const FitOptions& options = {});

/// Model similarities. Off-diagonal cells follow the additive-clustering sum; the
/// diagonal holds the self-products sum_k w_k f_ik and is never used for scoring.
SimilarityMatrix predict(const FeatureMatrix& features, const Eigen::VectorXd& weights);

/// Squared Pearson correlation over off-diagonal pairs. Throws ZeroVariance,
/// LabelMismatch.
double r_squared(const SimilarityMatrix& predicted, const SimilarityMatrix& observed);

}  // namespace size_lens
