#include "size_lens/adclus.hpp"

#include "size_lens/error.hpp"
#include "size_lens/sizelaw.hpp"

namespace size_lens {

using Eigen::Index;

DesignMatrix build_design(const FeatureMatrix& features) {
  DesignMatrix design;
  design.pairs = upper_triangle_pairs(features.n_objects());
  design.feature_names = features.feature_names();
  const auto& f = features.cells();
  design.cells.resize(static_cast<Index>(design.pairs.size()), f.cols());
  for (Index k = 0; k < f.cols(); ++k) {
    auto column = design.cells.col(k);
    for (Index p = 0; p < static_cast<Index>(design.pairs.size()); ++p) {
      const auto [i, j] = design.pairs[p];
      column(p) = f(i, k) * f(j, k);
    }
  }
  return design;
}

WeightSolution fit(const FeatureMatrix& features, const SimilarityMatrix& similarity, const FitOptions& options) {
  if (features.object_names() != similarity.object_names()) {
    throw Error(ErrorCode::LabelMismatch, "feature and similarity matrices list different objects");
  }
  const Index k = features.n_features();

  NnlsProblem problem;
  {
    DesignMatrix design = build_design(features);
    if (options.intercept) {
      design.cells.conservativeResize(Eigen::NoChange, k + 1);
      design.cells.col(k).setOnes();
    }
    problem.design = std::move(design.cells);
  }
  problem.target = upper_triangle(similarity);

  NnlsSolution solved = solve_nnls(problem, options.solver);
  if (!solved.converged()) {
    throw Error(ErrorCode::IterationLimitExceeded,
                "NNLS did not converge within " + std::to_string(solved.iterations) + " iterations");
  }

  WeightSolution out;
  out.feature_names = features.feature_names();
  out.weights = solved.weights.head(k);
  out.intercept = options.intercept ? solved.weights(k) : 0.0;
  for (Index idx : solved.active_set) {
    if (idx < k) out.nonzero_feature_indices.push_back(idx);
  }
  out.feature_sizes = features.feature_sizes();
  out.fr_nonzero = out.nonzero_feature_indices.size();
  out.fr_total = static_cast<std::size_t>(k);
  out.residual_norm = solved.residual_norm;
  out.iterations = solved.iterations;
  out.warnings = std::move(solved.warnings);
  try {
    out.r_squared = r_squared(predict(features, out.weights), similarity);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    out.r_squared.reset();
  }
  return out;
}

SimilarityMatrix predict(const FeatureMatrix& features, const Eigen::VectorXd& weights) {
  if (weights.size() != features.n_features()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(features.n_features()) +
                                                  " weights, got " + std::to_string(weights.size()));
  }
  if ((weights.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "additive-clustering weights must be non-negative");
  }
  const auto& f = features.cells();
  // F diag(w) F^T; the product is symmetric in exact arithmetic but not bitwise,
  // so mirror the upper triangle.
  Eigen::MatrixXd cells = f * weights.asDiagonal() * f.transpose();
  for (Index i = 0; i < cells.rows(); ++i) {
    for (Index j = i + 1; j < cells.cols(); ++j) cells(j, i) = cells(i, j);
  }
  return SimilarityMatrix(features.object_names(), std::move(cells));
}

double r_squared(const SimilarityMatrix& predicted, const SimilarityMatrix& observed) {
  if (predicted.object_names() != observed.object_names()) {
    throw Error(ErrorCode::LabelMismatch, "predicted and observed similarities list different objects");
  }
  const Eigen::VectorXd p = upper_triangle(predicted);
  const Eigen::VectorXd o = upper_triangle(observed);
  const double r = pearson(std::span<const double>(p.data(), p.size()), std::span<const double>(o.data(), o.size()));
  return r * r;
}

}  // namespace size_lens
