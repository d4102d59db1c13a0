#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace size_lens {

/// A numeric grid with row and column labels, as read from disk before validation.
struct LabeledGrid {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  Eigen::MatrixXd values;
};

/// Binary object x feature incidence matrix. Column k is hypothesis h_k and its
/// column sum is the feature size |h_k|.
class FeatureMatrix {
 public:
  /// Throws NonBinaryCell, DuplicateLabel, TooFewObjects or DimensionMismatch.
  FeatureMatrix(std::vector<std::string> object_names, std::vector<std::string> feature_names,
                Eigen::MatrixXd cells);

  const std::vector<std::string>& object_names() const noexcept { return object_names_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const Eigen::MatrixXd& cells() const noexcept { return cells_; }

  Eigen::Index n_objects() const noexcept { return cells_.rows(); }
  Eigen::Index n_features() const noexcept { return cells_.cols(); }
  bool has(Eigen::Index object, Eigen::Index feature) const { return cells_(object, feature) != 0.0; }

  std::vector<std::size_t> feature_sizes() const;

 private:
  std::vector<std::string> object_names_;
  std::vector<std::string> feature_names_;
  Eigen::MatrixXd cells_;
};

/// Symmetric, finite object x object similarity matrix.
class SimilarityMatrix {
 public:
  /// Requires exact symmetry; use validate_similarity_matrix() to symmetrize noisy input.
  SimilarityMatrix(std::vector<std::string> object_names, Eigen::MatrixXd cells);

  const std::vector<std::string>& object_names() const noexcept { return object_names_; }
  const Eigen::MatrixXd& cells() const noexcept { return cells_; }
  Eigen::Index size() const noexcept { return cells_.rows(); }

 private:
  std::vector<std::string> object_names_;
  Eigen::MatrixXd cells_;
};

struct PairIndex {
  Eigen::Index i = 0;
  Eigen::Index j = 0;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

FeatureMatrix validate_feature_matrix(const LabeledGrid& raw);

/// Default tolerance is 1e-9 times the largest absolute cell.
double default_symmetry_tolerance(const Eigen::MatrixXd& cells);

/// Accepts grids whose asymmetry is within `symmetry_tolerance` and averages the
/// two triangles. When the grid carries column labels they must equal the row labels.
SimilarityMatrix validate_similarity_matrix(const LabeledGrid& raw,
                                            std::optional<double> symmetry_tolerance = std::nullopt);

/// Row-major enumeration of the strict upper triangle: (0,1), (0,2), ..., (n-2,n-1).
std::vector<PairIndex> upper_triangle_pairs(Eigen::Index n);

/// Off-diagonal similarities in upper_triangle_pairs order.
Eigen::VectorXd upper_triangle(const SimilarityMatrix& similarity);

/// Affine rescale so the off-diagonal cells span [0, 1]. The diagonal gets the same map.
SimilarityMatrix min_max_normalized(const SimilarityMatrix& similarity);

}  // namespace size_lens
