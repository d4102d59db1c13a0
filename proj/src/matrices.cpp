#include "size_lens/matrices.hpp"

#include "size_lens/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace size_lens {

namespace {

void require_unique(const std::vector<std::string>& labels, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::DuplicateLabel, std::string("duplicate ") + what + " label '" + label + "'");
    }
  }
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::vector<std::string> object_names, std::vector<std::string> feature_names,
                             Eigen::MatrixXd cells)
    : object_names_(std::move(object_names)), feature_names_(std::move(feature_names)), cells_(std::move(cells)) {
  if (static_cast<Eigen::Index>(object_names_.size()) != cells_.rows() ||
      static_cast<Eigen::Index>(feature_names_.size()) != cells_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "label counts do not match the feature grid shape");
  }
  if (cells_.rows() < 2) {
    throw Error(ErrorCode::TooFewObjects, "a feature matrix needs at least 2 objects, got " +
                                              std::to_string(cells_.rows()));
  }
  if (cells_.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "a feature matrix needs at least 1 feature");
  }
  for (Eigen::Index k = 0; k < cells_.cols(); ++k) {
    for (Eigen::Index i = 0; i < cells_.rows(); ++i) {
      const double v = cells_(i, k);
      if (v != 0.0 && v != 1.0) {
        throw Error(ErrorCode::NonBinaryCell, "cell (" + object_names_[i] + ", " + feature_names_[k] +
                                                  ") = " + std::to_string(v) + " is not 0 or 1");
      }
      cells_(i, k) = v == 0.0 ? 0.0 : 1.0;  // drops -0.0
    }
  }
  require_unique(object_names_, "object");
  require_unique(feature_names_, "feature");
}

std::vector<std::size_t> FeatureMatrix::feature_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(cells_.cols()));
  for (Eigen::Index k = 0; k < cells_.cols(); ++k) {
    sizes[k] = static_cast<std::size_t>(cells_.col(k).sum());
  }
  return sizes;
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> object_names, Eigen::MatrixXd cells)
    : object_names_(std::move(object_names)), cells_(std::move(cells)) {
  if (cells_.rows() != cells_.cols()) {
    throw Error(ErrorCode::NotSquare, "similarity grid is " + std::to_string(cells_.rows()) + "x" +
                                          std::to_string(cells_.cols()));
  }
  if (static_cast<Eigen::Index>(object_names_.size()) != cells_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match the similarity grid");
  }
  if (cells_.rows() < 2) {
    throw Error(ErrorCode::TooFewObjects, "a similarity matrix needs at least 2 objects");
  }
  for (Eigen::Index i = 0; i < cells_.rows(); ++i) {
    for (Eigen::Index j = 0; j < cells_.cols(); ++j) {
      if (!std::isfinite(cells_(i, j))) {
        throw Error(ErrorCode::NonFiniteCell,
                    "cell (" + object_names_[i] + ", " + object_names_[j] + ") is not finite");
      }
      if (j > i && cells_(i, j) != cells_(j, i)) {
        throw Error(ErrorCode::AsymmetryExceedsTolerance,
                    "cells (" + object_names_[i] + ", " + object_names_[j] + ") differ across the diagonal");
      }
    }
  }
  require_unique(object_names_, "object");
}

FeatureMatrix validate_feature_matrix(const LabeledGrid& raw) {
  return FeatureMatrix(raw.row_labels, raw.column_labels, raw.values);
}

double default_symmetry_tolerance(const Eigen::MatrixXd& cells) {
  if (cells.size() == 0) return 0.0;
  const double scale = cells.cwiseAbs().maxCoeff();
  return std::isfinite(scale) ? 1e-9 * scale : 0.0;
}

SimilarityMatrix validate_similarity_matrix(const LabeledGrid& raw, std::optional<double> symmetry_tolerance) {
  const Eigen::MatrixXd& grid = raw.values;
  if (grid.rows() != grid.cols()) {
    throw Error(ErrorCode::NotSquare,
                "similarity grid is " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()));
  }
  if (!raw.column_labels.empty() && raw.column_labels != raw.row_labels) {
    throw Error(ErrorCode::LabelAxisMismatch, "row labels differ from column labels");
  }
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      if (!std::isfinite(grid(i, j))) {
        throw Error(ErrorCode::NonFiniteCell, "cell (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                                                  ") is not finite");
      }
    }
  }
  const double tolerance = symmetry_tolerance.value_or(default_symmetry_tolerance(grid));
  Eigen::MatrixXd cells = grid;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < grid.cols(); ++j) {
      const double gap = std::abs(grid(i, j) - grid(j, i));
      if (gap > tolerance) {
        throw Error(ErrorCode::AsymmetryExceedsTolerance,
                    "|s(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") - s(" + std::to_string(j + 1) +
                        "," + std::to_string(i + 1) + ")| = " + std::to_string(gap) + " exceeds tolerance " +
                        std::to_string(tolerance));
      }
      const double mid = 0.5 * (grid(i, j) + grid(j, i));
      cells(i, j) = mid;
      cells(j, i) = mid;
    }
  }
  return SimilarityMatrix(raw.row_labels, std::move(cells));
}

std::vector<PairIndex> upper_triangle_pairs(Eigen::Index n) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "pair enumeration needs n >= 2");
  }
  std::vector<PairIndex> pairs;
  pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

Eigen::VectorXd upper_triangle(const SimilarityMatrix& similarity) {
  const Eigen::Index n = similarity.size();
  Eigen::VectorXd out(n * (n - 1) / 2);
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out(p++) = similarity.cells()(i, j);
  }
  return out;
}

SimilarityMatrix min_max_normalized(const SimilarityMatrix& similarity) {
  const Eigen::VectorXd off = upper_triangle(similarity);
  const double lo = off.minCoeff();
  const double hi = off.maxCoeff();
  if (!(hi > lo)) {
    throw Error(ErrorCode::ZeroVariance, "cannot min-max normalize constant off-diagonal similarities");
  }
  Eigen::MatrixXd cells = (similarity.cells().array() - lo) / (hi - lo);
  return SimilarityMatrix(similarity.object_names(), std::move(cells));
}

}  // namespace size_lens
