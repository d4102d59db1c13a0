#pragma once

#include "size_lens/matrices.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace size_lens {

enum class AlignPolicy {
  Strict,     // object sets must match (order may differ)
  Intersect,  // keep the shared objects, report the rest
};

struct Provenance {
  std::string feature_source;
  std::string similarity_source;
  std::vector<std::string> filters;
  /// Names present in one input but not matched in the other.
  std::vector<std::string> dropped_similarity_objects;
  std::vector<std::string> dropped_feature_objects;
};

/// One analyzable dataset; features and similarity list the same objects in the same order.
struct DatasetBundle {
  std::string name;
  FeatureMatrix features;
  SimilarityMatrix similarity;
  Provenance provenance;
};

/// First row: corner cell then feature names. Each further row: object name then 0/1 cells.
/// Throws ParseError (with row/column), NonBinaryCell, DuplicateLabel, TooFewObjects, IoError.
FeatureMatrix read_feature_csv(const std::string& path);

/// Square labeled grid with the same labels on both axes. Empty diagonal cells
/// read as 0. Throws ParseError, NotSquare, LabelAxisMismatch, NonFiniteCell,
/// AsymmetryExceedsTolerance, DuplicateLabel, IoError.
SimilarityMatrix read_similarity_csv(const std::string& path, std::optional<double> symmetry_tolerance = std::nullopt);

/// Keeps features with min_size <= |h_k| <= max_size, preserving column order.
/// Bounds that admit no size (min > max, min > N) leave nothing and throw
/// AllFeaturesFiltered like any other empty selection.
FeatureMatrix filter_features(const FeatureMatrix& features, std::size_t min_size, std::size_t max_size);

/// Trimmed, lower-cased key used for cross-file name matching.
std::string match_key(const std::string& name);

/// Reorders (and under Intersect, subsets) both matrices to the similarity's
/// object order. Throws StrictMismatch, EmptyIntersection, TooFewObjects.
DatasetBundle align_objects(const SimilarityMatrix& similarity, const FeatureMatrix& features, AlignPolicy policy);

struct LoadOptions {
  AlignPolicy policy = AlignPolicy::Strict;
  std::optional<std::size_t> min_feature_size;
  std::optional<std::size_t> max_feature_size;
  bool normalize_similarity = false;
  std::optional<double> symmetry_tolerance;
};

/// read -> align -> (normalize) -> filter, with every step recorded in provenance.
/// Feature sizes for filtering are taken over the aligned object set.
DatasetBundle load_dataset(const std::string& name, const std::string& feature_path,
                           const std::string& similarity_path, const LoadOptions& options = {});

}  // namespace size_lens
