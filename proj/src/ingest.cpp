#include "size_lens/ingest.hpp"

#include "size_lens/csv.hpp"
#include "size_lens/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace size_lens {

namespace {

struct RawGrid {
  std::vector<std::string> column_labels;
  std::vector<std::string> row_labels;
  std::vector<std::size_t> row_lines;
  std::vector<std::vector<std::string>> cells;
};

RawGrid read_grid(const std::string& path) {
  const std::vector<csv::Record> records = csv::read_file(path);
  if (records.empty()) {
    throw Error(ErrorCode::ParseError, "file is empty", SourceLocation{path, 0, 0});
  }
  RawGrid grid;
  const auto& header = records.front();
  for (std::size_t c = 1; c < header.fields.size(); ++c) {
    grid.column_labels.emplace_back(csv::trim(header.fields[c]));
  }
  if (grid.column_labels.empty()) {
    throw Error(ErrorCode::ParseError, "header has no column labels", SourceLocation{path, header.line, 0});
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.fields.size()) {
      throw Error(ErrorCode::ParseError,
                  "row has " + std::to_string(rec.fields.size()) + " fields, header has " +
                      std::to_string(header.fields.size()),
                  SourceLocation{path, rec.line, std::min(rec.fields.size(), header.fields.size()) + 1});
    }
    grid.row_labels.emplace_back(csv::trim(rec.fields.front()));
    grid.row_lines.push_back(rec.line);
    grid.cells.emplace_back(rec.fields.begin() + 1, rec.fields.end());
  }
  return grid;
}

template <typename T>
std::vector<T> select(const std::vector<T>& items, const std::vector<std::size_t>& keep) {
  std::vector<T> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(items[i]);
  return out;
}

}  // namespace

FeatureMatrix read_feature_csv(const std::string& path) {
  const RawGrid grid = read_grid(path);
  const auto n = static_cast<Eigen::Index>(grid.row_labels.size());
  const auto k = static_cast<Eigen::Index>(grid.column_labels.size());
  Eigen::MatrixXd cells(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const std::string& text = grid.cells[i][c];
      const SourceLocation where{path, grid.row_lines[i], static_cast<std::size_t>(c) + 2};
      const auto value = csv::parse_number(text);
      if (!value) {
        throw Error(ErrorCode::ParseError, "cannot parse '" + text + "' as 0/1", where);
      }
      if (*value != 0.0 && *value != 1.0) {
        throw Error(ErrorCode::NonBinaryCell, "cell '" + text + "' is not 0 or 1", where);
      }
      cells(i, c) = *value;
    }
  }
  try {
    return FeatureMatrix(grid.row_labels, grid.column_labels, std::move(cells));
  } catch (const Error& e) {
    throw Error(e.code(), e.detail(), SourceLocation{path, 0, 0});
  }
}

SimilarityMatrix read_similarity_csv(const std::string& path, std::optional<double> symmetry_tolerance) {
  const RawGrid grid = read_grid(path);
  const auto n = static_cast<Eigen::Index>(grid.row_labels.size());
  const auto cols = static_cast<Eigen::Index>(grid.column_labels.size());
  if (n != cols) {
    throw Error(ErrorCode::NotSquare,
                "similarity grid has " + std::to_string(n) + " rows and " + std::to_string(cols) + " columns",
                SourceLocation{path, 0, 0});
  }
  if (grid.row_labels != grid.column_labels) {
    std::size_t i = 0;
    while (grid.row_labels[i] == grid.column_labels[i]) ++i;
    throw Error(ErrorCode::LabelAxisMismatch,
                "row label '" + grid.row_labels[i] + "' differs from column label '" + grid.column_labels[i] + "'",
                SourceLocation{path, grid.row_lines[i], 1});
  }
  LabeledGrid labeled{grid.row_labels, grid.column_labels, Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::string& text = grid.cells[i][j];
      const SourceLocation where{path, grid.row_lines[i], static_cast<std::size_t>(j) + 2};
      if (i == j && csv::trim(text).empty()) {
        labeled.values(i, j) = 0.0;
        continue;
      }
      const auto value = csv::parse_number(text);
      if (!value) {
        throw Error(ErrorCode::ParseError, "cannot parse '" + text + "' as a number", where);
      }
      if (!std::isfinite(*value)) {
        throw Error(ErrorCode::NonFiniteCell, "cell '" + text + "' is not finite", where);
      }
      labeled.values(i, j) = *value;
    }
  }
  try {
    return validate_similarity_matrix(labeled, symmetry_tolerance);
  } catch (const Error& e) {
    throw Error(e.code(), e.detail(), SourceLocation{path, 0, 0});
  }
}

FeatureMatrix filter_features(const FeatureMatrix& features, std::size_t min_size, std::size_t max_size) {
  const std::vector<std::size_t> sizes = features.feature_sizes();
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] >= min_size && sizes[k] <= max_size) keep.push_back(k);
  }
  if (keep.empty()) {
    throw Error(ErrorCode::AllFeaturesFiltered, "no feature has a size in [" + std::to_string(min_size) + ", " +
                                                    std::to_string(max_size) + "]");
  }
  Eigen::MatrixXd cells(features.n_objects(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t) {
    cells.col(static_cast<Eigen::Index>(t)) = features.cells().col(static_cast<Eigen::Index>(keep[t]));
  }
  return FeatureMatrix(features.object_names(), select(features.feature_names(), keep), std::move(cells));
}

std::string match_key(const std::string& name) {
  std::string key(csv::trim(name));
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  return key;
}

DatasetBundle align_objects(const SimilarityMatrix& similarity, const FeatureMatrix& features, AlignPolicy policy) {
  auto index_by_key = [](const std::vector<std::string>& names, const char* what) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!index.emplace(match_key(names[i]), i).second) {
        throw Error(ErrorCode::DuplicateLabel,
                    std::string(what) + " object '" + names[i] + "' collides with another name after normalization");
      }
    }
    return index;
  };
  const auto& sim_names = similarity.object_names();
  const auto& feat_names = features.object_names();
  const auto feat_index = index_by_key(feat_names, "feature");
  const auto sim_index = index_by_key(sim_names, "similarity");

  std::vector<std::size_t> sim_keep, feat_rows;
  Provenance provenance;
  for (std::size_t i = 0; i < sim_names.size(); ++i) {
    const auto it = feat_index.find(match_key(sim_names[i]));
    if (it == feat_index.end()) {
      provenance.dropped_similarity_objects.push_back(sim_names[i]);
    } else {
      sim_keep.push_back(i);
      feat_rows.push_back(it->second);
    }
  }
  for (const auto& name : feat_names) {
    if (!sim_index.contains(match_key(name))) provenance.dropped_feature_objects.push_back(name);
  }

  if (policy == AlignPolicy::Strict &&
      (!provenance.dropped_similarity_objects.empty() || !provenance.dropped_feature_objects.empty())) {
    auto list = [](const std::vector<std::string>& names) {
      std::string out;
      for (const auto& s : names) out += (out.empty() ? "" : ", ") + s;
      return out.empty() ? std::string("(none)") : out;
    };
    throw Error(ErrorCode::StrictMismatch,
                "object sets differ; only in similarity: " + list(provenance.dropped_similarity_objects) +
                    "; only in features: " + list(provenance.dropped_feature_objects) +
                    " (use --align intersect to keep the shared objects)");
  }
  if (sim_keep.empty()) {
    throw Error(ErrorCode::EmptyIntersection, "feature and similarity inputs share no object names");
  }

  const std::vector<std::string> names = select(sim_names, sim_keep);
  const auto m = static_cast<Eigen::Index>(sim_keep.size());
  Eigen::MatrixXd s(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      s(a, b) = similarity.cells()(static_cast<Eigen::Index>(sim_keep[a]), static_cast<Eigen::Index>(sim_keep[b]));
    }
  }
  Eigen::MatrixXd f(m, features.n_features());
  for (Eigen::Index a = 0; a < m; ++a) f.row(a) = features.cells().row(static_cast<Eigen::Index>(feat_rows[a]));

  return DatasetBundle{"", FeatureMatrix(names, features.feature_names(), std::move(f)),
                       SimilarityMatrix(names, std::move(s)), std::move(provenance)};
}

DatasetBundle load_dataset(const std::string& name, const std::string& feature_path,
                           const std::string& similarity_path, const LoadOptions& options) {
  const FeatureMatrix features = read_feature_csv(feature_path);
  const SimilarityMatrix similarity = read_similarity_csv(similarity_path, options.symmetry_tolerance);
  DatasetBundle bundle = align_objects(similarity, features, options.policy);
  bundle.name = name;
  bundle.provenance.feature_source = feature_path;
  bundle.provenance.similarity_source = similarity_path;
  bundle.provenance.filters.push_back(options.policy == AlignPolicy::Strict ? "align=strict" : "align=intersect");
  if (options.normalize_similarity) {
    bundle.similarity = min_max_normalized(bundle.similarity);
    bundle.provenance.filters.push_back("normalize-similarity=min-max");
  }
  if (options.min_feature_size || options.max_feature_size) {
    const std::size_t lo = options.min_feature_size.value_or(0);
    const std::size_t hi = options.max_feature_size.value_or(static_cast<std::size_t>(bundle.features.n_objects()));
    bundle.features = filter_features(bundle.features, lo, hi);
    bundle.provenance.filters.push_back("feature-size in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return bundle;
}

}  // namespace size_lens
