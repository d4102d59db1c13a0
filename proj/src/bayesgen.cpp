#include "size_lens/bayesgen.hpp"

#include "size_lens/adclus.hpp"
#include "size_lens/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace size_lens {

Hypothesis::Hypothesis(std::vector<std::size_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (members_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a hypothesis must contain at least one object");
  }
}

bool Hypothesis::contains(std::size_t object) const {
  return std::binary_search(members_.begin(), members_.end(), object);
}

HypothesisSpace::HypothesisSpace(std::vector<std::string> object_names, std::vector<Hypothesis> hypotheses,
                                 Eigen::VectorXd priors, SamplingMode mode)
    : object_names_(std::move(object_names)),
      hypotheses_(std::move(hypotheses)),
      priors_(std::move(priors)),
      mode_(mode) {
  if (hypotheses_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a hypothesis space needs at least one hypothesis");
  }
  if (priors_.size() != static_cast<Eigen::Index>(hypotheses_.size())) {
    throw Error(ErrorCode::DimensionMismatch, "one prior per hypothesis is required");
  }
  for (const auto& h : hypotheses_) {
    if (h.members().back() >= object_names_.size()) {
      throw Error(ErrorCode::UnknownObject, "hypothesis refers to object index " +
                                                std::to_string(h.members().back()) + " outside the space");
    }
  }
  if (!priors_.allFinite() || (priors_.array() < 0.0).any() || std::abs(priors_.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "priors must be non-negative and sum to 1");
  }
}

HypothesisSpace HypothesisSpace::uniform(std::vector<std::string> object_names, std::vector<Hypothesis> hypotheses,
                                         SamplingMode mode) {
  const auto k = static_cast<Eigen::Index>(hypotheses.size());
  Eigen::VectorXd priors = Eigen::VectorXd::Constant(k, k > 0 ? 1.0 / static_cast<double>(k) : 0.0);
  return HypothesisSpace(std::move(object_names), std::move(hypotheses), std::move(priors), mode);
}

HypothesisSpace HypothesisSpace::from_features(const FeatureMatrix& features, SamplingMode mode) {
  std::vector<Hypothesis> hypotheses;
  for (Eigen::Index k = 0; k < features.n_features(); ++k) {
    std::vector<std::size_t> members;
    for (Eigen::Index i = 0; i < features.n_objects(); ++i) {
      if (features.has(i, k)) members.push_back(static_cast<std::size_t>(i));
    }
    if (!members.empty()) hypotheses.emplace_back(std::move(members));
  }
  return uniform(features.object_names(), std::move(hypotheses), mode);
}

std::size_t HypothesisSpace::index_of(const std::string& object_name) const {
  const auto it = std::find(object_names_.begin(), object_names_.end(), object_name);
  if (it == object_names_.end()) {
    throw Error(ErrorCode::UnknownObject, "unknown object '" + object_name + "'");
  }
  return static_cast<std::size_t>(it - object_names_.begin());
}

double shepard_similarity(double distance) {
  if (std::isnan(distance) || distance < 0.0) {
    throw Error(ErrorCode::NegativeDistance, "psychological distance must be non-negative");
  }
  return std::exp(-distance);
}

namespace {

bool contains_all(const Hypothesis& h, std::span<const std::size_t> examples) {
  return std::all_of(examples.begin(), examples.end(), [&](std::size_t x) { return h.contains(x); });
}

void require_examples(const HypothesisSpace& space, std::span<const std::size_t> examples) {
  if (examples.empty()) {
    throw Error(ErrorCode::InvalidArgument, "at least one example is required");
  }
  for (std::size_t x : examples) {
    if (x >= space.object_names().size()) {
      throw Error(ErrorCode::UnknownObject, "example index " + std::to_string(x) + " is outside the space");
    }
  }
}

}  // namespace

double likelihood(const Hypothesis& h, std::span<const std::size_t> examples, SamplingMode mode) {
  if (examples.empty()) {
    throw Error(ErrorCode::InvalidArgument, "at least one example is required");
  }
  if (!contains_all(h, examples)) return 0.0;
  if (mode == SamplingMode::Weak) return 1.0;
  return std::pow(1.0 / static_cast<double>(h.size()), static_cast<double>(examples.size()));
}

PosteriorDistribution posterior(const HypothesisSpace& space, std::span<const std::size_t> examples) {
  require_examples(space, examples);
  const auto& hs = space.hypotheses();
  const double n = static_cast<double>(examples.size());
  const double neg_inf = -std::numeric_limits<double>::infinity();

  // Work in log space: (1/|h|)^n underflows quickly for large n.
  Eigen::VectorXd log_joint = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(hs.size()), neg_inf);
  double peak = neg_inf;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double prior = space.priors()(static_cast<Eigen::Index>(k));
    if (prior <= 0.0 || !contains_all(hs[k], examples)) continue;
    double lj = std::log(prior);
    if (space.mode() == SamplingMode::Strong) lj -= n * std::log(static_cast<double>(hs[k].size()));
    log_joint(static_cast<Eigen::Index>(k)) = lj;
    peak = std::max(peak, lj);
  }
  if (peak == neg_inf) {
    throw Error(ErrorCode::InconsistentExamples, "no hypothesis with positive prior contains every example");
  }

  PosteriorDistribution out;
  out.examples.assign(examples.begin(), examples.end());
  // std::exp per entry: the vectorised exp clamps -inf to a denormal instead of 0.
  out.probabilities = log_joint.unaryExpr([peak](double v) { return std::exp(v - peak); });
  const double total = out.probabilities.sum();
  out.probabilities /= total;
  out.log_normalizer = peak + std::log(total);
  out.normalizer = std::exp(out.log_normalizer);
  return out;
}

double generalize(const HypothesisSpace& space, std::span<const std::size_t> examples, std::size_t target) {
  if (target >= space.object_names().size()) {
    throw Error(ErrorCode::UnknownObject, "target index " + std::to_string(target) + " is outside the space");
  }
  const PosteriorDistribution post = posterior(space, examples);
  double mass = 0.0;
  const auto& hs = space.hypotheses();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (hs[k].contains(target)) mass += post.probabilities(static_cast<Eigen::Index>(k));
  }
  return std::min(mass, 1.0);
}

SimilarityMatrix generalization_matrix(const HypothesisSpace& space, std::size_t n_examples) {
  if (n_examples < 1) {
    throw Error(ErrorCode::InvalidArgument, "n_examples must be at least 1");
  }
  const auto n = static_cast<Eigen::Index>(space.object_names().size());
  const auto& hs = space.hypotheses();
  Eigen::MatrixXd directed(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::vector<std::size_t> examples(n_examples, static_cast<std::size_t>(i));
    const PosteriorDistribution post = posterior(space, examples);
    for (Eigen::Index j = 0; j < n; ++j) {
      double mass = 0.0;
      for (std::size_t k = 0; k < hs.size(); ++k) {
        if (hs[k].contains(static_cast<std::size_t>(j))) mass += post.probabilities(static_cast<Eigen::Index>(k));
      }
      directed(i, j) = std::min(mass, 1.0);
    }
  }
  Eigen::MatrixXd cells(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cells(i, i) = directed(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double mid = 0.5 * (directed(i, j) + directed(j, i));
      cells(i, j) = mid;
      cells(j, i) = mid;
    }
  }
  return SimilarityMatrix(space.object_names(), std::move(cells));
}

double planted_weight(WeightLaw law, std::size_t feature_size) {
  const double s = static_cast<double>(feature_size);
  switch (law) {
    case WeightLaw::InverseSize: return 1.0 / s;
    case WeightLaw::InverseSizeSquared: return 1.0 / (s * s);
    case WeightLaw::Uniform: return 1.0;
  }
  return 1.0;
}

namespace {

bool design_has_full_column_rank(const FeatureMatrix& features) {
  const DesignMatrix design = build_design(features);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.cells);
  qr.setThreshold(1e-10);
  return qr.rank() == design.cells.cols();
}

}  // namespace

PlantedDataset plant_dataset(std::size_t n_objects, std::size_t n_features, WeightLaw law, double noise_sd,
                             std::uint64_t seed, const PlantOptions& options) {
  if (n_objects < 3) throw Error(ErrorCode::InvalidArgument, "plant_dataset needs at least 3 objects");
  if (n_features < 2) throw Error(ErrorCode::InvalidArgument, "plant_dataset needs at least 2 features");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sd must be a finite non-negative number");
  }
  if (!(options.feature_probability > 0.0 && options.feature_probability < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "feature_probability must lie in (0, 1)");
  }
  const std::size_t n_pairs = n_objects * (n_objects - 1) / 2;
  if (n_features > n_pairs) {
    throw Error(ErrorCode::RetryLimitExceeded, std::to_string(n_features) + " features cannot have independent " +
                                                   "design columns over only " + std::to_string(n_pairs) + " pairs");
  }

  const auto n = static_cast<Eigen::Index>(n_objects);
  const auto k = static_cast<Eigen::Index>(n_features);
  std::vector<std::string> objects, feature_names;
  for (std::size_t i = 0; i < n_objects; ++i) objects.push_back("o" + std::to_string(i + 1));
  for (std::size_t f = 0; f < n_features; ++f) feature_names.push_back("f" + std::to_string(f + 1));

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(options.feature_probability);
  // Per-column redraw budget; a column of size 2..N-1 is drawn with high probability.
  const std::size_t column_attempts = 10000;

  for (std::size_t attempt = 0; attempt < options.retry_limit; ++attempt) {
    Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      std::size_t tries = 0;
      for (;;) {
        Eigen::Index size = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const bool on = coin(rng);
          cells(i, c) = on ? 1.0 : 0.0;
          size += on ? 1 : 0;
        }
        if (size >= 2 && size <= n - 1) break;
        if (++tries >= column_attempts) {
          throw Error(ErrorCode::RetryLimitExceeded, "could not draw a non-degenerate feature column");
        }
      }
    }
    if (options.cover_all_objects && (cells.rowwise().sum().array() == 0.0).any()) continue;

    FeatureMatrix features(objects, feature_names, std::move(cells));
    if (!design_has_full_column_rank(features)) continue;

    const std::vector<std::size_t> sizes = features.feature_sizes();
    Eigen::VectorXd weights(k);
    for (Eigen::Index c = 0; c < k; ++c) weights(c) = planted_weight(law, sizes[static_cast<std::size_t>(c)]);

    Eigen::MatrixXd s = predict(features, weights).cells();
    if (noise_sd > 0.0) {
      std::normal_distribution<double> noise(0.0, noise_sd);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          s(i, j) += noise(rng);
          s(j, i) = s(i, j);
        }
      }
    }
    SimilarityMatrix similarity(objects, std::move(s));
    return PlantedDataset{std::move(features), std::move(similarity), std::move(weights)};
  }
  throw Error(ErrorCode::RetryLimitExceeded, "no draw with linearly independent design columns after " +
                                                 std::to_string(options.retry_limit) + " attempts");
}

}  // namespace size_lens
