#pragma once

#include "size_lens/matrices.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace size_lens {

enum class SamplingMode {
  Strong,  // examples drawn uniformly from the true set: p(x | h) = 1/|h|
  Weak,    // consistency only: p(x | h) = 1 when x is in h
};

/// A candidate consequential set, stored as sorted, unique object indices.
class Hypothesis {
 public:
  explicit Hypothesis(std::vector<std::size_t> members);

  const std::vector<std::size_t>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(std::size_t object) const;

 private:
  std::vector<std::size_t> members_;
};

/// Discrete hypothesis space over named objects with a prior over hypotheses.
class HypothesisSpace {
 public:
  /// Priors must be non-negative and sum to 1 within 1e-12.
  HypothesisSpace(std::vector<std::string> object_names, std::vector<Hypothesis> hypotheses,
                  Eigen::VectorXd priors, SamplingMode mode);

  static HypothesisSpace uniform(std::vector<std::string> object_names, std::vector<Hypothesis> hypotheses,
                                 SamplingMode mode);

  /// One hypothesis per non-empty feature column, uniform prior.
  static HypothesisSpace from_features(const FeatureMatrix& features, SamplingMode mode);

  const std::vector<std::string>& object_names() const noexcept { return object_names_; }
  const std::vector<Hypothesis>& hypotheses() const noexcept { return hypotheses_; }
  const Eigen::VectorXd& priors() const noexcept { return priors_; }
  SamplingMode mode() const noexcept { return mode_; }

  /// Throws UnknownObject.
  std::size_t index_of(const std::string& object_name) const;

 private:
  std::vector<std::string> object_names_;
  std::vector<Hypothesis> hypotheses_;
  Eigen::VectorXd priors_;
  SamplingMode mode_;
};

struct PosteriorDistribution {
  Eigen::VectorXd probabilities;      // p(h | X), one entry per hypothesis
  std::vector<std::size_t> examples;  // X as object indices, multiset
  double normalizer = 0.0;            // p(X); may underflow to 0 for long example lists
  double log_normalizer = 0.0;        // log p(X)
};

/// exp(-distance). Throws NegativeDistance.
double shepard_similarity(double distance);

/// (1/|h|)^n under strong sampling, 1 under weak sampling, 0 if any example is outside h.
double likelihood(const Hypothesis& h, std::span<const std::size_t> examples, SamplingMode mode);

/// Throws InconsistentExamples when no positive-prior hypothesis holds every example.
PosteriorDistribution posterior(const HypothesisSpace& space, std::span<const std::size_t> examples);

/// p(target in C | examples): posterior mass of hypotheses containing the target.
double generalize(const HypothesisSpace& space, std::span<const std::size_t> examples, std::size_t target);

/// Cell (i, j) is generalize({i repeated n times}, j), averaged with (j, i).
SimilarityMatrix generalization_matrix(const HypothesisSpace& space, std::size_t n_examples);

enum class WeightLaw { InverseSize, InverseSizeSquared, Uniform };

struct PlantOptions {
  double feature_probability = 0.3;
  std::size_t retry_limit = 200;
  /// Also redraw until every object has at least one feature.
  bool cover_all_objects = false;
};

struct PlantedDataset {
  FeatureMatrix features;
  SimilarityMatrix similarity;
  Eigen::VectorXd weights;
};

/// Planted weight for a feature of the given size.
double planted_weight(WeightLaw law, std::size_t feature_size);

/// Random binary F (Bernoulli columns with 2 <= |h| <= N-1) whose pairwise design
/// has linearly independent columns, planted weights from `law`, and
/// S = F diag(w) F^T plus i.i.d. Gaussian noise on the upper triangle, mirrored.
/// Deterministic given the seed. Throws RetryLimitExceeded.
PlantedDataset plant_dataset(std::size_t n_objects, std::size_t n_features, WeightLaw law, double noise_sd,
                             std::uint64_t seed, const PlantOptions& options = {});

}  // namespace size_lens
