#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace size_lens {

/// min ||A x - b||_2 subject to x >= 0.
struct NnlsProblem {
  Eigen::MatrixXd design;  // A, M x K
  Eigen::VectorXd target;  // b, length M
};

enum class NnlsStatus {
  Converged,
  IterationLimitExceeded,
};

struct NnlsSolution {
  Eigen::VectorXd weights;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  /// Columns with weight > 0 on termination, ascending.
  std::vector<Eigen::Index> active_set;
  NnlsStatus status = NnlsStatus::Converged;
  double kkt_tolerance = 0.0;
  /// Non-fatal diagnostics, e.g. columns dropped as numerically dependent.
  std::vector<std::string> warnings;

  bool converged() const noexcept { return status == NnlsStatus::Converged; }
};

struct NnlsOptions {
  /// Defaults to default_kkt_tolerance(A).
  std::optional<double> kkt_tolerance;
  /// Outer (column-entering) iterations. Defaults to 3K.
  std::optional<std::size_t> max_iterations;
  /// Columns to seed the passive set with, typically a previous active_set.
  std::vector<Eigen::Index> warm_start;
};

/// 1e-10 * (1 + largest column 2-norm of A).
double default_kkt_tolerance(const Eigen::MatrixXd& design);

/// Lawson-Hanson active-set NNLS. The passive-set least-squares subproblems are
/// solved from an incrementally updated thin QR factorization; the final iterate
/// is re-solved with a fresh Householder QR. Deterministic: the entering column
/// is the most violating one, ties broken by lowest index.
///
/// Throws DimensionMismatch / InvalidArgument on malformed problems. Hitting the
/// iteration limit is reported through `status`, with the best iterate returned.
NnlsSolution solve_nnls(const NnlsProblem& problem, const NnlsOptions& options = {});
NnlsSolution solve_nnls(const NnlsProblem& problem, double kkt_tolerance, std::size_t max_iterations);

/// Largest violation of the KKT conditions for g = A^T (A x - b):
/// |g_k| where x_k > 0 and max(0, -g_k) where x_k = 0.
double kkt_residual(const NnlsProblem& problem, const Eigen::VectorXd& weights);

}  // namespace size_lens
