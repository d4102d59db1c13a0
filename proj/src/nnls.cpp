#include "size_lens/nnls.hpp"

#include "size_lens/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Jacobi>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace size_lens {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// A column whose component orthogonal to the passive span is below this
// fraction of its norm is treated as linearly dependent.
constexpr double kDependenceTolerance = 1e-10;
// A second Gram-Schmidt pass runs when the first keeps less than this fraction
// of the norm.
constexpr double kReorthogonalize = 0.7071067811865476;
// Designs at most this dense get a sparse copy for gradient evaluation.
constexpr double kSparseDensity = 0.1;

/// Thin QR factorization A_P = Q R of the passive columns, updated one column at
/// a time. Appends use classical Gram-Schmidt, reorthogonalized when the first
/// pass cancels heavily; deletions restore triangularity with Givens rotations.
/// Q^T b is carried along so solves cost O(p^2).
class PassiveQr {
 public:
  PassiveQr(const MatrixXd& design, const VectorXd& target) : design_(design), target_(target) {}

  Index size() const noexcept { return static_cast<Index>(columns_.size()); }
  const std::vector<Index>& columns() const noexcept { return columns_; }

  bool append(Index column) {
    const Index m = design_.rows();
    const Index p = size();
    if (p >= m) return false;
    VectorXd v = design_.col(column);
    const double norm = v.norm();
    if (norm == 0.0) return false;
    VectorXd coeffs = VectorXd::Zero(p);
    double rho = norm;
    if (p > 0) {
      const auto q = q_.leftCols(p);
      for (int pass = 0; pass < 2; ++pass) {
        const VectorXd c = q.transpose() * v;
        v.noalias() -= q * c;
        coeffs += c;
        const double before = rho;
        rho = v.norm();
        if (rho > kReorthogonalize * before) break;
      }
    }
    if (!(rho > kDependenceTolerance * norm)) return false;

    reserve(p + 1);
    q_.col(p) = v / rho;
    r_.col(p).head(p) = coeffs;
    r_.row(p).head(p).setZero();
    r_(p, p) = rho;
    qtb_(p) = q_.col(p).dot(target_);
    columns_.push_back(column);
    return true;
  }

  void remove(Index position) {
    const Index p = size();
    for (Index c = position; c + 1 < p; ++c) r_.col(c).head(p) = r_.col(c + 1).head(p);
    r_.col(p - 1).head(p).setZero();
    for (Index k = position; k + 1 < p; ++k) {
      Eigen::JacobiRotation<double> g;
      g.makeGivens(r_(k, k), r_(k + 1, k));
      r_.topLeftCorner(p, p).applyOnTheLeft(k, k + 1, g.adjoint());
      qtb_.head(p).applyOnTheLeft(k, k + 1, g.adjoint());
      q_.leftCols(p).applyOnTheRight(k, k + 1, g);
      r_(k + 1, k) = 0.0;
    }
    r_.row(p - 1).head(p).setZero();
    qtb_(p - 1) = 0.0;
    columns_.erase(columns_.begin() + position);
  }

  /// Least-squares coefficients for the passive columns, in columns() order.
  VectorXd solve() const {
    const Index p = size();
    if (p == 0) return VectorXd();
    VectorXd c = qtb_.head(p);
    r_.topLeftCorner(p, p).triangularView<Eigen::Upper>().solveInPlace(c);
    return c;
  }

 private:
  void reserve(Index needed) {
    if (needed <= q_.cols()) return;
    const Index cap = std::min<Index>(std::max<Index>(needed, 2 * q_.cols()),
                                      std::min(design_.rows(), design_.cols()));
    const Index old = q_.cols();
    q_.conservativeResize(design_.rows(), cap);
    r_.conservativeResize(cap, cap);
    q_.rightCols(cap - old).setZero();
    r_.rightCols(cap - old).setZero();
    r_.bottomRows(cap - old).setZero();
    qtb_.conservativeResize(cap);
    qtb_.tail(cap - old).setZero();
  }

  const MatrixXd& design_;
  const VectorXd& target_;
  MatrixXd q_;
  MatrixXd r_;
  VectorXd qtb_;
  std::vector<Index> columns_;
};

void validate(const NnlsProblem& problem) {
  const auto& a = problem.design;
  const auto& b = problem.target;
  if (a.rows() < 1 || a.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "NNLS design must be at least 1x1");
  }
  if (a.rows() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "NNLS design has " + std::to_string(a.rows()) +
                                                  " rows but target has " + std::to_string(b.size()) + " entries");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "NNLS inputs must be finite");
  }
}

VectorXd residual(const NnlsProblem& problem, const VectorXd& x, const std::vector<Index>& support) {
  VectorXd r = problem.target;
  for (Index j : support) r.noalias() -= x(j) * problem.design.col(j);
  return r;
}

std::vector<Index> positive_support(const VectorXd& x) {
  std::vector<Index> support;
  for (Index k = 0; k < x.size(); ++k) {
    if (x(k) > 0.0) support.push_back(k);
  }
  return support;
}

/// Re-solves the passive subproblem from scratch; returns false if the fresh
/// solution is not strictly positive.
bool polish(const NnlsProblem& problem, VectorXd& x) {
  const std::vector<Index> support = positive_support(x);
  if (support.empty()) return false;
  MatrixXd sub(problem.design.rows(), static_cast<Index>(support.size()));
  for (std::size_t t = 0; t < support.size(); ++t) sub.col(static_cast<Index>(t)) = problem.design.col(support[t]);
  const VectorXd z = sub.householderQr().solve(problem.target);
  if (!z.allFinite() || (z.array() <= 0.0).any()) return false;
  for (std::size_t t = 0; t < support.size(); ++t) x(support[t]) = z(static_cast<Index>(t));
  return true;
}

}  // namespace

double default_kkt_tolerance(const Eigen::MatrixXd& design) {
  const double max_norm = design.cols() > 0 ? design.colwise().norm().maxCoeff() : 0.0;
  return 1e-10 * (1.0 + max_norm);
}

double kkt_residual(const NnlsProblem& problem, const Eigen::VectorXd& weights) {
  validate(problem);
  if (weights.size() != problem.design.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "weights have length " + std::to_string(weights.size()) +
                                                  ", expected " + std::to_string(problem.design.cols()));
  }
  if ((weights.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "KKT residual is defined for non-negative weights only");
  }
  const VectorXd gradient = problem.design.transpose() * (problem.design * weights - problem.target);
  double worst = 0.0;
  for (Index k = 0; k < weights.size(); ++k) {
    const double violation = weights(k) > 0.0 ? std::abs(gradient(k)) : std::max(0.0, -gradient(k));
    worst = std::max(worst, violation);
  }
  return worst;
}

NnlsSolution solve_nnls(const NnlsProblem& problem, double kkt_tolerance, std::size_t max_iterations) {
  NnlsOptions options;
  options.kkt_tolerance = kkt_tolerance;
  options.max_iterations = max_iterations;
  return solve_nnls(problem, options);
}

NnlsSolution solve_nnls(const NnlsProblem& problem, const NnlsOptions& options) {
  validate(problem);
  const MatrixXd& a = problem.design;
  const VectorXd& b = problem.target;
  const Index k_cols = a.cols();

  const double tol = options.kkt_tolerance.value_or(default_kkt_tolerance(a));
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw Error(ErrorCode::InvalidArgument, "kkt_tolerance must be positive and finite");
  }
  const std::size_t max_iterations = options.max_iterations.value_or(3 * static_cast<std::size_t>(k_cols));

  NnlsSolution out;
  out.kkt_tolerance = tol;
  VectorXd x = VectorXd::Zero(k_cols);
  std::vector<char> passive(k_cols, 0);
  std::vector<char> blocked(k_cols, 0);
  std::vector<char> recently_removed(k_cols, 0);
  PassiveQr qr(a, b);
  std::optional<Eigen::SparseMatrix<double>> sparse;
  if (static_cast<double>((a.array() != 0.0).count()) <= kSparseDensity * static_cast<double>(a.size())) {
    sparse = a.sparseView();
  }

  auto drop = [&](Index position) {
    const Index column = qr.columns()[position];
    x(column) = 0.0;
    passive[column] = 0;
    qr.remove(position);
    return column;
  };

  if (!options.warm_start.empty()) {
    std::vector<Index> seed = options.warm_start;
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    for (Index j : seed) {
      if (j < 0 || j >= k_cols) {
        throw Error(ErrorCode::InvalidArgument, "warm-start column " + std::to_string(j) + " is out of range");
      }
      if (qr.append(j)) {
        passive[j] = 1;
      } else {
        out.warnings.push_back("warm-start column " + std::to_string(j) + " is linearly dependent; skipped");
      }
    }
    // Shrink the seed until its unconstrained solution is strictly positive.
    for (;;) {
      const VectorXd z = qr.solve();
      bool all_positive = true;
      for (Index t = qr.size() - 1; t >= 0; --t) {
        if (!(z(t) > 0.0)) {
          all_positive = false;
          drop(t);
        }
      }
      if (all_positive) {
        for (Index t = 0; t < qr.size(); ++t) x(qr.columns()[t]) = z(t);
        break;
      }
    }
  }

  bool polished = false;
  for (;;) {
    VectorXd dual;  // negative gradient
    if (sparse) {
      const VectorXd r = b - *sparse * x;
      dual = sparse->transpose() * r;
    } else {
      std::vector<Index> support(qr.columns().begin(), qr.columns().end());
      dual = a.transpose() * residual(problem, x, support);
    }

    // Most violating column; prefer columns that did not just leave the passive set.
    Index entering = -1;
    Index fallback = -1;
    for (Index j = 0; j < k_cols; ++j) {
      if (passive[j] || blocked[j] || !(dual(j) > tol)) continue;
      if (recently_removed[j]) {
        if (fallback < 0 || dual(j) > dual(fallback)) fallback = j;
      } else if (entering < 0 || dual(j) > dual(entering)) {
        entering = j;
      }
    }
    if (entering < 0) entering = fallback;

    if (entering < 0) {
      if (!polished && polish(problem, x)) {
        polished = true;
        continue;
      }
      break;
    }
    polished = false;

    if (out.iterations >= max_iterations) {
      out.status = NnlsStatus::IterationLimitExceeded;
      break;
    }
    ++out.iterations;
    std::fill(recently_removed.begin(), recently_removed.end(), 0);

    if (!qr.append(entering)) {
      blocked[entering] = 1;
      out.warnings.push_back("column " + std::to_string(entering) +
                             " is numerically dependent on the passive set; dropped");
      continue;
    }
    passive[entering] = 1;

    for (bool first = true;; first = false) {
      const VectorXd z = qr.solve();
      const Index p = qr.size();
      if (first && !(z(p - 1) > 0.0)) {
        // Theory guarantees a positive coefficient; a non-positive one means the
        // subproblem is too ill-conditioned to make progress with this column.
        drop(p - 1);
        blocked[entering] = 1;
        out.warnings.push_back("column " + std::to_string(entering) +
                               " produced a non-positive coefficient on entry; dropped");
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      Index limiting = -1;
      for (Index t = 0; t < p; ++t) {
        if (z(t) > 0.0) continue;
        const double xt = x(qr.columns()[t]);
        const double step = xt / (xt - z(t));
        if (step < alpha) {
          alpha = step;
          limiting = t;
        }
      }
      if (limiting < 0) {
        for (Index t = 0; t < p; ++t) x(qr.columns()[t]) = z(t);
        break;
      }
      for (Index t = 0; t < p; ++t) {
        const Index c = qr.columns()[t];
        x(c) += alpha * (z(t) - x(c));
      }
      x(qr.columns()[limiting]) = 0.0;
      for (Index t = p - 1; t >= 0; --t) {
        if (!(x(qr.columns()[t]) > 0.0)) recently_removed[drop(t)] = 1;
      }
      std::fill(blocked.begin(), blocked.end(), 0);
    }
  }

  for (Index k = 0; k < k_cols; ++k) {
    if (!(x(k) > 0.0)) x(k) = 0.0;
  }
  out.active_set = positive_support(x);
  out.residual_norm = residual(problem, x, out.active_set).norm();
  out.weights = std::move(x);
  return out;
}

}  // namespace size_lens
