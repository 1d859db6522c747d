// Low-rank + sparse decomposition via alternating proximal minimization of
//   F(L, S) = ||M - L - S||_F^2 + lambda_L ||L||_* + lambda_S ||vec(S)||_1.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace blindcen {

struct SolverConfig {
  double lambda_L = 0.1;
  double lambda_S = 0.4;
  int max_iters = 500;
  double tol = 1e-8;     // relative objective decrease
  double fp_tol = 1e-8;  // max Frobenius movement of either block
  double beta = 0.1;     // one-sided quantization threshold

  // lambda_S = 0.2 + 2/sqrt(k) for a k-column sparse block.
  static SolverConfig scaled_defaults(int k) {
    if (k < 1) throw std::invalid_argument("scaled_defaults: k must be >= 1");
    SolverConfig cfg;
    cfg.lambda_S = 0.2 + 2.0 / std::sqrt(static_cast<double>(k));
    return cfg;
  }
};

// Entrywise shrink toward zero: sign(x) * max(|x| - tau, 0).
template <typename Derived>
Eigen::MatrixXd soft_threshold(const Eigen::MatrixBase<Derived>& m,
                               double tau) {
  if (!(tau >= 0.0))
    throw std::invalid_argument("soft_threshold: tau must be >= 0");
  return m.derived().unaryExpr([tau](double x) {
    const double mag = std::abs(x) - tau;
    return mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
  });
}

// One-sided keep: x if x >= beta, else 0. Entries below beta (including all
// negative entries) are discarded, values kept are passed through unscaled.
template <typename Derived>
Eigen::MatrixXd threshold_sparse(const Eigen::MatrixBase<Derived>& m,
                                 double beta) {
  return m.derived().unaryExpr(
      [beta](double x) { return x >= beta ? x : 0.0; });
}

// Singular value thresholding: U * soft_threshold(Sigma, tau) * V^T, built
// from the singular triplets whose value exceeds tau.
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau);

struct Decomposition {
  Eigen::MatrixXd L_hat;
  Eigen::MatrixXd S_hat;
  std::vector<double> objective_trace;  // F after each sweep; [0] is F(0,0)
  int iterations = 0;
  bool converged = false;

  double final_objective() const { return objective_trace.back(); }
};

// Exact block-coordinate descent: L <- svt(M - S, lambda_L/2) then
// S <- soft_threshold(M - L, lambda_S/2), repeated until both the relative
// objective decrease falls below tol and the larger block movement falls
// below fp_tol, or max_iters is hit.
Decomposition decompose(const Eigen::MatrixXd& m, const SolverConfig& cfg);

// F(L, S) evaluated from scratch (independent of the solver's running tally).
double decomposition_objective(const Eigen::MatrixXd& m,
                               const Eigen::MatrixXd& l,
                               const Eigen::MatrixXd& s,
                               const SolverConfig& cfg);

}  // namespace blindcen
