#ifndef RAD_PCP_HPP
#define RAD_PCP_HPP

#include <vector>

#include "rad/linalg.hpp"

namespace rad {

/// Parameters of the Principal Component Pursuit solver.
/// Fields set to 0 are resolved from the data:
///   lambda  -> 1/sqrt(max(n_rows, d))
///   mu0     -> 1.25 / sigma_1(M)
///   mu_max  -> 1e7 * mu0
struct PcpConfig {
  double lambda = 0.0;
  double tol = 1e-7;        // stop when ||M - L - S||_F <= tol * ||M||_F
  int max_iter = 10000;
  double mu0 = 0.0;
  double rho = 1.5;         // penalty growth factor, >= 1
  double mu_max = 0.0;
};

struct PcpResult {
  Matrix low_rank;                      // L
  Matrix sparse;                        // S
  int iterations = 0;
  std::vector<double> residual_history; // ||M - L - S||_F after each iteration
  std::vector<double> mu_history;       // penalty value used in each iteration
  bool converged = false;
};

/// Standard PCP sparsity weight 1/sqrt(max(n_rows, d)).
double default_lambda(Index n_rows, Index d);

/// Solve min ||L||_* + lambda ||S||_1  s.t.  L + S = M by the inexact
/// augmented Lagrangian method:
///   L <- svt(M - S + Y/mu, 1/mu)
///   S <- soft_threshold(M - L + Y/mu, lambda/mu)
///   Y <- Y + mu (M - L - S)
///   mu <- min(rho * mu, mu_max)
/// Non-convergence within max_iter returns converged = false; a non-finite
/// iterate raises InternalError("solver diverged").
PcpResult pcp_decompose(const Matrix& m, const PcpConfig& config = {});

}  // namespace rad

#endif  // RAD_PCP_HPP
