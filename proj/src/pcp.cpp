#include "rad/pcp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rad {

namespace {

void validate(const PcpConfig& cfg) {
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) {
    throw ValidationError("pcp tol must lie in (0, 1)");
  }
  if (cfg.max_iter < 1) {
    throw ValidationError("pcp max_iter must be positive");
  }
  if (!(cfg.rho >= 1.0)) {
    throw ValidationError("pcp rho must be >= 1");
  }
  if (cfg.lambda < 0.0 || cfg.mu0 < 0.0 || cfg.mu_max < 0.0) {
    throw ValidationError("pcp lambda/mu0/mu_max must be positive (or 0 for auto)");
  }
  if (cfg.mu0 > 0.0 && cfg.mu_max > 0.0 && cfg.mu_max < cfg.mu0) {
    throw ValidationError("pcp mu_max must be >= mu0");
  }
}

}  // namespace

double default_lambda(Index n_rows, Index d) {
  if (n_rows < 1 || d < 1) {
    throw ValidationError("default_lambda requires positive dimensions");
  }
  return 1.0 / std::sqrt(static_cast<double>(std::max(n_rows, d)));
}

PcpResult pcp_decompose(const Matrix& m, const PcpConfig& config) {
  validate(config);
  if (!m.allFinite()) {
    throw InternalError("solver input contains non-finite values");
  }

  const Index n = m.rows();
  const Index d = m.cols();
  const double norm_m = m.norm();
  const Vector sv = thin_svd(m).singular_values;
  const double sigma1 = sv.size() > 0 ? sv(0) : 0.0;

  const double lambda =
      config.lambda > 0.0 ? config.lambda : default_lambda(n, d);
  const double mu0 =
      config.mu0 > 0.0 ? config.mu0 : (sigma1 > 0.0 ? 1.25 / sigma1 : 1.25);
  const double mu_max = config.mu_max > 0.0 ? config.mu_max : 1e7 * mu0;
  if (mu_max < mu0) {
    throw ValidationError("pcp mu_max must be >= mu0");
  }

  // dual scaling of Lin et al.; zero matrix keeps Y = 0
  const double y_scale = std::max(sigma1, m.cwiseAbs().maxCoeff() / lambda);
  Matrix y = y_scale > 0.0 ? Matrix(m / y_scale) : Matrix::Zero(n, d);
  Matrix low_rank = Matrix::Zero(n, d);
  Matrix sparse = Matrix::Zero(n, d);

  PcpResult result;
  result.residual_history.reserve(64);
  result.mu_history.reserve(64);

  double mu = mu0;
  for (int k = 0; k < config.max_iter; ++k) {
    low_rank = svt(m - sparse + y / mu, 1.0 / mu);
    sparse = soft_threshold(m - low_rank + y / mu, lambda / mu);
    const Matrix residual = m - low_rank - sparse;
    y += mu * residual;
    result.mu_history.push_back(mu);
    mu = std::min(config.rho * mu, mu_max);

    const double r = residual.norm();
    if (!std::isfinite(r)) {
      throw InternalError("solver diverged");
    }
    result.residual_history.push_back(r);
    result.iterations = k + 1;
    if (r <= config.tol * norm_m) {
      result.converged = true;
      break;
    }
  }

  result.low_rank = std::move(low_rank);
  result.sparse = std::move(sparse);
  return result;
}

}  // namespace rad
