#include "rad/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace rad {

namespace {

constexpr double kDegenerateSigma = 1e-12;
constexpr double kOrthonormalityTol = 1e-9;

}  // namespace

Basis::Basis(Matrix columns) : columns_(std::move(columns)) {
  const Index d = columns_.rows();
  const Index r = columns_.cols();
  if (r < 1 || r > d) {
    throw ValidationError("basis must have 1 <= rank <= dim, got dim " +
                          std::to_string(d) + " rank " + std::to_string(r));
  }
  const Matrix gram = columns_.transpose() * columns_;
  const double dev = (gram - Matrix::Identity(r, r)).norm();
  if (!(dev <= kOrthonormalityTol)) {
    throw ValidationError("basis columns are not orthonormal (||A^T A - I||_F = " +
                          std::to_string(dev) + ")");
  }
}

Vector Basis::project(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) {
    throw ValidationError("projection dimension mismatch: basis dim " +
                          std::to_string(dim()) + ", vector dim " +
                          std::to_string(x.size()));
  }
  return columns_ * (columns_.transpose() * x);
}

double soft_threshold(double x, double tau) {
  const double magnitude = std::abs(x) - tau;
  if (magnitude <= 0.0) return 0.0;
  return x < 0.0 ? -magnitude : magnitude;
}

Matrix soft_threshold(const Matrix& m, double tau) {
  return m.unaryExpr([tau](double v) { return soft_threshold(v, tau); });
}

SvdFactors thin_svd(const Matrix& m) {
  if (!m.allFinite()) {
    throw InternalError("SVD input contains non-finite values");
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdFactors{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Matrix svt(const Matrix& m, double tau) {
  if (tau < 0.0) {
    throw ValidationError("svt threshold must be non-negative");
  }
  SvdFactors f = thin_svd(m);
  Vector shrunk = f.singular_values.unaryExpr(
      [tau](double s) { return soft_threshold(s, tau); });
  return f.U * shrunk.asDiagonal() * f.V.transpose();
}

Basis orthonormal_basis(const Matrix& low_rank, double rank_tol) {
  if (!(rank_tol > 0.0)) {
    throw ValidationError("rank_tol must be positive");
  }
  SvdFactors f = thin_svd(low_rank);
  const double sigma1 = f.singular_values.size() > 0 ? f.singular_values(0) : 0.0;
  if (sigma1 < kDegenerateSigma) {
    throw ValidationError("degenerate low-rank matrix");
  }
  Index r = 0;
  while (r < f.singular_values.size() &&
         f.singular_values(r) > rank_tol * sigma1) {
    ++r;
  }
  return Basis(f.V.leftCols(r));
}

Matrix modified_gram_schmidt(const Matrix& vectors, double drop_tol) {
  const Index n = vectors.rows();
  const Index d = vectors.cols();
  double max_norm = 0.0;
  for (Index i = 0; i < n; ++i) {
    max_norm = std::max(max_norm, vectors.row(i).norm());
  }
  if (max_norm < kDegenerateSigma) {
    throw ValidationError("degenerate low-rank matrix");
  }
  Matrix q(d, std::min(n, d));
  Index kept = 0;
  for (Index i = 0; i < n && kept < q.cols(); ++i) {
    Vector v = vectors.row(i).transpose();
    for (Index j = 0; j < kept; ++j) {
      v -= q.col(j).dot(v) * q.col(j);
    }
    // second pass guards against cancellation in near-dependent rows
    for (Index j = 0; j < kept; ++j) {
      v -= q.col(j).dot(v) * q.col(j);
    }
    const double norm = v.norm();
    if (norm > drop_tol * max_norm) {
      q.col(kept++) = v / norm;
    }
  }
  return q.leftCols(kept);
}

}  // namespace rad
