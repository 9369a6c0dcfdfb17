#ifndef RAD_LINALG_HPP
#define RAD_LINALG_HPP

#include <Eigen/Core>

#include "rad/errors.hpp"

namespace rad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thin SVD M = U * diag(singular_values) * V^T with k = min(rows, cols).
/// Singular values are non-negative and sorted non-increasing; U and V are
/// column-orthonormal.
struct SvdFactors {
  Matrix U;
  Vector singular_values;
  Matrix V;
};

/// Column-orthonormal d x r matrix spanning a subspace of R^d.
/// The constructor rejects columns that are not orthonormal to within
/// 1e-9 in Frobenius norm.
class Basis {
 public:
  explicit Basis(Matrix columns);

  const Matrix& columns() const { return columns_; }
  Index dim() const { return columns_.rows(); }
  Index rank() const { return columns_.cols(); }

  /// Orthogonal projection z = A (A^T x). Two matrix-vector products,
  /// O(dim * rank); the d x d projector is never formed.
  Vector project(const Eigen::Ref<const Vector>& x) const;

 private:
  Matrix columns_;
};

/// Shrinkage operator sign(x) * max(|x| - tau, 0).
double soft_threshold(double x, double tau);

/// Elementwise shrinkage of a matrix.
Matrix soft_threshold(const Matrix& m, double tau);

/// Thin SVD of a finite matrix.
SvdFactors thin_svd(const Matrix& m);

/// Singular value thresholding: U * diag(max(sigma_i - tau, 0)) * V^T,
/// the proximal operator of the nuclear norm.
Matrix svt(const Matrix& m, double tau);

/// Orthonormal basis of the row space of `low_rank`, keeping every
/// direction with sigma_i > rank_tol * sigma_1. Throws ValidationError
/// "degenerate low-rank matrix" when sigma_1 < 1e-12.
Basis orthonormal_basis(const Matrix& low_rank, double rank_tol);

/// Modified Gram-Schmidt over the rows of `vectors`, dropping rows whose
/// residual falls below drop_tol * (largest row norm). Returns the surviving
/// directions as orthonormal columns. Used to cross-check the SVD basis.
Matrix modified_gram_schmidt(const Matrix& vectors, double drop_tol);

}  // namespace rad

#endif  // RAD_LINALG_HPP
