#ifndef RAD_TESTS_SUPPORT_HPP
#define RAD_TESTS_SUPPORT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rad/linalg.hpp"

namespace radtest {

inline rad::Matrix random_matrix(rad::Index rows, rad::Index cols,
                                 unsigned seed, double sigma = 1.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  rad::Matrix m(rows, cols);
  for (rad::Index i = 0; i < rows; ++i) {
    for (rad::Index j = 0; j < cols; ++j) m(i, j) = normal(gen);
  }
  return m;
}

inline rad::Vector random_vector(rad::Index size, unsigned seed,
                                 double sigma = 1.0) {
  return random_matrix(size, 1, seed, sigma).col(0);
}

/// Uniform entries in [lo, hi]; used for fixtures whose SVD factors must stay
/// non-spiky (every |U V^T| entry safely below the PCP dual bound lambda).
inline rad::Matrix bounded_matrix(rad::Index rows, rad::Index cols,
                                  unsigned seed, double lo = 0.7,
                                  double hi = 1.3) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  rad::Matrix m(rows, cols);
  for (rad::Index i = 0; i < rows; ++i) {
    for (rad::Index j = 0; j < cols; ++j) m(i, j) = uniform(gen);
  }
  return m;
}

/// Random sign flips applied columnwise, keeping magnitudes bounded.
inline rad::Matrix bounded_signed_matrix(rad::Index rows, rad::Index cols,
                                         unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> uniform(0.7, 1.3);
  std::bernoulli_distribution flip(0.5);
  rad::Matrix m(rows, cols);
  for (rad::Index i = 0; i < rows; ++i) {
    for (rad::Index j = 0; j < cols; ++j) {
      m(i, j) = uniform(gen) * (flip(gen) ? -1.0 : 1.0);
    }
  }
  return m;
}

/// Column-orthonormal basis of a random r-dimensional subspace of R^d.
inline rad::Matrix random_orthonormal(rad::Index d, rad::Index r, unsigned seed) {
  const rad::Matrix g = random_matrix(d, r, seed);
  Eigen::HouseholderQR<rad::Matrix> qr(g);
  rad::Matrix q = qr.householderQ() * rad::Matrix::Identity(d, r);
  return q;
}

/// Largest principal angle between the spans of two column-orthonormal
/// matrices, computed as asin of the projector-difference spectral norm.
/// Equals the classical largest principal angle for equal ranks and
/// reports pi/2 when one span has a direction orthogonal to the other.
inline double largest_principal_angle(const rad::Matrix& a, const rad::Matrix& b) {
  const rad::Matrix diff = a * a.transpose() - b * b.transpose();
  Eigen::BDCSVD<rad::Matrix> svd(diff);
  const double s = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

/// rank-2 low-rank part plus 5% uniformly placed +-5 stdev spikes
struct PlantedPcp {
  rad::Matrix m;
  rad::Matrix low_rank;
  rad::Matrix sparse;
  std::vector<rad::Index> support;
};

inline PlantedPcp planted_pcp_instance(unsigned seed, rad::Index n = 200,
                                       rad::Index d = 50) {
  const rad::Matrix u = random_matrix(n, 2, seed);
  const rad::Matrix v = random_matrix(d, 2, seed + 1);
  PlantedPcp out;
  out.low_rank = u * v.transpose();

  const double mean = out.low_rank.mean();
  const double stdev = std::sqrt((out.low_rank.array() - mean).square().mean());

  std::vector<rad::Index> cells(static_cast<std::size_t>(n * d));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i] = static_cast<rad::Index>(i);
  }
  std::mt19937 gen(seed + 2);
  std::shuffle(cells.begin(), cells.end(), gen);
  const std::size_t k = static_cast<std::size_t>(0.05 * n * d);
  out.support.assign(cells.begin(), cells.begin() + static_cast<long>(k));

  out.sparse = rad::Matrix::Zero(n, d);
  std::bernoulli_distribution flip(0.5);
  for (const rad::Index cell : out.support) {
    out.sparse(cell / d, cell % d) = (flip(gen) ? 5.0 : -5.0) * stdev;
  }
  out.m = out.low_rank + out.sparse;
  return out;
}

inline double median_objective(const rad::Matrix& points, const rad::Vector& y) {
  double sum = 0.0;
  for (rad::Index i = 0; i < points.rows(); ++i) {
    sum += (points.row(i).transpose() - y).norm();
  }
  return sum;
}

/// Grid search over the bounding box, zoomed repeatedly around the best cell,
/// then polished with subgradient descent. Independent of the Weiszfeld path.
inline rad::Vector oracle_median_2d(const rad::Matrix& points) {
  rad::Vector lo = points.colwise().minCoeff();
  rad::Vector hi = points.colwise().maxCoeff();
  rad::Vector best = 0.5 * (lo + hi);
  double best_f = median_objective(points, best);
  double half = 0.5 * std::max({hi(0) - lo(0), hi(1) - lo(1), 1e-12});

  for (int round = 0; round < 40; ++round) {
    const rad::Vector center = best;
    for (int a = -10; a <= 10; ++a) {
      for (int b = -10; b <= 10; ++b) {
        rad::Vector candidate(2);
        candidate << center(0) + half * a / 10.0, center(1) + half * b / 10.0;
        const double f = median_objective(points, candidate);
        if (f < best_f) {
          best_f = f;
          best = candidate;
        }
      }
    }
    half *= 0.35;
  }

  double step = 1e-6 * std::max(1.0, (hi - lo).norm());
  for (int iter = 0; iter < 200; ++iter) {
    rad::Vector g = rad::Vector::Zero(2);
    for (rad::Index i = 0; i < points.rows(); ++i) {
      const rad::Vector diff = best - points.row(i).transpose();
      const double dist = diff.norm();
      if (dist > 1e-15) g += diff / dist;
    }
    const rad::Vector candidate = best - step * g;
    const double f = median_objective(points, candidate);
    if (f < best_f) {
      best_f = f;
      best = candidate;
    } else {
      step *= 0.5;
    }
  }
  return best;
}

/// Independent SVD oracle: eigen-decomposition of M^T M gives V and the
/// squared singular values; never touches the BDCSVD path under test.
struct OracleSvd {
  rad::Vector singular_values;  // sorted non-increasing
  rad::Matrix v;
};

inline OracleSvd oracle_svd(const rad::Matrix& m) {
  const rad::Matrix gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<rad::Matrix> eig(gram);
  const rad::Index k = gram.rows();
  OracleSvd out;
  out.singular_values.resize(k);
  out.v.resize(k, k);
  for (rad::Index i = 0; i < k; ++i) {
    const double ev = std::max(0.0, eig.eigenvalues()(k - 1 - i));
    out.singular_values(i) = std::sqrt(ev);
    out.v.col(i) = eig.eigenvectors().col(k - 1 - i);
  }
  return out;
}

}  // namespace radtest

#endif  // RAD_TESTS_SUPPORT_HPP
