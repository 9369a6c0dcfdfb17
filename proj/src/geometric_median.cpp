#include "rad/geometric_median.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rad {

namespace {

Vector coordinate_median(const Matrix& points) {
  const Index n = points.rows();
  Vector median(points.cols());
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Index j = 0; j < points.cols(); ++j) {
    for (Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = points(i, j);
    std::sort(column.begin(), column.end());
    const std::size_t mid = column.size() / 2;
    median(j) = column.size() % 2 == 1
                    ? column[mid]
                    : 0.5 * (column[mid - 1] + column[mid]);
  }
  return median;
}

double objective(const Matrix& points, const Vector& y) {
  double sum = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    sum += (points.row(i).transpose() - y).norm();
  }
  return sum;
}

// RMS pairwise distance via the variance identity, O(n d).
double data_scale(const Matrix& points) {
  const Vector mean = points.colwise().mean();
  double mean_sq = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    mean_sq += (points.row(i).transpose() - mean).squaredNorm();
  }
  mean_sq /= static_cast<double>(points.rows());
  return std::sqrt(2.0 * mean_sq);
}

}  // namespace

MedianResult geometric_median(const Matrix& points, const MedianConfig& config) {
  const Index n = points.rows();
  const Index d = points.cols();
  if (n < 1 || d < 1) {
    throw ValidationError("geometric_median requires a non-empty point set");
  }
  if (!points.allFinite()) {
    throw ValidationError("geometric_median input contains non-finite values");
  }
  if (config.max_iter < 1) {
    throw ValidationError("median max_iter must be positive");
  }
  if (config.tol < 0.0 || config.anchor_eps < 0.0) {
    throw ValidationError("median tol/anchor_eps must be positive (or 0 for auto)");
  }

  MedianResult result;
  if (n == 1) {
    result.point = points.row(0).transpose();
    result.converged = true;
    result.objective_history.push_back(0.0);
    return result;
  }

  const double scale = data_scale(points);
  const double tol = config.tol > 0.0 ? config.tol : 1e-9 * scale;
  const double anchor_eps =
      config.anchor_eps > 0.0
          ? config.anchor_eps
          : std::max(1e-12 * scale, std::numeric_limits<double>::min());

  Vector y = coordinate_median(points);
  result.objective_history.push_back(objective(points, y));

  for (int k = 1; k <= config.max_iter; ++k) {
    double weight_sum = 0.0;
    Vector weighted = Vector::Zero(d);
    Vector pull = Vector::Zero(d);  // sum of unit vectors toward non-anchors
    Index anchors = 0;
    for (Index i = 0; i < n; ++i) {
      const Vector diff = points.row(i).transpose() - y;
      const double dist = diff.norm();
      if (dist < anchor_eps) {
        ++anchors;
        continue;
      }
      const double w = 1.0 / dist;
      weight_sum += w;
      weighted += w * points.row(i).transpose();
      pull += diff * w;
    }

    result.iterations = k;
    if (weight_sum == 0.0) {
      // every point coincides with the iterate
      result.converged = true;
      break;
    }

    Vector next;
    if (anchors > 0) {
      const double pull_norm = pull.norm();
      if (pull_norm <= static_cast<double>(anchors)) {
        // subgradient optimality at a data point (Vardi-Zhang)
        result.converged = true;
        break;
      }
      const double gamma = static_cast<double>(anchors) / pull_norm;
      next = (1.0 - gamma) * (weighted / weight_sum) + gamma * y;
    } else {
      next = weighted / weight_sum;
    }

    const double step = (next - y).norm();
    y = next;
    result.objective_history.push_back(objective(points, y));
    if (step <= tol) {
      result.converged = true;
      break;
    }
  }

  result.point = std::move(y);
  return result;
}

}  // namespace rad
