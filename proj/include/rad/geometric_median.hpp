#ifndef RAD_GEOMETRIC_MEDIAN_HPP
#define RAD_GEOMETRIC_MEDIAN_HPP

#include <vector>

#include "rad/linalg.hpp"

namespace rad {

/// Parameters of the Weiszfeld iteration. Fields set to 0 are resolved
/// from the data scale (RMS pairwise distance):
///   tol        -> 1e-9 * scale   (stop when ||y_{k+1} - y_k|| <= tol)
///   anchor_eps -> 1e-12 * scale  (iterate-on-data-point guard)
struct MedianConfig {
  double tol = 0.0;
  int max_iter = 1000;
  double anchor_eps = 0.0;
};

struct MedianResult {
  Vector point;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // sum of distances at each iterate
};

/// Geometric median arg min_y sum_i ||points.row(i) - y||_2 by the Weiszfeld
/// iteration with the Vardi-Zhang step when an iterate lands on a data point.
/// Starts from the coordinate-wise median; n = 1 returns the point, n = 2
/// returns the midpoint. max_iter exhaustion returns the best iterate with
/// converged = false.
MedianResult geometric_median(const Matrix& points, const MedianConfig& config = {});

}  // namespace rad

#endif  // RAD_GEOMETRIC_MEDIAN_HPP
