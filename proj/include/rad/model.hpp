#ifndef RAD_MODEL_HPP
#define RAD_MODEL_HPP

#include <string>
#include <string_view>
#include <vector>

#include "rad/geometric_median.hpp"
#include "rad/linalg.hpp"
#include "rad/pcp.hpp"

namespace rad {

/// How the detection threshold is computed from the training pass:
/// LowRankRows uses theta = max_i ||m - L_i||_2 over the rows of the
/// recovered low-rank matrix; ProjectedRows uses the projected training
/// rows z_i instead. The two differ when the sparse part projects
/// nontrivially onto the learned subspace.
enum class ThresholdMode { kLowRankRows, kProjectedRows };

enum class Verdict { kNormal, kAnomaly };

std::string to_string(ThresholdMode mode);
std::string to_string(Verdict verdict);
ThresholdMode parse_threshold_mode(std::string_view text);

struct TrainConfig {
  PcpConfig pcp;
  MedianConfig median;
  double rank_tol = 1e-6;
  ThresholdMode threshold_mode = ThresholdMode::kLowRankRows;
};

/// Where a model came from; echoed into the serialized model file.
struct Provenance {
  Index n_rows = 0;
  Index d = 0;
  Index r = 0;
  PcpConfig pcp;  // resolved values actually used by the solver
  double rank_tol = 0.0;
  std::string data_fingerprint;
  bool solver_converged = true;
  bool median_converged = true;
  bool baseline = false;
};

/// The deployable triplet {A, m, theta}: basis of the stable subspace,
/// geometric median of the projected training rows, and the distance
/// threshold that bounds normal behavior. Immutable once trained; scoring
/// never mutates it, so one model may serve concurrent scorers.
struct RadModel {
  Basis basis;
  Vector median;
  double threshold = 0.0;
  ThresholdMode threshold_mode = ThresholdMode::kLowRankRows;
  Provenance provenance;
};

struct ScoreRecord {
  Index row_index = 0;
  double score = 0.0;
  double normalized = 0.0;  // score / theta; +inf when theta = 0 and score > 0
  Verdict verdict = Verdict::kNormal;
};

/// FNV-1a hash of the matrix dimensions and raw entries, as a hex string.
std::string data_fingerprint(const Matrix& m);

/// Checks the model invariants (orthonormal basis is enforced by Basis;
/// here: median in span, threshold >= 0, consistent dimensions).
void validate_model(const RadModel& model);

/// Convergence telemetry surfaced to callers that report or export it.
struct TrainTelemetry {
  std::vector<double> residual_history;
  int pcp_iterations = 0;
  bool pcp_converged = false;
  int median_iterations = 0;
  bool median_converged = false;
};

/// Full training pass: PCP split, basis extraction, projection of the
/// training rows, geometric median, threshold. PCP or median
/// non-convergence is recorded in provenance, not raised.
RadModel train(const Matrix& m, const TrainConfig& config = {},
               TrainTelemetry* telemetry = nullptr);

/// Non-robust baseline: plain SVD of M in place of PCP's low-rank part and
/// the arithmetic mean in place of the geometric median.
RadModel train_pca_baseline(const Matrix& m, double rank_tol = 1e-6);

/// Anomaly score ||m - A(A^T x)||_2 in O(d * r).
double score(const RadModel& model, const Eigen::Ref<const Vector>& x);

/// Diagnostic distance of x from the subspace, ||x - A(A^T x)||_2.
/// Reported alongside scores; never affects the verdict.
double residual_norm(const RadModel& model, const Eigen::Ref<const Vector>& x);

/// Score plus verdict; anomaly iff score > threshold (strict).
ScoreRecord classify(const RadModel& model, const Eigen::Ref<const Vector>& x,
                     Index row_index = 0);

/// Classify each row of a matrix in row order.
std::vector<ScoreRecord> classify_rows(const RadModel& model, const Matrix& rows);

}  // namespace rad

#endif  // RAD_MODEL_HPP
