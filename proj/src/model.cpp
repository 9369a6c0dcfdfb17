#include "rad/model.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

namespace rad {

std::string to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kLowRankRows ? "low_rank_rows" : "projected_rows";
}

std::string to_string(Verdict verdict) {
  return verdict == Verdict::kNormal ? "NORMAL" : "ANOMALY";
}

ThresholdMode parse_threshold_mode(std::string_view text) {
  if (text == "low_rank_rows") return ThresholdMode::kLowRankRows;
  if (text == "projected_rows") return ThresholdMode::kProjectedRows;
  throw ValidationError("unknown threshold_mode: " + std::string(text));
}

std::string data_fingerprint(const Matrix& m) {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ull;
    }
  };
  const std::int64_t rows = m.rows();
  const std::int64_t cols = m.cols();
  mix(&rows, sizeof(rows));
  mix(&cols, sizeof(cols));
  mix(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

void validate_model(const RadModel& model) {
  if (model.median.size() != model.basis.dim()) {
    throw ValidationError("model median dimension does not match basis");
  }
  if (!(model.threshold >= 0.0)) {
    throw ValidationError("model threshold must be non-negative");
  }
  const double off = (model.median - model.basis.project(model.median)).norm();
  if (!(off <= 1e-8 * (1.0 + model.median.norm()))) {
    throw ValidationError("model median does not lie in the basis span");
  }
}

namespace {

Matrix project_rows(const Basis& basis, const Matrix& rows) {
  // Z = (X A) A^T, row-wise equivalent of z_i = A (A^T x_i)
  return (rows * basis.columns()) * basis.columns().transpose();
}

double max_row_distance(const Matrix& rows, const Vector& center) {
  double max_dist = 0.0;
  for (Index i = 0; i < rows.rows(); ++i) {
    max_dist = std::max(max_dist, (rows.row(i).transpose() - center).norm());
  }
  return max_dist;
}

}  // namespace

RadModel train(const Matrix& m, const TrainConfig& config,
               TrainTelemetry* telemetry) {
  if (m.rows() < 2) {
    throw ValidationError("training requires at least 2 rows");
  }

  PcpResult pcp = pcp_decompose(m, config.pcp);
  Basis basis = orthonormal_basis(pcp.low_rank, config.rank_tol);
  const Matrix projected = project_rows(basis, m);
  MedianResult med = geometric_median(projected, config.median);

  if (telemetry != nullptr) {
    telemetry->residual_history = pcp.residual_history;
    telemetry->pcp_iterations = pcp.iterations;
    telemetry->pcp_converged = pcp.converged;
    telemetry->median_iterations = med.iterations;
    telemetry->median_converged = med.converged;
  }

  double threshold = 0.0;
  if (config.threshold_mode == ThresholdMode::kLowRankRows) {
    threshold = max_row_distance(pcp.low_rank, med.point);
  } else {
    // recompute the projections through the scoring path, so every training
    // row satisfies score(x_i) <= theta bitwise
    for (Index i = 0; i < m.rows(); ++i) {
      const double dist =
          (med.point - basis.project(m.row(i).transpose())).norm();
      threshold = std::max(threshold, dist);
    }
  }
  // reconstruction dust on degenerate data (all rows identical) is not a
  // meaningful radius; collapse it so the theta = 0 convention applies
  if (threshold <= 1e-12 * (1.0 + med.point.norm())) threshold = 0.0;

  Provenance prov;
  prov.n_rows = m.rows();
  prov.d = m.cols();
  prov.r = basis.rank();
  prov.pcp = config.pcp;
  prov.pcp.lambda = config.pcp.lambda > 0.0 ? config.pcp.lambda
                                            : default_lambda(m.rows(), m.cols());
  prov.rank_tol = config.rank_tol;
  prov.data_fingerprint = data_fingerprint(m);
  prov.solver_converged = pcp.converged;
  prov.median_converged = med.converged;
  prov.baseline = false;

  RadModel model{std::move(basis), std::move(med.point), threshold,
                 config.threshold_mode, std::move(prov)};
  validate_model(model);
  return model;
}

RadModel train_pca_baseline(const Matrix& m, double rank_tol) {
  if (m.rows() < 2) {
    throw ValidationError("training requires at least 2 rows");
  }

  Basis basis = orthonormal_basis(m, rank_tol);
  const Vector mean = m.colwise().mean().transpose();
  Vector center = basis.project(mean);
  double threshold = max_row_distance(m, center);
  if (threshold <= 1e-12 * (1.0 + center.norm())) threshold = 0.0;

  Provenance prov;
  prov.n_rows = m.rows();
  prov.d = m.cols();
  prov.r = basis.rank();
  prov.rank_tol = rank_tol;
  prov.data_fingerprint = data_fingerprint(m);
  prov.baseline = true;

  RadModel model{std::move(basis), std::move(center), threshold,
                 ThresholdMode::kLowRankRows, std::move(prov)};
  validate_model(model);
  return model;
}

double score(const RadModel& model, const Eigen::Ref<const Vector>& x) {
  return (model.median - model.basis.project(x)).norm();
}

double residual_norm(const RadModel& model, const Eigen::Ref<const Vector>& x) {
  return (x - model.basis.project(x)).norm();
}

ScoreRecord classify(const RadModel& model, const Eigen::Ref<const Vector>& x,
                     Index row_index) {
  ScoreRecord record;
  record.row_index = row_index;
  record.score = score(model, x);
  if (model.threshold > 0.0) {
    record.normalized = record.score / model.threshold;
  } else {
    record.normalized = record.score == 0.0
                            ? 0.0
                            : std::numeric_limits<double>::infinity();
  }
  record.verdict = record.score > model.threshold ? Verdict::kAnomaly
                                                  : Verdict::kNormal;
  return record;
}

std::vector<ScoreRecord> classify_rows(const RadModel& model, const Matrix& rows) {
  std::vector<ScoreRecord> records;
  records.reserve(static_cast<std::size_t>(rows.rows()));
  for (Index i = 0; i < rows.rows(); ++i) {
    records.push_back(classify(model, rows.row(i).transpose(), i));
  }
  return records;
}

}  // namespace rad
