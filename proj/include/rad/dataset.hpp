#ifndef RAD_DATASET_HPP
#define RAD_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rad/linalg.hpp"
#include "rad/model.hpp"

namespace rad {

enum class Label { kNormal, kAttack };

/// A validated multivariate time series: one row per timestamp, one feature
/// column per sensor/actuator. Labels are carried for evaluation only and
/// never participate in training.
struct Dataset {
  Matrix matrix;
  std::vector<std::string> timestamps;          // empty when no timestamp column
  std::optional<std::vector<Label>> labels;
  std::vector<std::string> column_names;        // feature columns, unique
  std::optional<std::string> timestamp_name;
  std::optional<std::string> label_name;
  std::string normal_token = "Normal";
  std::string attack_token = "Attack";
};

struct CsvSchema {
  std::optional<std::string> timestamp_column;
  std::optional<std::string> label_column;
  std::vector<std::string> feature_columns;  // empty: every remaining column
  std::string normal_token = "Normal";
  std::string attack_token = "Attack";
  char delimiter = ',';
};

struct RowDiagnostic {
  Index row = 0;  // 0-based data row index (header excluded)
  std::string message;
};

/// Parses a header-first CSV file. Rows with non-parseable or non-finite
/// features (or unrecognized label tokens) are rejected and reported through
/// `diagnostics`; more than 10% rejected rows is a hard error.
Dataset load_csv(std::istream& in, const CsvSchema& schema,
                 std::vector<RowDiagnostic>* diagnostics = nullptr);
Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 std::vector<RowDiagnostic>* diagnostics = nullptr);

/// Re-exports a dataset with 17-significant-digit feature values, preserving
/// timestamp and label columns when present.
void write_csv(const Dataset& dataset, std::ostream& out);
void write_csv(const Dataset& dataset, const std::string& path);

/// Training-data pollution for robustness experiments: i.i.d. Gaussian noise
/// over every feature entry plus periodic burst outliers on chosen columns.
struct CorruptionSpec {
  double gaussian_sigma = 0.0;
  std::vector<std::string> burst_columns;
  Index burst_period = 25;    // rows between burst starts
  Index burst_length = 1;     // consecutive corrupted rows per burst
  double burst_magnitude = 10.0;  // multiples of the column's stdev
  std::uint64_t seed = 0;
};

/// Returns a corrupted copy; labels and timestamps are untouched. The same
/// seed reproduces the same output bit for bit. Burst offsets use the input
/// column's sample stdev (unit scale for constant columns); bursts start at
/// row 0 and repeat every burst_period rows.
Dataset inject_corruption(const Dataset& dataset, const CorruptionSpec& spec);

struct AttackSegment {
  Index begin = 0;  // half-open [begin, end) in row indices
  Index end = 0;
};

struct SegmentDetection {
  AttackSegment segment;
  std::optional<Index> delay;  // rows from segment start to first ANOMALY; nullopt = missed
};

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double false_alarm_rate = 0.0;  // NORMAL-labeled rows flagged as anomalies
  std::vector<SegmentDetection> segments;
};

/// Contiguous runs of ATTACK labels, in row order.
std::vector<AttackSegment> find_attack_segments(const std::vector<Label>& labels);

/// Row-level precision/recall/F1 plus per-segment detection delay.
/// records[i] pairs with labels[i]; the time axis is records[i].row_index,
/// so any consistent reordering of the pairs yields identical metrics.
/// Zero-denominator precision/recall are reported as 1 (vacuously perfect);
/// F1 is 0 when precision + recall is 0.
DetectionMetrics evaluate(const std::vector<ScoreRecord>& records,
                          const std::vector<Label>& labels,
                          const std::vector<AttackSegment>& segments);
DetectionMetrics evaluate(const std::vector<ScoreRecord>& records,
                          const std::vector<Label>& labels);

/// Per-column robust z-score parameters: (x - center) / scale.
struct ColumnScaler {
  Vector center;
  Vector scale;
};

Matrix apply_scaler(const ColumnScaler& scaler, const Matrix& m);
Vector apply_scaler(const ColumnScaler& scaler, const Vector& x);

struct StandardizeResult {
  Dataset data;
  ColumnScaler scaler;
};

/// Robust standardization: center = column median, scale = 1.4826 * MAD.
/// Columns with zero MAD pass through unchanged (center 0, scale 1).
StandardizeResult standardize(const Dataset& dataset);

}  // namespace rad

#endif  // RAD_DATASET_HPP
