#include "rad/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace rad {

namespace {

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

bool parse_double(const std::string& text, double* out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end && std::isfinite(*out);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

double column_stdev(const Matrix& m, Index j) {
  const Index n = m.rows();
  if (n < 2) return 0.0;
  const double mean = m.col(j).mean();
  const double ss = (m.col(j).array() - mean).square().sum();
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double vector_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

Dataset load_csv(std::istream& in, const CsvSchema& schema,
                 std::vector<RowDiagnostic>* diagnostics) {
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw ValidationError("empty file: missing header row");
  }
  const std::vector<std::string> header = split_line(header_line, schema.delimiter);

  std::unordered_map<std::string, Index> column_index;
  for (Index i = 0; i < static_cast<Index>(header.size()); ++i) {
    if (!column_index.emplace(header[static_cast<std::size_t>(i)], i).second) {
      throw ValidationError("duplicate column in header: " +
                            header[static_cast<std::size_t>(i)]);
    }
  }

  auto require_column = [&](const std::string& name) -> Index {
    const auto it = column_index.find(name);
    if (it == column_index.end()) {
      throw ValidationError("missing column: " + name);
    }
    return it->second;
  };

  std::optional<Index> ts_index;
  if (schema.timestamp_column) ts_index = require_column(*schema.timestamp_column);
  std::optional<Index> label_index;
  if (schema.label_column) label_index = require_column(*schema.label_column);

  std::vector<Index> feature_indices;
  std::vector<std::string> feature_names;
  if (schema.feature_columns.empty()) {
    for (Index i = 0; i < static_cast<Index>(header.size()); ++i) {
      if (ts_index && *ts_index == i) continue;
      if (label_index && *label_index == i) continue;
      feature_indices.push_back(i);
      feature_names.push_back(header[static_cast<std::size_t>(i)]);
    }
  } else {
    for (const std::string& name : schema.feature_columns) {
      feature_indices.push_back(require_column(name));
      feature_names.push_back(name);
    }
  }
  if (feature_indices.empty()) {
    throw ValidationError("schema selects no feature columns");
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> timestamps;
  std::vector<Label> labels;
  Index row_number = 0;
  Index rejected = 0;
  std::string line;
  auto reject = [&](const std::string& message) {
    ++rejected;
    if (diagnostics) diagnostics->push_back({row_number, message});
  };

  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    const std::vector<std::string> fields = split_line(line, schema.delimiter);
    if (fields.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(fields.size()));
      ++row_number;
      continue;
    }

    std::vector<double> values(feature_indices.size());
    bool ok = true;
    for (std::size_t j = 0; j < feature_indices.size(); ++j) {
      const std::string& cell =
          fields[static_cast<std::size_t>(feature_indices[j])];
      if (!parse_double(cell, &values[j])) {
        reject("non-finite or unparseable value '" + cell + "' in column " +
               feature_names[j]);
        ok = false;
        break;
      }
    }

    Label label = Label::kNormal;
    if (ok && label_index) {
      const std::string& token = fields[static_cast<std::size_t>(*label_index)];
      if (token == schema.normal_token) {
        label = Label::kNormal;
      } else if (token == schema.attack_token) {
        label = Label::kAttack;
      } else {
        reject("unrecognized label token '" + token + "'");
        ok = false;
      }
    }

    if (ok) {
      rows.push_back(std::move(values));
      if (ts_index) {
        timestamps.push_back(fields[static_cast<std::size_t>(*ts_index)]);
      }
      if (label_index) labels.push_back(label);
    }
    ++row_number;
  }

  if (row_number == 0) {
    throw ValidationError("empty file: no data rows");
  }
  if (rejected * 10 > row_number) {
    throw ValidationError("corrupt input file: " + std::to_string(rejected) +
                          " of " + std::to_string(row_number) +
                          " rows rejected");
  }
  if (rows.empty()) {
    throw ValidationError("empty dataset: every row was rejected");
  }

  Dataset ds;
  ds.matrix.resize(static_cast<Index>(rows.size()),
                   static_cast<Index>(feature_indices.size()));
  for (Index i = 0; i < ds.matrix.rows(); ++i) {
    for (Index j = 0; j < ds.matrix.cols(); ++j) {
      ds.matrix(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  ds.timestamps = std::move(timestamps);
  if (label_index) ds.labels = std::move(labels);
  ds.column_names = std::move(feature_names);
  if (schema.timestamp_column) ds.timestamp_name = schema.timestamp_column;
  if (schema.label_column) ds.label_name = schema.label_column;
  ds.normal_token = schema.normal_token;
  ds.attack_token = schema.attack_token;
  return ds;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 std::vector<RowDiagnostic>* diagnostics) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  return load_csv(in, schema, diagnostics);
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  const bool has_ts = dataset.timestamp_name.has_value();
  const bool has_labels = dataset.labels.has_value();
  if (has_ts) out << *dataset.timestamp_name << ',';
  for (std::size_t j = 0; j < dataset.column_names.size(); ++j) {
    if (j > 0) out << ',';
    out << dataset.column_names[j];
  }
  if (has_labels) out << ',' << dataset.label_name.value_or("label");
  out << '\n';

  for (Index i = 0; i < dataset.matrix.rows(); ++i) {
    if (has_ts) {
      out << (static_cast<std::size_t>(i) < dataset.timestamps.size()
                  ? dataset.timestamps[static_cast<std::size_t>(i)]
                  : "")
          << ',';
    }
    for (Index j = 0; j < dataset.matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_value(dataset.matrix(i, j));
    }
    if (has_labels) {
      out << ','
          << ((*dataset.labels)[static_cast<std::size_t>(i)] == Label::kAttack
                  ? dataset.attack_token
                  : dataset.normal_token);
    }
    out << '\n';
  }
}

void write_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open file for writing: " + path);
  }
  write_csv(dataset, out);
}

Dataset inject_corruption(const Dataset& dataset, const CorruptionSpec& spec) {
  if (spec.gaussian_sigma < 0.0) {
    throw ValidationError("gaussian_sigma must be non-negative");
  }
  if (spec.burst_period < 1 || spec.burst_length < 1 ||
      spec.burst_length > spec.burst_period) {
    throw ValidationError("burst_length must lie in [1, burst_period]");
  }

  std::vector<Index> burst_cols;
  for (const std::string& name : spec.burst_columns) {
    const auto it = std::find(dataset.column_names.begin(),
                              dataset.column_names.end(), name);
    if (it == dataset.column_names.end()) {
      throw ValidationError("unknown column: " + name);
    }
    burst_cols.push_back(it - dataset.column_names.begin());
  }

  Dataset out = dataset;
  const Index n = out.matrix.rows();
  const Index d = out.matrix.cols();

  if (spec.gaussian_sigma > 0.0) {
    // Box-Muller over a pinned mt19937_64 stream: two draws per entry,
    // column-major, so a fixed seed reproduces the exact same bytes.
    std::mt19937_64 gen(spec.seed);
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    auto uniform01 = [&gen]() {
      return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    };
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double normal = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
        out.matrix(i, j) += spec.gaussian_sigma * normal;
      }
    }
  }

  for (const Index j : burst_cols) {
    const double stdev = column_stdev(dataset.matrix, j);
    const double offset = spec.burst_magnitude * (stdev > 0.0 ? stdev : 1.0);
    for (Index start = 0; start < n; start += spec.burst_period) {
      const Index stop = std::min(n, start + spec.burst_length);
      for (Index i = start; i < stop; ++i) {
        out.matrix(i, j) += offset;
      }
    }
  }
  return out;
}

std::vector<AttackSegment> find_attack_segments(const std::vector<Label>& labels) {
  std::vector<AttackSegment> segments;
  const Index n = static_cast<Index>(labels.size());
  Index i = 0;
  while (i < n) {
    if (labels[static_cast<std::size_t>(i)] == Label::kAttack) {
      Index j = i;
      while (j < n && labels[static_cast<std::size_t>(j)] == Label::kAttack) ++j;
      segments.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }
  return segments;
}

DetectionMetrics evaluate(const std::vector<ScoreRecord>& records,
                          const std::vector<Label>& labels,
                          const std::vector<AttackSegment>& segments) {
  if (records.size() != labels.size()) {
    throw ValidationError("evaluate: records and labels length mismatch");
  }

  Index tp = 0, fp = 0, fn = 0, normal_rows = 0;
  std::unordered_map<Index, bool> anomaly_at_row;
  anomaly_at_row.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const bool flagged = records[i].verdict == Verdict::kAnomaly;
    const bool attacked = labels[i] == Label::kAttack;
    if (!anomaly_at_row.emplace(records[i].row_index, flagged).second) {
      throw ValidationError("evaluate: duplicate row_index " +
                            std::to_string(records[i].row_index));
    }
    if (attacked) {
      flagged ? ++tp : ++fn;
    } else {
      ++normal_rows;
      if (flagged) ++fp;
    }
  }

  DetectionMetrics metrics;
  metrics.precision = tp + fp == 0 ? 1.0
                                   : static_cast<double>(tp) /
                                         static_cast<double>(tp + fp);
  metrics.recall = tp + fn == 0 ? 1.0
                                : static_cast<double>(tp) /
                                      static_cast<double>(tp + fn);
  const double pr = metrics.precision + metrics.recall;
  metrics.f1 = pr == 0.0 ? 0.0 : 2.0 * metrics.precision * metrics.recall / pr;
  metrics.false_alarm_rate =
      normal_rows == 0 ? 0.0
                       : static_cast<double>(fp) / static_cast<double>(normal_rows);

  for (const AttackSegment& segment : segments) {
    SegmentDetection det{segment, std::nullopt};
    Index position = 0;
    for (Index row = segment.begin; row < segment.end; ++row) {
      const auto it = anomaly_at_row.find(row);
      if (it == anomaly_at_row.end()) continue;
      if (it->second) {
        det.delay = position;
        break;
      }
      ++position;
    }
    metrics.segments.push_back(det);
  }
  return metrics;
}

DetectionMetrics evaluate(const std::vector<ScoreRecord>& records,
                          const std::vector<Label>& labels) {
  if (records.size() != labels.size()) {
    throw ValidationError("evaluate: records and labels length mismatch");
  }
  // rebuild the time axis from row_index before segmenting
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].row_index < records[b].row_index;
  });

  std::vector<AttackSegment> segments;
  std::optional<Index> run_start;
  Index prev_row = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Index row = records[order[k]].row_index;
    const bool attacked = labels[order[k]] == Label::kAttack;
    if (attacked && !run_start) {
      run_start = row;
    } else if (!attacked && run_start) {
      segments.push_back({*run_start, prev_row + 1});
      run_start.reset();
    }
    prev_row = row;
  }
  if (run_start) segments.push_back({*run_start, prev_row + 1});
  return evaluate(records, labels, segments);
}

Matrix apply_scaler(const ColumnScaler& scaler, const Matrix& m) {
  if (m.cols() != scaler.center.size() || m.cols() != scaler.scale.size()) {
    throw ValidationError("scaler dimension mismatch");
  }
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    out.col(j) = (m.col(j).array() - scaler.center(j)) / scaler.scale(j);
  }
  return out;
}

Vector apply_scaler(const ColumnScaler& scaler, const Vector& x) {
  if (x.size() != scaler.center.size() || x.size() != scaler.scale.size()) {
    throw ValidationError("scaler dimension mismatch");
  }
  return (x.array() - scaler.center.array()) / scaler.scale.array();
}

StandardizeResult standardize(const Dataset& dataset) {
  const Index n = dataset.matrix.rows();
  const Index d = dataset.matrix.cols();
  ColumnScaler scaler;
  scaler.center = Vector::Zero(d);
  scaler.scale = Vector::Ones(d);

  std::vector<double> column(static_cast<std::size_t>(n));
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < n; ++i) {
      column[static_cast<std::size_t>(i)] = dataset.matrix(i, j);
    }
    const double center = vector_median(column);
    for (double& v : column) v = std::abs(v - center);
    const double mad = vector_median(column);
    if (mad > 0.0) {
      scaler.center(j) = center;
      scaler.scale(j) = 1.4826 * mad;
    }
    // zero MAD: flagged constant, identity pass-through
  }

  StandardizeResult result{dataset, scaler};
  result.data.matrix = apply_scaler(scaler, dataset.matrix);
  return result;
}

}  // namespace rad
