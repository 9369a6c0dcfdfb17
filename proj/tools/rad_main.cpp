#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rad/dataset.hpp"
#include "rad/model.hpp"
#include "rad/model_io.hpp"

namespace {

using rad::Index;
using rad::Matrix;
using rad::Vector;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

struct SchemaFlags {
  std::vector<std::string> features;
  std::string timestamp_column;
  std::string label_column;
  std::string normal_token = "Normal";
  std::string attack_token = "Attack";
  std::string delimiter = ",";

  rad::CsvSchema to_schema() const {
    rad::CsvSchema schema;
    schema.feature_columns = features;
    if (!timestamp_column.empty()) schema.timestamp_column = timestamp_column;
    if (!label_column.empty()) schema.label_column = label_column;
    schema.normal_token = normal_token;
    schema.attack_token = attack_token;
    if (delimiter.size() != 1) {
      throw rad::ValidationError("--delimiter must be a single character");
    }
    schema.delimiter = delimiter[0];
    return schema;
  }
};

void add_schema_flags(CLI::App* cmd, SchemaFlags* flags) {
  cmd->add_option("--features", flags->features,
                  "Feature columns, in order (default: all remaining columns)")
      ->delimiter(',');
  cmd->add_option("--timestamp-col", flags->timestamp_column,
                  "Column holding timestamps (kept as opaque strings)");
  cmd->add_option("--label-col", flags->label_column,
                  "Column holding normal/attack labels");
  cmd->add_option("--normal-token", flags->normal_token,
                  "Label token for normal rows")
      ->capture_default_str();
  cmd->add_option("--attack-token", flags->attack_token,
                  "Label token for attack rows")
      ->capture_default_str();
  cmd->add_option("--delimiter", flags->delimiter, "CSV field delimiter")
      ->capture_default_str();
}

rad::Dataset load_with_warnings(const std::string& path,
                                const rad::CsvSchema& schema) {
  std::vector<rad::RowDiagnostic> diagnostics;
  rad::Dataset ds = rad::load_csv(path, schema, &diagnostics);
  for (const rad::RowDiagnostic& diag : diagnostics) {
    std::cerr << "warning: rejected row " << diag.row << ": " << diag.message
              << "\n";
  }
  return ds;
}

Vector scaled_row(const rad::ModelFile& file, const Vector& raw) {
  return file.scaler ? rad::apply_scaler(*file.scaler, raw) : raw;
}

void emit_record_csv(std::ostream& out, const rad::ScoreRecord& record,
                     double residual) {
  out << record.row_index << ',' << format_number(record.score) << ','
      << format_number(record.normalized) << ','
      << rad::to_string(record.verdict) << ',' << format_number(residual)
      << '\n';
}

nlohmann::ordered_json record_json(const rad::ScoreRecord& record,
                                   double residual) {
  nlohmann::ordered_json j;
  j["row_index"] = record.row_index;
  j["score"] = record.score;
  j["normalized"] = record.normalized;  // +inf serializes as null
  j["verdict"] = rad::to_string(record.verdict);
  j["residual_norm"] = residual;
  return j;
}

// ---------------------------------------------------------------- train ----

struct TrainOptions {
  std::string data_path;
  std::string out_path;
  std::string trace_path;
  SchemaFlags schema;
  bool standardize = false;
  bool binary = false;
  double lambda = 0.0;
  double tol = 1e-7;
  int max_iter = 10000;
  double mu0 = 0.0;
  double rho = 1.5;
  double mu_max = 0.0;
  double rank_tol = 1e-6;
  std::string threshold_mode = "low_rank_rows";
  double median_tol = 0.0;
  int median_max_iter = 1000;
};

void run_train(const TrainOptions& opt) {
  const rad::Dataset ds = load_with_warnings(opt.data_path, opt.schema.to_schema());

  std::optional<rad::ColumnScaler> scaler;
  Matrix matrix = ds.matrix;
  if (opt.standardize) {
    rad::StandardizeResult standardized = rad::standardize(ds);
    matrix = std::move(standardized.data.matrix);
    scaler = std::move(standardized.scaler);
  }

  rad::TrainConfig config;
  config.pcp.lambda = opt.lambda;
  config.pcp.tol = opt.tol;
  config.pcp.max_iter = opt.max_iter;
  config.pcp.mu0 = opt.mu0;
  config.pcp.rho = opt.rho;
  config.pcp.mu_max = opt.mu_max;
  config.rank_tol = opt.rank_tol;
  config.threshold_mode = rad::parse_threshold_mode(opt.threshold_mode);
  config.median.tol = opt.median_tol;
  config.median.max_iter = opt.median_max_iter;

  rad::TrainTelemetry telemetry;
  const rad::RadModel model = rad::train(matrix, config, &telemetry);

  if (!telemetry.pcp_converged) {
    std::cerr << "warning: PCP stopped at max_iter without reaching tol\n";
  }
  if (!telemetry.median_converged) {
    std::cerr << "warning: Weiszfeld stopped at max_iter without reaching tol\n";
  }
  if (model.threshold == 0.0) {
    std::cerr << "warning: threshold is zero; every training row projects "
                 "onto the median\n";
  }

  if (!opt.trace_path.empty()) {
    std::ofstream trace(opt.trace_path);
    if (!trace) {
      throw rad::ValidationError("cannot open file for writing: " + opt.trace_path);
    }
    trace << "iteration,residual_frobenius\n";
    for (std::size_t i = 0; i < telemetry.residual_history.size(); ++i) {
      trace << (i + 1) << ',' << format_number(telemetry.residual_history[i])
            << '\n';
    }
  }

  const rad::ModelFile file{rad::kModelFormatVersion, model, std::move(scaler)};
  rad::save_model(opt.out_path, file, opt.binary);

  std::cout << "d: " << model.basis.dim() << "\n"
            << "r: " << model.basis.rank() << "\n"
            << "threshold: " << format_number(model.threshold) << "\n"
            << "iterations: " << telemetry.pcp_iterations << "\n"
            << "converged: " << (telemetry.pcp_converged ? "true" : "false") << "\n"
            << "model: " << opt.out_path << "\n";
}

// ---------------------------------------------------------------- score ----

struct ScoreOptions {
  std::string model_path;
  std::string data_path;
  SchemaFlags schema;
  std::string format = "csv";
};

void run_score(const ScoreOptions& opt) {
  const rad::ModelFile file = rad::load_model(opt.model_path);
  const rad::Dataset ds = load_with_warnings(opt.data_path, opt.schema.to_schema());
  if (ds.matrix.cols() != file.model.basis.dim()) {
    throw rad::ValidationError(
        "model expects d = " + std::to_string(file.model.basis.dim()) +
        " features, data has " + std::to_string(ds.matrix.cols()));
  }

  const bool ndjson = opt.format == "ndjson";
  if (!ndjson && opt.format != "csv") {
    throw rad::ValidationError("--format must be csv or ndjson");
  }
  if (!ndjson) {
    std::cout << "row_index,score,normalized,verdict,residual_norm\n";
  }
  for (Index i = 0; i < ds.matrix.rows(); ++i) {
    const Vector x = scaled_row(file, ds.matrix.row(i).transpose());
    const rad::ScoreRecord record = rad::classify(file.model, x, i);
    const double residual = rad::residual_norm(file.model, x);
    if (ndjson) {
      std::cout << record_json(record, residual).dump() << '\n';
    } else {
      emit_record_csv(std::cout, record, residual);
    }
  }
}

// ---------------------------------------------------------------- watch ----

struct WatchOptions {
  std::string model_path;
  std::string input = "stdin";
  int poll_ms = 50;
  std::string delimiter = ",";
  bool follow = true;
};

bool parse_row(const std::string& line, char delimiter, Index d, Vector* out,
               std::string* error) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(d));
  std::size_t start = 0;
  bool done = false;
  while (!done) {
    const std::size_t pos = line.find(delimiter, start);
    std::string cell = pos == std::string::npos
                           ? line.substr(start)
                           : line.substr(start, pos - start);
    done = pos == std::string::npos;
    start = pos + 1;
    const auto first = cell.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      *error = "empty field";
      return false;
    }
    const auto last = cell.find_last_not_of(" \t\r");
    cell = cell.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
      *error = "unparseable value '" + cell + "'";
      return false;
    }
    values.push_back(v);
  }
  if (values.size() != static_cast<std::size_t>(d)) {
    *error = "expected " + std::to_string(d) + " fields, got " +
             std::to_string(values.size());
    return false;
  }
  *out = Vector::Map(values.data(), d);
  return true;
}

void emit_watch_record(const rad::ModelFile& file, const std::string& line,
                       char delimiter, Index row_index,
                       std::chrono::steady_clock::time_point arrived) {
  nlohmann::ordered_json j;
  Vector raw;
  std::string error;
  if (parse_row(line, delimiter, file.model.basis.dim(), &raw, &error)) {
    const Vector x = scaled_row(file, raw);
    const rad::ScoreRecord record = rad::classify(file.model, x, row_index);
    j = record_json(record, rad::residual_norm(file.model, x));
  } else {
    j["row_index"] = row_index;
    j["error"] = error;
  }
  const auto done = std::chrono::steady_clock::now();
  j["latency_us"] =
      std::chrono::duration_cast<std::chrono::microseconds>(done - arrived)
          .count();
  std::cout << j.dump() << std::endl;  // flushed per record
}

void run_watch(const WatchOptions& opt) {
  const rad::ModelFile file = rad::load_model(opt.model_path);
  if (opt.delimiter.size() != 1) {
    throw rad::ValidationError("--delimiter must be a single character");
  }
  const char delimiter = opt.delimiter[0];

  Index row_index = 0;
  if (opt.input == "stdin") {
    std::string line;
    while (std::getline(std::cin, line)) {
      const auto arrived = std::chrono::steady_clock::now();
      if (line.empty()) continue;
      emit_watch_record(file, line, delimiter, row_index++, arrived);
    }
    return;
  }

  std::ifstream in(opt.input);
  if (!in) {
    throw rad::ValidationError("cannot open file: " + opt.input);
  }
  std::string pending;
  std::string line;
  while (true) {
    if (std::getline(in, line)) {
      if (in.eof()) {
        // no trailing newline yet: the writer may still be mid-line
        pending += line;
        if (!opt.follow) break;
        in.clear();
        std::this_thread::sleep_for(std::chrono::milliseconds(opt.poll_ms));
        continue;
      }
      const auto arrived = std::chrono::steady_clock::now();
      const std::string full = pending + line;
      pending.clear();
      if (!full.empty()) {
        emit_watch_record(file, full, delimiter, row_index++, arrived);
      }
      continue;
    }
    if (!in.eof()) {
      throw rad::ValidationError("input source lost: " + opt.input);
    }
    if (!opt.follow) break;
    in.clear();
    std::this_thread::sleep_for(std::chrono::milliseconds(opt.poll_ms));
  }
  if (!pending.empty()) {
    emit_watch_record(file, pending, delimiter, row_index++,
                      std::chrono::steady_clock::now());
  }
}

// --------------------------------------------------------------- inject ----

struct InjectOptions {
  std::string data_path;
  std::string out_path;
  SchemaFlags schema;
  rad::CorruptionSpec spec;
};

void run_inject(const InjectOptions& opt) {
  const rad::Dataset ds = load_with_warnings(opt.data_path, opt.schema.to_schema());
  const rad::Dataset corrupted = rad::inject_corruption(ds, opt.spec);
  rad::write_csv(corrupted, opt.out_path);
  std::cout << "wrote " << corrupted.matrix.rows() << " rows to "
            << opt.out_path << "\n";
}

// ----------------------------------------------------------------- eval ----

struct EvalOptions {
  std::string scores_path;
  std::string data_path;
  SchemaFlags schema;
};

std::vector<rad::ScoreRecord> load_score_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw rad::ValidationError("cannot open file: " + path);
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw rad::ValidationError("empty scores file: " + path);
  }

  std::vector<std::string> columns;
  std::stringstream hs(header);
  for (std::string cell; std::getline(hs, cell, ',');) columns.push_back(cell);
  const auto column_of = [&columns, &path](const std::string& name) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
      throw rad::ValidationError("scores file " + path +
                                 " is missing column " + name);
    }
    return static_cast<std::size_t>(it - columns.begin());
  };
  const std::size_t idx_row = column_of("row_index");
  const std::size_t idx_score = column_of("score");
  const std::size_t idx_verdict = column_of("verdict");

  std::vector<rad::ScoreRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != columns.size()) {
      throw rad::ValidationError("malformed scores row: " + line);
    }
    rad::ScoreRecord record;
    record.row_index = std::stoll(cells[idx_row]);
    record.score = std::stod(cells[idx_score]);
    const std::string& verdict = cells[idx_verdict];
    if (verdict == "ANOMALY") {
      record.verdict = rad::Verdict::kAnomaly;
    } else if (verdict == "NORMAL") {
      record.verdict = rad::Verdict::kNormal;
    } else {
      throw rad::ValidationError("unknown verdict token: " + verdict);
    }
    records.push_back(record);
  }
  return records;
}

void run_eval(const EvalOptions& opt) {
  if (opt.schema.label_column.empty()) {
    throw rad::ValidationError("eval requires --label-col");
  }
  const std::vector<rad::ScoreRecord> records = load_score_csv(opt.scores_path);
  const rad::Dataset ds = load_with_warnings(opt.data_path, opt.schema.to_schema());
  const rad::DetectionMetrics metrics = rad::evaluate(records, *ds.labels);

  std::cout << "precision: " << format_number(metrics.precision) << "\n"
            << "recall: " << format_number(metrics.recall) << "\n"
            << "f1: " << format_number(metrics.f1) << "\n"
            << "false_alarm_rate: " << format_number(metrics.false_alarm_rate)
            << "\n";
  for (const rad::SegmentDetection& det : metrics.segments) {
    std::cout << "segment " << det.segment.begin << ".." << det.segment.end
              << ": ";
    if (det.delay) {
      std::cout << "delay " << *det.delay << "\n";
    } else {
      std::cout << "MISSED\n";
    }
  }
}

// -------------------------------------------------------------- inspect ----

struct InspectOptions {
  std::string model_path;
  bool with_buffers = false;
  int scalar_bytes = 8;
};

void run_inspect(const InspectOptions& opt) {
  const rad::ModelFile file = rad::load_model(opt.model_path);
  const Index d = file.model.basis.dim();
  const Index r = file.model.basis.rank();
  const auto file_bytes = std::filesystem::file_size(opt.model_path);

  std::cout << "d: " << d << "\n"
            << "r: " << r << "\n"
            << "threshold: " << format_number(file.model.threshold) << "\n"
            << "threshold_mode: " << rad::to_string(file.model.threshold_mode)
            << "\n"
            << "baseline: "
            << (file.model.provenance.baseline ? "true" : "false") << "\n"
            << "scaler: " << (file.scaler ? "present" : "absent") << "\n"
            << "parameters: " << rad::parameter_count(d, r) << "\n"
            << "file_bytes: " << file_bytes << "\n";
  if (opt.with_buffers) {
    const Index values = rad::deployment_value_count(d, r);
    std::cout << "deployment_values: " << values << "\n"
              << "deployment_bytes: " << values * opt.scalar_bytes << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAD: robust subspace anomaly detection for multivariate "
               "cyber-physical system data"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI-style config file");

  auto train_opt = std::make_shared<TrainOptions>();
  CLI::App* train = app.add_subcommand("train", "Fit {A, m, theta} from a CSV");
  train->add_option("data", train_opt->data_path, "Training CSV")->required();
  train->add_option("--out", train_opt->out_path, "Model file to write")
      ->required();
  add_schema_flags(train, &train_opt->schema);
  train->add_flag("--standardize", train_opt->standardize,
                  "Robust per-column z-score before training");
  train->add_flag("--binary", train_opt->binary,
                  "Store numeric arrays as base64 little-endian doubles");
  train->add_option("--lambda", train_opt->lambda,
                    "PCP sparsity weight (0 = 1/sqrt(max(n,d)))")
      ->capture_default_str();
  train->add_option("--tol", train_opt->tol, "PCP relative stopping tolerance")
      ->capture_default_str();
  train->add_option("--max-iter", train_opt->max_iter, "PCP iteration budget")
      ->capture_default_str();
  train->add_option("--mu0", train_opt->mu0, "Initial penalty (0 = 1.25/sigma1)")
      ->capture_default_str();
  train->add_option("--rho", train_opt->rho, "Penalty growth factor")
      ->capture_default_str();
  train->add_option("--mu-max", train_opt->mu_max, "Penalty cap (0 = 1e7*mu0)")
      ->capture_default_str();
  train->add_option("--rank-tol", train_opt->rank_tol,
                    "Keep directions with sigma_i > rank_tol * sigma_1")
      ->capture_default_str();
  train->add_option("--threshold-mode", train_opt->threshold_mode,
                    "low_rank_rows or projected_rows")
      ->capture_default_str();
  train->add_option("--median-tol", train_opt->median_tol,
                    "Weiszfeld step tolerance (0 = 1e-9 * data scale)")
      ->capture_default_str();
  train->add_option("--median-max-iter", train_opt->median_max_iter,
                    "Weiszfeld iteration budget")
      ->capture_default_str();
  train->add_option("--trace", train_opt->trace_path,
                    "Write per-iteration solver residuals to this CSV");
  train->callback([train_opt] { run_train(*train_opt); });

  auto score_opt = std::make_shared<ScoreOptions>();
  CLI::App* score = app.add_subcommand("score", "Score a CSV batch row by row");
  score->add_option("model", score_opt->model_path, "Model file")->required();
  score->add_option("data", score_opt->data_path, "CSV to score")->required();
  add_schema_flags(score, &score_opt->schema);
  score->add_option("--format", score_opt->format, "csv or ndjson")
      ->capture_default_str();
  score->callback([score_opt] { run_score(*score_opt); });

  auto watch_opt = std::make_shared<WatchOptions>();
  CLI::App* watch = app.add_subcommand(
      "watch", "Stream verdicts for CSV rows arriving on stdin or a file");
  watch->add_option("model", watch_opt->model_path, "Model file")->required();
  watch->add_option("--input", watch_opt->input, "stdin or a path to tail")
      ->capture_default_str();
  watch->add_option("--poll-ms", watch_opt->poll_ms,
                    "Poll interval when tailing a file")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  watch->add_option("--delimiter", watch_opt->delimiter, "Field delimiter")
      ->capture_default_str();
  watch->add_flag("!--no-follow", watch_opt->follow,
                  "Stop at end of file instead of tailing");
  watch->callback([watch_opt] { run_watch(*watch_opt); });

  auto inject_opt = std::make_shared<InjectOptions>();
  CLI::App* inject = app.add_subcommand(
      "inject", "Add Gaussian noise and periodic burst outliers to a CSV");
  inject->add_option("data", inject_opt->data_path, "Input CSV")->required();
  inject->add_option("--out", inject_opt->out_path, "Corrupted CSV to write")
      ->required();
  add_schema_flags(inject, &inject_opt->schema);
  inject->add_option("--gaussian-sigma", inject_opt->spec.gaussian_sigma,
                     "Stdev of noise added to every feature entry")
      ->capture_default_str();
  inject->add_option("--burst-columns", inject_opt->spec.burst_columns,
                     "Columns receiving periodic bursts")
      ->delimiter(',');
  inject->add_option("--burst-period", inject_opt->spec.burst_period,
                     "Rows between burst starts")
      ->capture_default_str();
  inject->add_option("--burst-length", inject_opt->spec.burst_length,
                     "Consecutive rows per burst")
      ->capture_default_str();
  inject->add_option("--burst-magnitude", inject_opt->spec.burst_magnitude,
                     "Burst offset in multiples of the column stdev")
      ->capture_default_str();
  inject->add_option("--seed", inject_opt->spec.seed, "RNG seed")
      ->capture_default_str();
  inject->callback([inject_opt] { run_inject(*inject_opt); });

  auto eval_opt = std::make_shared<EvalOptions>();
  CLI::App* eval = app.add_subcommand(
      "eval", "Detection metrics for a score CSV against labeled data");
  eval->add_option("scores", eval_opt->scores_path,
                   "CSV produced by `rad score --format csv`")
      ->required();
  eval->add_option("data", eval_opt->data_path, "Labeled CSV")->required();
  add_schema_flags(eval, &eval_opt->schema);
  eval->callback([eval_opt] { run_eval(*eval_opt); });

  auto inspect_opt = std::make_shared<InspectOptions>();
  CLI::App* inspect = app.add_subcommand(
      "inspect", "Report model shape, parameter count and file size");
  inspect->add_option("model", inspect_opt->model_path, "Model file")
      ->required();
  inspect->add_flag("--with-buffers", inspect_opt->with_buffers,
                    "Include the runtime buffers x_j and A^T x_j");
  inspect->add_option("--scalar-bytes", inspect_opt->scalar_bytes,
                      "Bytes per stored scalar in the deployment accounting")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  inspect->callback([inspect_opt] { run_inspect(*inspect_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const rad::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const rad::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
