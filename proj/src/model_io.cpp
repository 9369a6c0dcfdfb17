#include "rad/model_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace rad {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary model sections assume a little-endian host");

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<double>& values) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
  const std::size_t len = values.size() * sizeof(double);
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    unsigned int chunk = static_cast<unsigned int>(bytes[i]) << 16;
    if (i + 1 < len) chunk |= static_cast<unsigned int>(bytes[i + 1]) << 8;
    if (i + 2 < len) chunk |= bytes[i + 2];
    out.push_back(kBase64Alphabet[(chunk >> 18) & 63]);
    out.push_back(kBase64Alphabet[(chunk >> 12) & 63]);
    out.push_back(i + 1 < len ? kBase64Alphabet[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? kBase64Alphabet[chunk & 63] : '=');
  }
  return out;
}

std::vector<double> base64_decode(const std::string& text) {
  std::vector<unsigned char> bytes;
  bytes.reserve(text.size() / 4 * 3);
  unsigned int chunk = 0;
  int bits = 0;
  for (const char c : text) {
    if (c == '=') break;
    const char* pos = std::strchr(kBase64Alphabet, c);
    if (pos == nullptr) {
      throw ValidationError("invalid base64 in model file");
    }
    chunk = (chunk << 6) | static_cast<unsigned int>(pos - kBase64Alphabet);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      bytes.push_back(static_cast<unsigned char>((chunk >> bits) & 0xff));
    }
  }
  if (bytes.size() % sizeof(double) != 0) {
    throw ValidationError("binary model section has a truncated payload");
  }
  std::vector<double> values(bytes.size() / sizeof(double));
  std::memcpy(values.data(), bytes.data(), bytes.size());
  return values;
}

std::vector<double> basis_row_major(const Basis& basis) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(basis.dim() * basis.rank()));
  for (Index i = 0; i < basis.dim(); ++i) {
    for (Index j = 0; j < basis.rank(); ++j) {
      values.push_back(basis.columns()(i, j));
    }
  }
  return values;
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void append_array(std::string& out, const char* name,
                  const std::vector<double>& values, bool binary) {
  out += '"';
  out += name;
  if (binary) {
    out += "_b64\": \"";
    out += base64_encode(values);
    out += '"';
    return;
  }
  out += "\": [";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(values[i]);
  }
  out += ']';
}

Vector to_vector(const std::vector<double>& values) {
  Vector v(static_cast<Index>(values.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = values[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> read_array(const nlohmann::json& node, const std::string& name) {
  if (node.contains(name + "_b64")) {
    return base64_decode(node.at(name + "_b64").get<std::string>());
  }
  if (!node.contains(name)) {
    throw ValidationError("model file is missing field: " + name);
  }
  return node.at(name).get<std::vector<double>>();
}

}  // namespace

std::string serialize_model(const ModelFile& file, bool binary) {
  const RadModel& m = file.model;
  const Provenance& p = m.provenance;
  std::string out;
  out.reserve(4096);
  out += "{\n";
  out += "  \"format_version\": " + std::to_string(file.format_version) + ",\n";
  out += "  \"d\": " + std::to_string(m.basis.dim()) + ",\n";
  out += "  \"r\": " + std::to_string(m.basis.rank()) + ",\n";
  out += "  \"threshold\": " + format_number(m.threshold) + ",\n";
  out += "  \"threshold_mode\": \"" + to_string(m.threshold_mode) + "\",\n";
  out += "  ";
  append_array(out, "basis", basis_row_major(m.basis), binary);
  out += ",\n  ";
  append_array(out, "median", to_std(m.median), binary);
  out += ",\n";
  if (file.scaler) {
    out += "  \"scaler\": {";
    append_array(out, "center", to_std(file.scaler->center), binary);
    out += ", ";
    append_array(out, "scale", to_std(file.scaler->scale), binary);
    out += "},\n";
  }
  out += "  \"provenance\": {\n";
  out += "    \"n_rows\": " + std::to_string(p.n_rows) + ",\n";
  out += "    \"rank_tol\": " + format_number(p.rank_tol) + ",\n";
  out += "    \"data_fingerprint\": \"" + p.data_fingerprint + "\",\n";
  out += "    \"solver_converged\": " + std::string(p.solver_converged ? "true" : "false") + ",\n";
  out += "    \"median_converged\": " + std::string(p.median_converged ? "true" : "false") + ",\n";
  out += "    \"baseline\": " + std::string(p.baseline ? "true" : "false") + ",\n";
  out += "    \"pcp\": {\"lambda\": " + format_number(p.pcp.lambda) +
         ", \"tol\": " + format_number(p.pcp.tol) +
         ", \"max_iter\": " + std::to_string(p.pcp.max_iter) +
         ", \"mu0\": " + format_number(p.pcp.mu0) +
         ", \"rho\": " + format_number(p.pcp.rho) +
         ", \"mu_max\": " + format_number(p.pcp.mu_max) + "}\n";
  out += "  }\n";
  out += "}\n";
  return out;
}

ModelFile parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
  }

  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ValidationError("unsupported model file format_version " +
                            std::to_string(version) + " (expected " +
                            std::to_string(kModelFormatVersion) + ")");
    }
    const Index d = doc.at("d").get<Index>();
    const Index r = doc.at("r").get<Index>();
    if (d < 1 || r < 1 || r > d) {
      throw ValidationError("model file has invalid dimensions");
    }

    const std::vector<double> basis_values = read_array(doc, "basis");
    if (basis_values.size() != static_cast<std::size_t>(d * r)) {
      throw ValidationError("model file basis has wrong element count");
    }
    Matrix columns(d, r);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < r; ++j) {
        columns(i, j) = basis_values[static_cast<std::size_t>(i * r + j)];
      }
    }

    const Vector median = to_vector(read_array(doc, "median"));
    if (median.size() != d) {
      throw ValidationError("model file median has wrong element count");
    }

    const nlohmann::json& prov = doc.at("provenance");
    Provenance p;
    p.n_rows = prov.at("n_rows").get<Index>();
    p.d = d;
    p.r = r;
    p.rank_tol = prov.at("rank_tol").get<double>();
    p.data_fingerprint = prov.at("data_fingerprint").get<std::string>();
    p.solver_converged = prov.at("solver_converged").get<bool>();
    p.median_converged = prov.at("median_converged").get<bool>();
    p.baseline = prov.at("baseline").get<bool>();
    const nlohmann::json& pcp = prov.at("pcp");
    p.pcp.lambda = pcp.at("lambda").get<double>();
    p.pcp.tol = pcp.at("tol").get<double>();
    p.pcp.max_iter = pcp.at("max_iter").get<int>();
    p.pcp.mu0 = pcp.at("mu0").get<double>();
    p.pcp.rho = pcp.at("rho").get<double>();
    p.pcp.mu_max = pcp.at("mu_max").get<double>();

    RadModel model{Basis(columns), median, doc.at("threshold").get<double>(),
                   parse_threshold_mode(doc.at("threshold_mode").get<std::string>()),
                   std::move(p)};
    validate_model(model);

    std::optional<ColumnScaler> scaler;
    if (doc.contains("scaler")) {
      ColumnScaler s;
      s.center = to_vector(read_array(doc.at("scaler"), "center"));
      s.scale = to_vector(read_array(doc.at("scaler"), "scale"));
      if (s.center.size() != d || s.scale.size() != d) {
        throw ValidationError("model file scaler has wrong element count");
      }
      if ((s.scale.array() == 0.0).any()) {
        throw ValidationError("model file scaler has a zero scale entry");
      }
      scaler = std::move(s);
    }
    return ModelFile{version, std::move(model), std::move(scaler)};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelFile& file, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot open file for writing: " + path);
  }
  out << serialize_model(file, binary);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

Index parameter_count(Index d, Index r) { return d * r + d + 1; }

Index deployment_value_count(Index d, Index r) { return d * r + 2 * d + r + 1; }

}  // namespace rad
