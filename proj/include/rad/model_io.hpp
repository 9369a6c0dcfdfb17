#ifndef RAD_MODEL_IO_HPP
#define RAD_MODEL_IO_HPP

#include <optional>
#include <string>

#include "rad/dataset.hpp"
#include "rad/model.hpp"

namespace rad {

inline constexpr int kModelFormatVersion = 1;

/// On-disk form of a trained model: the {A, m, theta} triplet, the optional
/// feature scaler, and provenance. JSON with every numeric written as a
/// 17-significant-digit decimal, so serialize/deserialize round-trips every
/// value bit for bit; `binary` swaps the numeric arrays for base64-encoded
/// little-endian doubles.
struct ModelFile {
  int format_version = kModelFormatVersion;
  RadModel model;
  std::optional<ColumnScaler> scaler;
};

std::string serialize_model(const ModelFile& file, bool binary = false);
ModelFile parse_model(const std::string& text);

void save_model(const std::string& path, const ModelFile& file, bool binary = false);
ModelFile load_model(const std::string& path);

/// Stored parameter count: the d x r basis, the d-vector median, theta.
Index parameter_count(Index d, Index r);

/// Deployment accounting including the runtime buffers x_j and A^T x_j.
Index deployment_value_count(Index d, Index r);

}  // namespace rad

#endif  // RAD_MODEL_IO_HPP
