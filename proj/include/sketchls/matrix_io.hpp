#pragma once

#include "sketchls/tensor.hpp"

#include <filesystem>

namespace sketchls::io {

// CSV layout: first line "rows,cols", then one line per matrix row with
// comma-separated values printed with 17 significant digits.
void write_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_csv(const std::filesystem::path& path);

// Binary layout: rows*cols little-endian float64 values in row-major order,
// plus a sidecar "<path>.json" holding {"rows": R, "cols": C}.
void write_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_binary(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Dispatches on extension: ".bin" uses the binary layout, anything else CSV.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

/// Reads a matrix and flattens it to a vector (accepts n x 1 or 1 x n).
Vector read_vector(const std::filesystem::path& path);

}  // namespace sketchls::io
