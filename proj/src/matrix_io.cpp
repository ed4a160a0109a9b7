#include "sketchls/matrix_io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sketchls::io {
namespace {

std::runtime_error io_error(const std::filesystem::path& path, const std::string& msg) {
  return std::runtime_error(path.string() + ": " + msg);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw io_error(path, "bad number '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw io_error(path, "bad number '" + s + "'");
  return v;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Matrix& m) {
  require_finite(m, "write_csv");
  std::ofstream out(path);
  if (!out) throw io_error(path, "cannot open for writing");
  out << m.rows() << ',' << m.cols() << '\n';
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw io_error(path, "write failed");
}

Matrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw io_error(path, "missing header");
  const auto header = split(line, ',');
  if (header.size() != 2) throw io_error(path, "header must be 'rows,cols'");
  const auto rows = static_cast<Index>(parse_double(header[0], path));
  const auto cols = static_cast<Index>(parse_double(header[1], path));
  if (rows < 0 || cols < 0) throw io_error(path, "negative dimension");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw io_error(path, "truncated at row " + std::to_string(i));
    const auto cells = split(line, ',');
    if (static_cast<Index>(cells.size()) != cols)
      throw io_error(path, "row " + std::to_string(i) + " has wrong column count");
    for (Index j = 0; j < cols; ++j) m(i, j) = parse_double(cells[j], path);
  }
  require_finite(m, path.string());
  return m;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void write_binary(const std::filesystem::path& path, const Matrix& m) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  require_finite(m, "write_binary");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path, "cannot open for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  if (!out) throw io_error(path, "write failed");
  std::ofstream side(sidecar_path(path));
  side << nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}}.dump() << '\n';
  if (!side) throw io_error(sidecar_path(path), "write failed");
}

Matrix read_binary(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) throw io_error(sidecar_path(path), "missing sidecar");
  const auto meta = nlohmann::json::parse(side);
  const Index rows = meta.at("rows").get<Index>();
  const Index cols = meta.at("cols").get<Index>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw io_error(path, "truncated");
      m(i, j) = v;
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw io_error(path, "trailing bytes");
  require_finite(m, path.string());
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? read_binary(path) : read_csv(path);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (path.extension() == ".bin")
    write_binary(path, m);
  else
    write_csv(path, m);
}

Vector read_vector(const std::filesystem::path& path) {
  Matrix m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw io_error(path, "expected a single row or column");
}

}  // namespace sketchls::io
