#include "trgr/codebook.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "trgr/errors.hpp"

namespace trgr {

std::string_view to_string(LineKind kind) {
  return kind == LineKind::row ? "row" : "column";
}

Codebook::Codebook(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

Codebook::Codebook(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits)
    : rows_(rows), cols_(cols), bits_(std::move(bits)) {
  if (bits_.size() != rows_ * cols_) {
    throw DimensionError("codebook: " + std::to_string(bits_.size()) + " bits for a " +
                         std::to_string(rows_) + "x" + std::to_string(cols_) + " grid");
  }
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("codebook: entries must be 0 or 1");
  }
}

std::uint64_t Codebook::binary_value() const {
  std::uint64_t v = 0;
  for (auto b : bits_) v = (v << 1) | b;
  return v;
}

Codebook Codebook::from_binary_value(std::size_t rows, std::size_t cols, std::uint64_t value) {
  const std::size_t n = rows * cols;
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    bits[n - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1U);
  }
  return Codebook(rows, cols, std::move(bits));
}

std::string Codebook::to_text() const {
  std::string out;
  out.reserve(rows_ * (cols_ + 1));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out.push_back(bit(r, c) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

Codebook Codebook::from_text(std::string_view text) {
  std::vector<std::uint8_t> bits;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (rows == 0) {
      cols = line.size();
    } else if (line.size() != cols) {
      throw FormatError("codebook text: ragged line " + std::to_string(rows + 1));
    }
    for (char ch : line) {
      if (ch != '0' && ch != '1') throw FormatError("codebook text: expected '0' or '1'");
      bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    ++rows;
  }
  return Codebook(rows, cols, std::move(bits));
}

std::vector<double> phase_matrix(const Codebook& codebook) {
  std::vector<double> phases(codebook.size());
  for (std::size_t n = 0; n < phases.size(); ++n) {
    phases[n] = codebook.bit(n) ? std::numbers::pi : 0.0;
  }
  return phases;
}

Codebook line_flip(const Codebook& codebook, LineKind kind, std::size_t index) {
  const std::size_t limit = kind == LineKind::row ? codebook.rows() : codebook.cols();
  if (index >= limit) {
    throw DimensionError("line_flip: " + std::string(to_string(kind)) + " index " +
                         std::to_string(index) + " out of range " + std::to_string(limit));
  }
  std::vector<std::uint8_t> bits = codebook.bits();
  if (kind == LineKind::row) {
    for (std::size_t c = 0; c < codebook.cols(); ++c) bits[index * codebook.cols() + c] ^= 1U;
  } else {
    for (std::size_t r = 0; r < codebook.rows(); ++r) bits[r * codebook.cols() + index] ^= 1U;
  }
  return Codebook(codebook.rows(), codebook.cols(), std::move(bits));
}

Codebook read_codebook_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open codebook file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return Codebook::from_text(ss.str());
}

void write_codebook_file(const std::string& path, const Codebook& codebook) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write codebook file: " + path);
  out << codebook.to_text();
}

}  // namespace trgr
