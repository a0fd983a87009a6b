#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace trgr {

enum class LineKind { row, column };

std::string_view to_string(LineKind kind);

/// 1-bit RIS configuration on an R x C grid. Bit b applies phase b*pi, so
/// every element keeps unit modulus by construction.
class Codebook {
 public:
  Codebook() = default;
  /// All-zeros grid.
  Codebook(std::size_t rows, std::size_t cols);
  /// Row-major bits; every entry must be 0 or 1.
  Codebook(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return bits_.size(); }

  std::uint8_t bit(std::size_t n) const { return bits_.at(n); }
  std::uint8_t bit(std::size_t r, std::size_t c) const { return bits_.at(r * cols_ + c); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  /// e^{j*bit*pi} as an exact real factor (+1 or -1).
  double phase_factor(std::size_t n) const { return bits_[n] ? -1.0 : 1.0; }

  /// Row-major binary value with element 0 as the most significant bit.
  /// Only meaningful for size() <= 64.
  std::uint64_t binary_value() const;
  static Codebook from_binary_value(std::size_t rows, std::size_t cols, std::uint64_t value);

  /// R lines of C characters '0'/'1'.
  std::string to_text() const;
  static Codebook from_text(std::string_view text);

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Per-element phase shifts, row-major, theta_n = bit_n * pi.
std::vector<double> phase_matrix(const Codebook& codebook);

/// Inverts every bit of one row or column.
Codebook line_flip(const Codebook& codebook, LineKind kind, std::size_t index);

Codebook read_codebook_file(const std::string& path);
void write_codebook_file(const std::string& path, const Codebook& codebook);

}  // namespace trgr
