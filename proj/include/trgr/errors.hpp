#pragma once

#include <stdexcept>
#include <string>

namespace trgr {

/// Thrown when tensor, channel or codebook dimensions disagree.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a request exceeds a hard size cap (e.g. exhaustive search).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown for malformed files and configs.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trgr
