#pragma once

#include <stdexcept>
#include <string>

namespace ciiq {

/// File access / decode / parse failures. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Size constraints: undersized inputs, mismatched pairs, layout mismatches.
/// CLI exit code 3.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid parameter values (even window size, bad sweep axis, ...).
/// CLI exit code 4.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Statistics requested on inputs where they are undefined
/// (fewer than two points, a constant sequence, ...).
class DegenerateInput : public std::runtime_error {
 public:
  explicit DegenerateInput(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ciiq
