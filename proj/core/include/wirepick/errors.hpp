#pragma once

#include <stdexcept>
#include <string>

namespace wirepick {

// Bad argument to a pure operation (window size, trace length, image size).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Rejected configuration key or value.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed file contents (trace JSONL, PGM, snapshot, scenario).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wirepick
