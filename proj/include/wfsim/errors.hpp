#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace wfsim {

// Inconsistent or unsupported StorageConfig / PlatformProfile values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The workload asks for something the modeled system cannot do
// (reading a missing file, writing a closed file, dependency cycles...).
class WorkloadError : public std::runtime_error {
 public:
  explicit WorkloadError(const std::string& what) : std::runtime_error(what) {}
  WorkloadError(const std::string& what, std::uint64_t op_id) : std::runtime_error(what), op_id_(op_id) {}
  std::optional<std::uint64_t> op_id() const noexcept { return op_id_; }

 private:
  std::optional<std::uint64_t> op_id_;
};

// Measurements that cannot produce a valid profile.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model bug: broken engine or protocol invariant.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace wfsim
