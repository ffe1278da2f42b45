#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace akmin {

/// Bad runtime or algorithm configuration (t = 0, too few records per
/// machine, unsupported machine count, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid dataset specification handed to a generator.
class DataSpecError : public std::runtime_error {
 public:
  explicit DataSpecError(const std::string& what) : std::runtime_error(what) {}
};

/// A machine program addressed a destination outside 1..t. The round is
/// aborted and the cluster must be discarded.
class RoutingError : public std::runtime_error {
 public:
  RoutingError(int dest, int t)
      : std::runtime_error("message routed to machine " + std::to_string(dest) +
                           " in a cluster of " + std::to_string(t)),
        dest_(dest) {}
  int dest() const { return dest_; }

 private:
  int dest_;
};

/// Malformed dataset or report file. Carries the byte offset of the first
/// inconsistency.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Result-to-machine planning failed an internal consistency check.
class PlanError : public std::runtime_error {
 public:
  explicit PlanError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace akmin
