#pragma once

#include <stdexcept>
#include <string>

namespace na2q {

// Error taxonomy used across the library. Everything derives from
// std::runtime_error so callers can catch broadly; the subtypes exist so
// tests can pin down which contract was violated.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LifecycleError : std::runtime_error {
  explicit LifecycleError(const std::string& msg) : std::runtime_error(msg) {}
};

struct KeyError : std::runtime_error {
  explicit KeyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AvailabilityError : std::runtime_error {
  explicit AvailabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CompatibilityError : std::runtime_error {
  explicit CompatibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace na2q
