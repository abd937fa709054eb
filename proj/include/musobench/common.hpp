#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace musobench {

enum class TaskKind { TimeTabling, SubsetSum };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

/// Bad generation parameters, malformed config files, unusable settings.
/// CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Corrupt or inconsistent data: schema violations, digest mismatches,
/// empty inputs where content is required. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Model endpoint unreachable or persistently failing. CLI exit code 3.
class EndpointError : public std::runtime_error {
 public:
  explicit EndpointError(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration aborted because the search exceeded its node budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// The configured endpoint lacks a capability the run plan requires
/// (currently: assistant-message continuation). CLI exit code 1.
class UnsupportedEndpoint : public ConfigError {
 public:
  explicit UnsupportedEndpoint(const std::string& what) : ConfigError(what) {}
};

/// FNV-1a 64-bit digest, hex-encoded. Stable across platforms; used to
/// detect corpus drift between a run and later scoring, not for security.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace musobench
