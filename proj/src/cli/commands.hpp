#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json_io.hpp"

namespace twistlab::cli {

struct Report {
  Json document;
  /// Per-term tables for CSV output, in report order.
  std::vector<std::pair<std::string, SeriesVerdict>> tables;
  /// Bare value for "format": "value".
  std::optional<double> value;
  std::string format = "json";
  /// Set when the command ran but reports a failure (exit code 2).
  bool failed = false;
};

/// Resolves a scenario document (defaults materialised, unknown fields
/// rejected) and runs it.
Report execute(const Json& scenario);

std::vector<std::string> command_names();

}  // namespace twistlab::cli
