#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deed/fixed_point.hpp"
#include "deed/params.hpp"

namespace deed {

/// Everything one CLI invocation needs.
struct RunConfig {
  std::string input;
  std::string mask;    ///< empty: K is the whole grid
  std::string output;
  std::string trace;   ///< empty: no CSV trace
  TensorKind tensor = TensorKind::Eed;
  ModelParams model;
  FixedPointConfig fixed_point;
  double spacing = 1.0;
  std::uint64_t seed = 0;

  /// Numeric checks (ConfigError) followed by path checks (IoError): input
  /// and mask readable, output directories present.
  void validate(bool need_input, bool need_output) const;
};

/// Parses "key=value" lines; blank lines and lines starting with '#' are
/// skipped, whitespace around key and value is trimmed. Throws ConfigError on
/// a line without '='.
std::vector<std::pair<std::string, std::string>> parse_key_value_config(const std::string& text);

}  // namespace deed
