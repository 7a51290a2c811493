#include "deed/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deed/errors.hpp"

namespace deed {

namespace {

void require_readable(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string(what) + " '" + path + "' is not readable");
}

void require_writable_location(const std::string& path, const char* what) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError(std::string(what) + " directory '" + parent.string() + "' does not exist");
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void RunConfig::validate(bool need_input, bool need_output) const {
  model.validate(tensor);
  fixed_point.validate();
  if (!(spacing > 0.0)) throw ConfigError("spacing must be positive");
  if (need_input && input.empty()) throw ConfigError("--input is required");
  if (need_output && output.empty()) throw ConfigError("--output is required");

  if (!input.empty()) require_readable(input, "input");
  if (!mask.empty()) require_readable(mask, "mask");
  if (!output.empty()) require_writable_location(output, "output");
  if (!trace.empty()) require_writable_location(trace, "trace");
}

std::vector<std::pair<std::string, std::string>> parse_key_value_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(content.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    entries.emplace_back(key, trim(content.substr(eq + 1)));
  }
  return entries;
}

}  // namespace deed
