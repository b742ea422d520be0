#pragma once

#include <stdexcept>
#include <string>

#include "cfaudit/sim.hpp"

namespace cfaudit {

// Config file errors carry the 1-based line they were found on; line 0 means
// the error did not come from a config file (e.g. bad CLI sweep arguments).
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& what)
      : std::runtime_error(line_no > 0
                               ? "line " + std::to_string(line_no) + ": " + what
                               : what),
        line(line_no) {}
};

struct UnknownKeyError : ParseError {
  UnknownKeyError(int line_no, const std::string& key)
      : ParseError(line_no, "unknown key '" + key + "'") {}
};

struct UnknownValueError : ParseError {
  UnknownValueError(int line_no, const std::string& key,
                    const std::string& value)
      : ParseError(line_no,
                   "unknown value '" + value + "' for key '" + key + "'") {}
};

struct ExperimentConfig {
  SimConfig sim;
  std::string out = "out";  // output basename: <out>.csv, <out>.trace
};

// Flat `key = value` lines, `#` comments, every key optional.
// `preset = <app>` loads that application profile (workload plus the link
// and MAC rates it was tuned under); later lines override individual fields.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Locale-independent formatting: 6 significant digits.
std::string format_double(double v);

std::string csv_header();
std::string csv_row(const SimConfig& cfg, const RunResult& result);

}  // namespace cfaudit
