#pragma once

// Text formats shared by the command-line tool and the Python module.
//
// System file (UTF-8, one `key: value` per line, `#` starts a comment):
//
//   label: cantor-maximum
//   q: [1/5, 2/5, 1/5, 1/5]
//   g: [2/5, 4/5, 2/5, -3/5]
//
// Entries are decimals or exact ratios `a/b`. Digit strings are written as a
// comma-separated prefix followed by a parenthesized period, e.g. "1,3,(0,2)";
// a string without a period is a truncation and may end in "...".

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qsaf/qs_codec.hpp"
#include "qsaf/self_affine.hpp"

namespace qsaf {

struct SystemConfig {
  std::string label = "unnamed";
  std::vector<std::string> q_text;
  std::vector<std::string> g_text;
  std::vector<double> q;
  std::vector<double> g;
};

// Decimal ("-0.28", "1e-3") or ratio ("2/5"). Throws InvalidParameters.
double parse_real(std::string_view token);
std::vector<std::string> split_array(std::string_view text);

SystemConfig parse_config(std::string_view text);
SystemConfig load_config(const std::filesystem::path& path);
SelfAffineSystem build_system(const SystemConfig& config);

DigitString parse_digit_string(std::string_view text, std::size_t alphabet);
std::string format_digit_string(const DigitString& digits);

// 17 significant digits, "%.17g".
std::string format_real(double value);

}  // namespace qsaf
