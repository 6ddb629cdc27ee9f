#include "qsaf/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsaf/error.hpp"

namespace qsaf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_decimal(std::string_view token, std::string_view whole) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorKind::kInvalidParameters, "cannot parse number '" + std::string(whole) + "'");
  }
  return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<Digit> parse_digit_list(std::string_view text) {
  std::vector<Digit> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) {
    Digit d = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::kInvalidDigit, "cannot parse digit '" + item + "'");
    }
    out.push_back(d);
  }
  return out;
}

std::string join_digits(const std::vector<Digit>& digits) {
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(digits[i]);
  }
  return out;
}

}  // namespace

double parse_real(std::string_view token) {
  const std::string_view t = trim(token);
  const std::size_t slash = t.find('/');
  if (slash == std::string_view::npos) return parse_decimal(t, t);
  const double num = parse_decimal(t.substr(0, slash), t);
  const double den = parse_decimal(t.substr(slash + 1), t);
  if (den == 0.0) {
    throw Error(ErrorKind::kInvalidParameters, "zero denominator in '" + std::string(t) + "'");
  }
  return num / den;
}

std::vector<std::string> split_array(std::string_view text) {
  const std::string_view t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw Error(ErrorKind::kInvalidParameters,
                "expected a bracketed array, got '" + std::string(t) + "'");
  }
  const std::string_view inner = trim(t.substr(1, t.size() - 2));
  if (inner.empty()) return {};
  return split(inner, ',');
}

SystemConfig parse_config(std::string_view text) {
  SystemConfig config;
  bool have_q = false;
  bool have_g = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorKind::kInvalidParameters,
                  "line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key == "label") {
      config.label = std::string(value);
    } else if (key == "q" || key == "g") {
      auto items = split_array(value);
      std::vector<double> numbers;
      for (const auto& item : items) numbers.push_back(parse_real(item));
      if (key == "q") {
        config.q_text = std::move(items);
        config.q = std::move(numbers);
        have_q = true;
      } else {
        config.g_text = std::move(items);
        config.g = std::move(numbers);
        have_g = true;
      }
    } else {
      throw Error(ErrorKind::kInvalidParameters,
                  "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_q || !have_g) {
    throw Error(ErrorKind::kInvalidParameters, "configuration needs both 'q' and 'g'");
  }
  if (config.q.size() != config.g.size()) {
    throw Error(ErrorKind::kInvalidParameters, "'q' and 'g' must have equal length");
  }
  if (config.q.size() < 2) {
    throw Error(ErrorKind::kInvalidParameters, "'q' and 'g' need at least 2 entries");
  }
  return config;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read configuration '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

SelfAffineSystem build_system(const SystemConfig& config) {
  return SelfAffineSystem(StochasticVector(config.q), AffineCoefficients(config.g));
}

DigitString parse_digit_string(std::string_view text, std::size_t alphabet) {
  std::string_view t = trim(text);
  const std::size_t open = t.find('(');
  if (open == std::string_view::npos) {
    if (t.size() >= 3 && t.substr(t.size() - 3) == "...") {
      t = trim(t.substr(0, t.size() - 3));
      if (!t.empty() && t.back() == ',') t.remove_suffix(1);
    }
    auto digits = parse_digit_list(t);
    if (digits.empty()) {
      throw Error(ErrorKind::kInvalidDigit, "empty digit string");
    }
    return DigitString::truncated(alphabet, std::move(digits));
  }
  if (t.back() != ')' || t.find('(', open + 1) != std::string_view::npos) {
    throw Error(ErrorKind::kInvalidDigit,
                "period must be a single parenthesized group at the end: '" + std::string(t) + "'");
  }
  std::string_view head = trim(t.substr(0, open));
  if (!head.empty()) {
    if (head.back() != ',') {
      throw Error(ErrorKind::kInvalidDigit, "missing ',' before the period");
    }
    head.remove_suffix(1);
  }
  auto period = parse_digit_list(t.substr(open + 1, t.size() - open - 2));
  if (period.empty()) throw Error(ErrorKind::kInvalidDigit, "empty period");
  return DigitString::periodic(alphabet, parse_digit_list(head), std::move(period));
}

std::string format_digit_string(const DigitString& digits) {
  std::string out = join_digits(digits.prefix());
  if (digits.is_truncated()) return out + (out.empty() ? "..." : ",...");
  if (!out.empty()) out += ',';
  return out + '(' + join_digits(digits.period()) + ')';
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace qsaf
