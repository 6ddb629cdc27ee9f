// qsaf: command-line front end for self-affine functions over Q_s digit expansions.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qsaf/config.hpp"
#include "qsaf/error.hpp"
#include "qsaf/extrema_levels.hpp"
#include "qsaf/holder.hpp"
#include "qsaf/render.hpp"
#include "qsaf/report.hpp"

using namespace qsaf;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConditions = 3;
constexpr int kExitIo = 4;

constexpr std::size_t kMaxCantorSteps = 24;
constexpr double kMaxCantorIntervals = 16777216.0;  // 2^24 per stage

struct Globals {
  std::string config;
  std::string format;
  std::size_t depth = 0;  // 0: per-command default
  double tolerance = -1;  // negative: per-command default
  std::string out;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConditionsNotMet: return kExitConditions;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kInvariantViolated: return 1;
    default: return kExitValidation;
  }
}

void diagnose(std::string_view kind, const std::string& message) {
  Json d{{"error", kind}, {"message", message}};
  std::cerr << d.dump() << '\n';
}

// stdout unless --out is given
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw Error(ErrorKind::kIo, "write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

class Command {
 public:
  Command(const Globals& g) : globals_(g) {
    if (globals_.config.empty()) {
      throw Error(ErrorKind::kInvalidParameters, "--config FILE is required");
    }
    config_ = load_config(globals_.config);
    system_.emplace(build_system(config_));
  }

  const SystemConfig& config() const { return config_; }
  const SelfAffineSystem& system() const { return *system_; }
  std::size_t depth(std::size_t fallback) const { return globals_.depth ? globals_.depth : fallback; }
  double tolerance(double fallback) const { return globals_.tolerance >= 0 ? globals_.tolerance : fallback; }

  std::string format(std::initializer_list<const char*> allowed) const {
    const std::string f = globals_.format.empty() ? *allowed.begin() : globals_.format;
    for (const char* a : allowed) {
      if (f == a) return f;
    }
    throw Error(ErrorKind::kInvalidParameters, "format '" + f + "' not available here");
  }

  void emit(const Json& body) const {
    const std::string f = format({"text", "json"});
    Json doc;
    if (!body.contains("system")) doc["label"] = config_.label;
    for (const auto& [k, v] : body.items()) doc[k] = v;
    Sink sink(globals_.out);
    sink.stream() << (f == "json" ? render_json(doc) : render_text(doc));
    sink.close();
  }

 private:
  Globals globals_;
  SystemConfig config_;
  std::optional<SelfAffineSystem> system_;
};

Json estimate_json(const Estimate& e) {
  return Json{{"value", e.value}, {"error_bound", e.error_bound}};
}

Json digits_json(const std::vector<Digit>& digits) {
  Json out = Json::array();
  for (Digit d : digits) out.push_back(d);
  return out;
}

RankRange parse_ranks(const std::string& text) {
  RankRange r;
  std::vector<std::size_t> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoul(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidParameters, "ranks must look like FIRST:LAST[:STRIDE]");
    }
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(ErrorKind::kInvalidParameters, "ranks must look like FIRST:LAST[:STRIDE]");
  }
  r.first = parts[0];
  r.last = parts[1];
  if (parts.size() == 3) r.stride = parts[2];
  return r;
}

std::string sample_command_line(std::size_t points, std::size_t depth, bool extrema) {
  return "sample points=" + std::to_string(points) + " depth=" + std::to_string(depth) +
         " extrema=" + (extrema ? "on" : "off");
}

// Joins touching intervals of one stage as they stream past.
class MergingWriter final : public CantorWriter {
 public:
  explicit MergingWriter(CantorWriter& inner) : inner_(inner) {}
  void begin(const CantorSpec& spec, std::size_t steps, const Metadata& meta) override {
    inner_.begin(spec, steps, meta);
  }
  void stage_begin(std::size_t t) override {
    pending_.reset();
    inner_.stage_begin(t);
  }
  void interval(const Interval& iv) override {
    if (pending_ && iv.left <= pending_->right) {
      pending_->right = std::max(pending_->right, iv.right);
      return;
    }
    if (pending_) inner_.interval(*pending_);
    pending_ = iv;
  }
  void stage_end() override {
    if (pending_) inner_.interval(*pending_);
    pending_.reset();
    inner_.stage_end();
  }
  void end() override { inner_.end(); }

 private:
  CantorWriter& inner_;
  std::optional<Interval> pending_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-affine functions over Q_s digit expansions"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--config", globals.config, "System file (label, q, g)");
  app.add_option("--format", globals.format, "Output format")
      ->check(CLI::IsMember({"json", "text", "csv", "svg"}));
  app.add_option("--depth", globals.depth, "Digit depth")->check(CLI::PositiveNumber);
  app.add_option("--tolerance", globals.tolerance, "Tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--out", globals.out, "Output path (default stdout)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Full report: bounds, exponents, levels, maxima set");
  std::size_t analyze_samples = 64;
  analyze_cmd->add_option("--samples", analyze_samples, "Preimage witnesses");

  auto* sample_cmd = app.add_subcommand("sample", "Sample the graph (csv or svg)");
  std::size_t points = 4096;
  bool no_extrema = false;
  sample_cmd->add_option("--points", points, "Resolution: cylinders no wider than 1/(points-1)");
  sample_cmd->add_flag("--no-extrema", no_extrema, "Do not add the located argmax/argmin");

  auto* cantor = app.add_subcommand("cantor", "Stages of the maxima set construction");
  std::size_t steps = 5;
  bool merged = false;
  cantor->add_option("--steps", steps, "Number of stages (1..24)");
  cantor->add_flag("--merged", merged, "Join touching intervals");

  auto* encode_cmd = app.add_subcommand("encode", "Digits of x");
  std::string x_text;
  encode_cmd->add_option("--x", x_text, "Point in [0,1]")->required();

  auto* decode_cmd = app.add_subcommand("decode", "Point of a digit string");
  std::string digits_text;
  decode_cmd->add_option("--digits", digits_text, "e.g. 1,3,(0,2)")->required();

  auto* eval_cmd = app.add_subcommand("eval", "f at a digit string or a point");
  auto* eval_digits = eval_cmd->add_option("--digits", digits_text, "e.g. (2)");
  auto* eval_x = eval_cmd->add_option("--x", x_text, "Point in [0,1]");
  eval_digits->excludes(eval_x);

  auto* holder = app.add_subcommand("holder", "Hoelder exponents");
  bool want_global = false, want_ae = false, want_binary = false;
  std::string nu_text, ranks_text;
  holder->add_flag("--global", want_global, "min ln|g_i| / ln q_i");
  holder->add_flag("--ae", want_ae, "Exponent at frequency-typical points (nu = q)");
  holder->add_flag("--binary", want_binary, "Exponent at binary points");
  holder->add_option("--nu", nu_text, "Digit frequencies, e.g. [1/4,1/4,1/4,1/4]");
  holder->add_option("--digits", digits_text, "Point for the regression estimate");
  holder->add_option("--ranks", ranks_text, "FIRST:LAST[:STRIDE] for the regression");

  auto* level = app.add_subcommand("level", "Level set digits V(y)");
  std::string y_text;
  std::size_t count = 0;
  level->add_option("--y", y_text, "Level")->required();
  level->add_option("--count", count, "Derived levels g_0^n y");

  auto* preimage = app.add_subcommand("preimage", "Point of the restricted set mapped to y");
  preimage->add_option("--y", y_text, "Target in [0,1]")->required();

  auto* variation = app.add_subcommand("variation", "(sum |g_i|)^n");
  std::size_t rank = 1;
  variation->add_option("--n", rank, "Partition rank")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    Command cmd(globals);
    const SelfAffineSystem& sys = cmd.system();

    if (*analyze_cmd) {
      AnalysisOptions options;
      options.witness_samples = analyze_samples;
      options.witness_depth = cmd.depth(options.witness_depth);
      options.level_tolerance = cmd.tolerance(options.level_tolerance);
      cmd.emit(analyze(cmd.config(), sys, options));
    } else if (*sample_cmd) {
      const std::string f = cmd.format({"csv", "svg"});
      const std::size_t depth = cmd.depth(sys.default_depth());
      const auto samples = sample(sys, points, depth, !no_extrema);
      const Metadata meta{cmd.config().label, sample_command_line(points, depth, !no_extrema)};
      Sink sink(globals.out);
      if (f == "svg") {
        write_samples_svg(sink.stream(), samples, sys.bounds(), meta);
      } else {
        write_samples_csv(sink.stream(), samples, meta);
      }
      sink.close();
    } else if (*cantor) {
      const std::string f = cmd.format({"csv", "svg"});
      if (steps < 1 || steps > kMaxCantorSteps) {
        throw Error(ErrorKind::kInvalidParameters, "--steps must be in 1..24");
      }
      const CantorSpec spec = maxima_set(sys);
      if (std::pow(static_cast<double>(spec.allowed.size()), static_cast<double>(steps)) >
          kMaxCantorIntervals) {
        throw Error(ErrorKind::kInvalidParameters, "more than 2^24 intervals in the last stage");
      }
      const Metadata meta{cmd.config().label, "cantor steps=" + std::to_string(steps) +
                                                  (merged ? " merged" : "")};
      Sink sink(globals.out);
      CantorCsvWriter csv(sink.stream());
      CantorSvgWriter svg(sink.stream());
      CantorWriter& base = f == "svg" ? static_cast<CantorWriter&>(svg) : csv;
      MergingWriter merging(base);
      CantorWriter& w = merged ? static_cast<CantorWriter&>(merging) : base;
      w.begin(spec, steps, meta);
      for (std::size_t t = 1; t <= steps; ++t) {
        w.stage_begin(t);
        visit_cantor_stage(spec, t, [&](const Interval& iv) { w.interval(iv); });
        w.stage_end();
      }
      w.end();
      sink.close();
    } else if (*encode_cmd) {
      const double x = parse_real(x_text);
      const std::size_t depth = cmd.depth(sys.default_depth());
      const DigitString d = encode(x, sys.q(), depth);
      cmd.emit({{"x", x},
                {"depth", depth},
                {"digits", format_digit_string(d)},
                {"decoded", estimate_json(decode(d, sys.q()))}});
    } else if (*decode_cmd) {
      const DigitString d = parse_digit_string(digits_text, sys.size());
      cmd.emit({{"digits", format_digit_string(d)}, {"decoded", estimate_json(decode(d, sys.q()))}});
    } else if (*eval_cmd) {
      DigitString d;
      if (!digits_text.empty()) {
        d = parse_digit_string(digits_text, sys.size());
      } else if (!x_text.empty()) {
        d = encode(parse_real(x_text), sys.q(), cmd.depth(sys.default_depth()));
      } else {
        throw Error(ErrorKind::kInvalidParameters, "eval needs --digits or --x");
      }
      Json body{{"digits", format_digit_string(d)},
                {"x", estimate_json(decode(d, sys.q()))},
                {"f", estimate_json(eval(sys, d))}};
      cmd.emit(body);
    } else if (*holder) {
      Json body;
      const bool regression = !digits_text.empty() || !ranks_text.empty();
      const bool any = want_global || want_ae || want_binary || !nu_text.empty() || regression;
      if (want_global || !any) body["global"] = global_exponent(sys).exponent;
      if (want_ae || !any) body["almost_everywhere"] = almost_everywhere_exponent(sys).exponent;
      if (want_binary || !any) body["binary_points"] = local_exponent_binary(sys).exponent;
      if (!nu_text.empty()) {
        FrequencyVector nu;
        for (const auto& item : split_array(nu_text)) nu.nu.push_back(parse_real(item));
        nu.exact = true;
        body["unary"] = local_exponent_unary(sys, nu).exponent;
      }
      if (regression) {
        if (digits_text.empty() || ranks_text.empty()) {
          throw Error(ErrorKind::kInvalidParameters, "regression needs both --digits and --ranks");
        }
        const HolderReport r = empirical_exponent(
            sys, parse_digit_string(digits_text, sys.size()), parse_ranks(ranks_text));
        body["empirical"] = {{"value", r.exponent}, {"points", *r.regression_points}};
      }
      body["tolerance"] = kClosedFormTolerance;
      cmd.emit(body);
    } else if (*level) {
      const double y = parse_real(y_text);
      const double tol = cmd.tolerance(kLevelTolerance);
      const LevelSetDescriptor ls = level_set(sys, y, tol);
      Json body{{"y", y}, {"V", digits_json(ls.digits)}, {"continuum", ls.continuum},
                {"tolerance", tol}};
      if (count > 0) {
        Json derived = Json::array();
        for (const DerivedLevel& d : derived_levels(sys, y, count, tol)) {
          derived.push_back({{"y", d.y},
                             {"witness", format_digit_string(d.witness)},
                             {"witness_value", d.witness_value}});
        }
        body["derived"] = derived;
      }
      cmd.emit(body);
    } else if (*preimage) {
      const double y = parse_real(y_text);
      const std::size_t depth = cmd.depth(64);
      const DigitString d = preimage_digits(sys, y, depth);
      const double value = eval(sys, d).value;
      const double bound = preimage_bound(sys, depth);
      const double rounding = preimage_rounding(sys, depth);
      cmd.emit({{"y", y},
                {"depth", depth},
                {"digits", format_digit_string(d)},
                {"value", value},
                {"residual", std::abs(value - y)},
                {"bound", bound},
                {"rounding", rounding},
                {"within_bound", std::abs(value - y) <= bound + rounding}});
    } else if (*variation) {
      cmd.emit({{"n", rank},
                {"value", variation_lower_bound(sys, rank)},
                {"relative_tolerance", kClosedFormTolerance}});
    }
  } catch (const Error& e) {
    diagnose(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    diagnose("Internal", e.what());
    return 1;
  }
  return 0;
}
