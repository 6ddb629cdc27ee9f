#include "qsaf/self_affine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "qsaf/error.hpp"

namespace qsaf {

namespace {

double fold_values(std::span<const Digit> digits, const AffineCoefficients& g, double tail) {
  double h = tail;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    const auto d = static_cast<std::size_t>(*it);
    h = g.delta(d) + g.g(d) * h;
  }
  return h;
}

double abs_product(std::span<const Digit> digits, const AffineCoefficients& g) {
  double p = 1.0;
  for (Digit d : digits) p *= std::abs(g.g(static_cast<std::size_t>(d)));
  return p;
}

void check_system_digits(const SelfAffineSystem& system, const DigitString& digits) {
  if (digits.alphabet() != system.size()) {
    throw Error(ErrorKind::kInvalidDigit, "digit string alphabet does not match the system");
  }
}

}  // namespace

AffineCoefficients::AffineCoefficients(std::vector<double> g) : g_(std::move(g)) {
  if (g_.size() < 2) {
    throw Error(ErrorKind::kInvalidParameters, "affine coefficients need s >= 2 entries");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < g_.size(); ++i) {
    const double a = std::abs(g_[i]);
    if (!std::isfinite(g_[i]) || a <= 0.0 || a >= 1.0) {
      throw Error(ErrorKind::kInvalidParameters,
                  "g_" + std::to_string(i) + " must satisfy 0 < |g| < 1");
    }
    delta_.push_back(sum);
    sum += g_[i];
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw Error(ErrorKind::kInvalidParameters, "g entries must sum to 1 (within 1e-12)");
  }
}

double AffineCoefficients::max_abs() const noexcept {
  double out = 0.0;
  for (double v : g_) out = std::max(out, std::abs(v));
  return out;
}

BoundsIteration iterate_bounds(const AffineCoefficients& g) {
  BoundsIteration out;
  double lower = 0.0;
  double upper = 1.0;
  for (std::size_t it = 1; it <= kBoundsIterationCap; ++it) {
    double next_upper = -HUGE_VAL;
    double next_lower = HUGE_VAL;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double gi = g.g(i);
      const double di = g.delta(i);
      next_upper = std::max(next_upper, di + gi * (gi > 0 ? upper : lower));
      next_lower = std::min(next_lower, di + gi * (gi > 0 ? lower : upper));
    }
    const double step = std::max(std::abs(next_upper - upper), std::abs(next_lower - lower));
    out.steps.push_back(step);
    upper = next_upper;
    lower = next_lower;
    if (step < kBoundsStepTolerance) {
      out.bounds = {lower, upper, it, step};
      return out;
    }
  }
  throw Error(ErrorKind::kNonConvergence,
              "global bounds iteration did not settle within " +
                  std::to_string(kBoundsIterationCap) + " steps");
}

SelfAffineSystem::SelfAffineSystem(StochasticVector q, AffineCoefficients g)
    : q_(std::move(q)), g_(std::move(g)) {
  if (q_.size() != g_.size()) {
    throw Error(ErrorKind::kInvalidParameters, "q and g must have the same length");
  }
  bounds_ = iterate_bounds(g_).bounds;
  const double spread = bounds_.upper - bounds_.lower;
  const double contraction = g_.max_abs();
  double tail = spread;
  default_depth_ = 0;
  while (tail >= kDefaultAccuracy && default_depth_ < kMaxDefaultDepth) {
    tail *= contraction;
    ++default_depth_;
  }
  default_depth_ = std::max<std::size_t>(default_depth_, 1);
}

BoundsPair global_bounds(const SelfAffineSystem& system) {
  return iterate_bounds(system.g()).bounds;
}

double fixed_point_value(const SelfAffineSystem& system, Digit t) {
  if (t == 0) return 0.0;
  const auto i = static_cast<std::size_t>(t);
  if (i == system.size() - 1) return 1.0;
  return system.g().delta(i) / (1.0 - system.g().g(i));
}

Estimate eval(const SelfAffineSystem& system, const DigitString& digits) {
  check_system_digits(system, digits);
  const auto& g = system.g();
  if (digits.is_truncated()) {
    const BoundsPair& b = system.bounds();
    return {fold_values(digits.prefix(), g, 0.0),
            (b.upper - b.lower) * abs_product(digits.prefix(), g)};
  }
  double tail = 0.0;
  if (digits.ends_high()) {
    tail = 1.0;
  } else if (!digits.ends_low()) {
    const auto& period = digits.period();
    double product = 1.0;
    for (Digit d : period) product *= g.g(static_cast<std::size_t>(d));
    tail = fold_values(period, g, 0.0) / (1.0 - product);
  }
  return {fold_values(digits.prefix(), g, tail), 0.0};
}

Estimate eval_at(const SelfAffineSystem& system, double x, std::optional<std::size_t> depth) {
  return eval(system, encode(x, system.q(), depth.value_or(system.default_depth())));
}

EquationResidual functional_equation_residual(const SelfAffineSystem& system, Digit i,
                                              double x, std::optional<std::size_t> depth) {
  if (i < 0 || static_cast<std::size_t>(i) >= system.size()) {
    throw Error(ErrorKind::kInvalidDigit, "branch digit outside alphabet");
  }
  const std::size_t n = depth.value_or(system.default_depth());
  const Estimate inner = eval(system, encode(x, system.q(), n));
  const Estimate image = eval(system, encode_branch_image(x, i, system.q(), n + 1));
  const auto ii = static_cast<std::size_t>(i);
  const double rhs = system.g().delta(ii) + system.g().g(ii) * inner.value;
  const double rhs_bound = std::abs(system.g().g(ii)) * inner.error_bound;
  return {std::abs(image.value - rhs), std::max(image.error_bound, rhs_bound)};
}

double variation_lower_bound(const SelfAffineSystem& system, std::size_t n) {
  if (n == 0) {
    throw Error(ErrorKind::kPreconditionViolated, "variation rank must be >= 1");
  }
  double sum = 0.0;
  for (double v : system.g().coefficients()) sum += std::abs(v);
  return std::pow(sum, static_cast<double>(n));
}

namespace {

struct SampleWalker {
  const SelfAffineSystem& system;
  double resolution;
  std::size_t max_rank;
  std::vector<SamplePoint>& out;

  // x and value describe the left end of the cylinder; width and scale are
  // the products of q and g over its base.
  void visit(double x, double value, double width, double scale, std::size_t rank) {
    if (width <= resolution || rank >= max_rank) {
      out.push_back({x, value, 0.0});
      return;
    }
    const auto& q = system.q();
    const auto& g = system.g();
    for (std::size_t j = 0; j < system.size(); ++j) {
      visit(x + width * q.beta(j), value + scale * g.delta(j), width * q.q(j),
            scale * g.g(j), rank + 1);
    }
  }
};

}  // namespace

std::vector<SamplePoint> sample(const SelfAffineSystem& system, std::size_t points,
                                std::optional<std::size_t> depth, bool include_extrema) {
  if (points < 2) {
    throw Error(ErrorKind::kPreconditionViolated, "sample needs at least 2 points");
  }
  std::vector<SamplePoint> out;
  SampleWalker walker{system, 1.0 / static_cast<double>(points - 1),
                      depth.value_or(system.default_depth()), out};
  walker.visit(0.0, 0.0, 1.0, 1.0, 0);
  out.push_back({1.0, 1.0, 0.0});

  if (include_extrema) {
    for (Extremum sense : {Extremum::kMaximum, Extremum::kMinimum}) {
      const ExtremumLocation loc = locate_extremum(system, sense);
      out.push_back({decode(loc.argument, system.q()).value, loc.value,
                     std::abs(loc.bound - loc.value)});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SamplePoint& a, const SamplePoint& b) { return a.x < b.x; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const SamplePoint& a, const SamplePoint& b) { return a.x == b.x; }),
              out.end());
  }
  return out;
}

ExtremumLocation locate_extremum(const SelfAffineSystem& system, Extremum sense,
                                 double tolerance, std::size_t node_budget) {
  const double sign = sense == Extremum::kMaximum ? 1.0 : -1.0;
  const auto& g = system.g();
  const std::size_t s = system.size();
  const double lo = system.bounds().lower;
  const double hi = system.bounds().upper;

  std::vector<double> tails(s);
  for (std::size_t t = 0; t < s; ++t) tails[t] = fixed_point_value(system, static_cast<Digit>(t));

  struct Node {
    std::size_t parent;
    Digit digit;
    double offset;
    double scale;
  };
  std::vector<Node> nodes;
  nodes.push_back({0, -1, 0.0, 1.0});

  // Everything below is in terms of sign * f, so the search always maximizes.
  double best = -HUGE_VAL;
  std::size_t best_node = 0;
  Digit best_tail = 0;
  auto consider = [&](std::size_t index) {
    const Node& n = nodes[index];
    for (std::size_t t = 0; t < s; ++t) {
      const double v = sign * (n.offset + n.scale * tails[t]);
      if (v > best) {
        best = v;
        best_node = index;
        best_tail = static_cast<Digit>(t);
      }
    }
  };
  auto upper_bound = [&](const Node& n) {
    return std::max(sign * (n.offset + n.scale * hi), sign * (n.offset + n.scale * lo));
  };

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> frontier;
  consider(0);
  frontier.push({upper_bound(nodes[0]), 0});

  bool certified = false;
  double bound = best;
  while (true) {
    if (frontier.empty()) {
      certified = true;
      bound = best;
      break;
    }
    const auto [top_bound, index] = frontier.top();
    bound = top_bound;
    if (top_bound <= best + tolerance) {
      certified = true;
      break;
    }
    if (nodes.size() + s > node_budget) break;
    frontier.pop();
    for (std::size_t j = 0; j < s; ++j) {
      const Node parent = nodes[index];
      nodes.push_back({index, static_cast<Digit>(j), parent.offset + parent.scale * g.delta(j),
                       parent.scale * g.g(j)});
      const std::size_t child = nodes.size() - 1;
      consider(child);
      const double ub = upper_bound(nodes[child]);
      if (ub > best + tolerance) frontier.push({ub, child});
    }
  }

  std::vector<Digit> prefix;
  for (std::size_t i = best_node; i != 0; i = nodes[i].parent) prefix.push_back(nodes[i].digit);
  std::reverse(prefix.begin(), prefix.end());
  return {DigitString::periodic(s, std::move(prefix), {best_tail}), sign * best,
          sign * std::max(bound, best), nodes.size(), certified};
}

}  // namespace qsaf
