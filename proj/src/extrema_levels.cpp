#include "qsaf/extrema_levels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "qsaf/error.hpp"

namespace qsaf {

namespace {

Digit require_branch(const SelfAffineSystem& system) {
  const auto k = overshoot_branch(system);
  if (!k) {
    throw Error(ErrorKind::kConditionsNotMet,
                "needs exactly one negative g_k with delta_k > 1 and all other g_i > 0");
  }
  return *k;
}

bool contains(const std::vector<Digit>& digits, Digit d) {
  return std::find(digits.begin(), digits.end(), d) != digits.end();
}

bool digits_allowed(const CantorSpec& spec, const DigitString& digits) {
  auto ok = [&](Digit d) { return std::binary_search(spec.allowed.begin(), spec.allowed.end(), d); };
  return std::all_of(digits.prefix().begin(), digits.prefix().end(), ok) &&
         std::all_of(digits.period().begin(), digits.period().end(), ok);
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double uniform_unit(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::optional<Digit> overshoot_branch(const SelfAffineSystem& system) {
  const auto& g = system.g();
  std::optional<Digit> k;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.g(i) < 0) {
      if (k) return std::nullopt;
      k = static_cast<Digit>(i);
    }
  }
  if (!k || !(g.delta(static_cast<std::size_t>(*k)) > 1.0)) return std::nullopt;
  // delta_0 = 0 and delta_1 = g_0 < 1, so the overshoot can only happen from k = 2 on.
  if (*k < 2) {
    throw Error(ErrorKind::kInvariantViolated, "overshoot branch below 2");
  }
  return k;
}

MaximumResult closed_form_max(const SelfAffineSystem& system) {
  const Digit k = require_branch(system);
  MaximumResult out;
  out.branch = k;
  out.value = -HUGE_VAL;
  for (std::size_t i = 0; i < system.size(); ++i) {
    out.value = std::max(out.value, fixed_point_value(system, static_cast<Digit>(i)));
  }
  out.argmax_digits = level_set(system, out.value).digits;
  out.oracle_value = system.bounds().upper;

  if (std::abs(out.value - out.oracle_value) > kOracleAgreement) {
    throw Error(ErrorKind::kInvariantViolated,
                "closed-form maximum disagrees with the bounds iteration");
  }
  if (contains(out.argmax_digits, 0) || contains(out.argmax_digits, k)) {
    throw Error(ErrorKind::kInvariantViolated, "0 or k among the maximizing digits");
  }
  return out;
}

double closed_form_min(const SelfAffineSystem& system) {
  const Digit k = require_branch(system);
  const MaximumResult max = closed_form_max(system);
  const auto ki = static_cast<std::size_t>(k);
  const double m = std::min(0.0, system.g().delta(ki) + system.g().g(ki) * max.value);
  if (!(std::abs(m) < max.value)) {
    throw Error(ErrorKind::kInvariantViolated, "|m| < M violated");
  }
  if (std::abs(m - system.bounds().lower) > kOracleAgreement) {
    throw Error(ErrorKind::kInvariantViolated,
                "closed-form minimum disagrees with the bounds iteration");
  }
  return m;
}

LevelSetDescriptor level_set(const SelfAffineSystem& system, double y, double tolerance) {
  LevelSetDescriptor out;
  out.y = y;
  const auto& g = system.g();
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (std::abs(g.delta(i) - (1.0 - g.g(i)) * y) <= tolerance) {
      out.digits.push_back(static_cast<Digit>(i));
    }
  }
  out.continuum = out.digits.size() >= 2;
  return out;
}

std::vector<DerivedLevel> derived_levels(const SelfAffineSystem& system, double y,
                                         std::size_t count, double tolerance) {
  std::vector<DerivedLevel> out;
  if (count == 0) return out;
  const LevelSetDescriptor base = level_set(system, y, tolerance);
  if (!base.continuum) {
    throw Error(ErrorKind::kPreconditionViolated, "y is not a continuum level");
  }
  const double g0 = system.g().g(0);
  if (!(g0 > 0)) {
    throw Error(ErrorKind::kPreconditionViolated, "derived levels need g_0 > 0");
  }
  double level = y;
  for (std::size_t n = 1; n <= count; ++n) {
    level *= g0;
    DigitString witness = DigitString::periodic(system.size(), std::vector<Digit>(n, 0), base.digits);
    const double value = eval(system, witness).value;
    if (std::abs(value - level) > kLevelTolerance) {
      throw Error(ErrorKind::kInvariantViolated,
                  "witness for derived level " + std::to_string(n) + " misses its value");
    }
    out.push_back({level, std::move(witness), value});
  }
  return out;
}

double moran_dimension(const StochasticVector& q, std::span<const Digit> allowed) {
  if (allowed.empty()) {
    throw Error(ErrorKind::kPreconditionViolated, "Moran equation needs a non-empty digit set");
  }
  if (allowed.size() == 1) return 0.0;
  if (allowed.size() == q.size()) return 1.0;
  auto excess = [&](double x) {
    double sum = 0.0;
    for (Digit d : allowed) sum += std::pow(q.q(static_cast<std::size_t>(d)), x);
    return sum - 1.0;
  };
  // excess(0) = |allowed| - 1 > 0, excess(1) = sum q - 1 < 0, strictly decreasing.
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > kMoranTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CantorSpec make_cantor_spec(const StochasticVector& q, std::vector<Digit> allowed) {
  std::sort(allowed.begin(), allowed.end());
  allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
  if (allowed.empty()) {
    throw Error(ErrorKind::kPreconditionViolated, "allowed digit set must be non-empty");
  }
  if (allowed.front() < 0 || static_cast<std::size_t>(allowed.back()) >= q.size()) {
    throw Error(ErrorKind::kInvalidDigit, "allowed digit outside alphabet");
  }
  const double dim = moran_dimension(q, allowed);
  const bool singleton = allowed.size() == 1;
  return {q, std::move(allowed), dim, singleton};
}

CantorSpec maxima_set(const SelfAffineSystem& system) {
  return make_cantor_spec(system.q(), closed_form_max(system).argmax_digits);
}

namespace {

void visit_cylinders(const CantorSpec& spec, std::size_t remaining, double left, double length,
                     const std::function<void(const Interval&)>& visit) {
  if (remaining == 0) {
    visit({left, left + length});
    return;
  }
  for (Digit d : spec.allowed) {
    const auto i = static_cast<std::size_t>(d);
    visit_cylinders(spec, remaining - 1, left + length * spec.q.beta(i), length * spec.q.q(i),
                    visit);
  }
}

}  // namespace

void visit_cantor_stage(const CantorSpec& spec, std::size_t t,
                        const std::function<void(const Interval&)>& visit) {
  visit_cylinders(spec, t, 0.0, 1.0, visit);
}

std::vector<Interval> cantor_stage(const CantorSpec& spec, std::size_t t) {
  std::vector<Interval> out;
  visit_cantor_stage(spec, t, [&](const Interval& iv) { out.push_back(iv); });
  return out;
}

std::vector<std::vector<Interval>> cantor_construction(const CantorSpec& spec,
                                                       std::size_t steps) {
  if (steps == 0) {
    throw Error(ErrorKind::kPreconditionViolated, "construction needs at least one step");
  }
  std::vector<std::vector<Interval>> out;
  for (std::size_t t = 1; t <= steps; ++t) out.push_back(cantor_stage(spec, t));
  return out;
}

std::vector<Interval> merge_touching(std::span<const Interval> intervals) {
  std::vector<Interval> out;
  for (const Interval& iv : intervals) {
    if (!out.empty() && iv.left <= out.back().right) {
      out.back().right = std::max(out.back().right, iv.right);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

bool membership(const CantorSpec& spec, const DigitString& digits) {
  if (digits.alphabet() != spec.q.size()) {
    throw Error(ErrorKind::kAlphabetMismatch, "digit string alphabet does not match the set");
  }
  if (digits_allowed(spec, digits)) return true;
  const auto twin = twin_representation(digits);
  return twin && digits_allowed(spec, *twin);
}

DigitString preimage_digits(const SelfAffineSystem& system, double y, std::size_t depth) {
  const auto k = static_cast<std::size_t>(require_branch(system));
  if (!(y >= 0.0 && y <= 1.0)) {
    throw Error(ErrorKind::kOutOfDomain, "preimage target must lie in [0, 1]");
  }
  if (depth == 0) {
    throw Error(ErrorKind::kPreconditionViolated, "preimage depth must be >= 1");
  }
  const auto& g = system.g();
  std::vector<Digit> digits;
  digits.reserve(depth);
  double t = y;
  for (std::size_t step = 0; step < depth; ++step) {
    if (t == 0.0) return DigitString::periodic(system.size(), std::move(digits), {0});
    std::size_t a = k - 1;
    while (a > 0 && g.delta(a) > t) --a;
    digits.push_back(static_cast<Digit>(a));
    t = std::clamp((t - g.delta(a)) / g.g(a), 0.0, 1.0);
  }
  if (t == 0.0) return DigitString::periodic(system.size(), std::move(digits), {0});
  return DigitString::truncated(system.size(), std::move(digits));
}

double preimage_bound(const SelfAffineSystem& system, std::size_t depth) {
  const auto k = static_cast<std::size_t>(require_branch(system));
  double g_star = 0.0;
  for (std::size_t i = 0; i < k; ++i) g_star = std::max(g_star, system.g().g(i));
  const BoundsPair& b = system.bounds();
  return (b.upper - b.lower) * std::pow(g_star, static_cast<double>(depth));
}

double preimage_rounding(const SelfAffineSystem& system, std::size_t depth) {
  const BoundsPair& b = system.bounds();
  const double scale = std::max({1.0, b.upper, -b.lower});
  return 8.0 * static_cast<double>(depth) * std::numeric_limits<double>::epsilon() * scale;
}

NonInvarianceCertificate non_invariance_certificate(const SelfAffineSystem& system,
                                                    std::size_t samples, std::size_t depth,
                                                    std::uint64_t seed) {
  NonInvarianceCertificate out;
  out.branch = require_branch(system);
  out.depth = depth;
  for (Digit i = 0; i < out.branch; ++i) out.allowed.push_back(i);
  out.dimension = moran_dimension(system.q(), out.allowed);
  if (!(out.dimension < 1.0)) {
    throw Error(ErrorKind::kInvariantViolated, "restricted set has dimension 1");
  }
  if (samples == 0) return out;

  const double bound = preimage_bound(system, depth);
  const double rounding = preimage_rounding(system, depth);
  out.witnesses.resize(samples);
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const double y = uniform_unit(seed + j);
      DigitString digits = preimage_digits(system, y, depth);
      const double value = eval(system, digits).value;
      out.witnesses[j] = {y, std::move(digits), value, std::abs(value - y), bound, rounding};
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  const std::size_t chunk = (samples + workers - 1) / workers;
  {
    std::vector<std::jthread> pool;
    for (std::size_t begin = chunk; begin < samples; begin += chunk) {
      pool.emplace_back(fill, begin, std::min(samples, begin + chunk));
    }
    fill(0, std::min(samples, chunk));
  }

  for (const auto& w : out.witnesses) {
    out.max_residual = std::max(out.max_residual, w.residual);
    out.all_within_bound = out.all_within_bound && w.residual <= w.bound + w.rounding;
  }
  return out;
}

}  // namespace qsaf
