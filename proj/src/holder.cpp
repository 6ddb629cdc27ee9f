#include "qsaf/holder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsaf/error.hpp"

namespace qsaf {

namespace {

double quotient(const SelfAffineSystem& system, std::size_t i) {
  return std::log(std::abs(system.g().g(i))) / std::log(system.q().q(i));
}

double frequency_ratio(const SelfAffineSystem& system, std::span<const double> nu) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (nu[i] == 0.0) continue;
    num += nu[i] * std::log(std::abs(system.g().g(i)));
    den += nu[i] * std::log(system.q().q(i));
  }
  return num / den;
}

}  // namespace

std::string_view to_string(HolderKind kind) noexcept {
  switch (kind) {
    case HolderKind::kGlobal: return "global";
    case HolderKind::kLocalUnary: return "local_unary";
    case HolderKind::kLocalBinary: return "local_binary";
    case HolderKind::kAlmostEverywhere: return "almost_everywhere";
    case HolderKind::kEmpirical: return "empirical";
  }
  return "unknown";
}

HolderReport global_exponent(const SelfAffineSystem& system) {
  double best = HUGE_VAL;
  for (std::size_t i = 0; i < system.size(); ++i) best = std::min(best, quotient(system, i));
  HolderReport out;
  out.exponent = best;
  out.kind = HolderKind::kGlobal;
  return out;
}

HolderReport local_exponent_unary(const SelfAffineSystem& system, const FrequencyVector& nu) {
  const std::size_t s = system.size();
  if (nu.nu.size() != s) {
    throw Error(ErrorKind::kAlphabetMismatch, "frequency vector length differs from the system");
  }
  double sum = 0.0;
  for (double v : nu.nu) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kInvalidParameters, "frequencies must lie in [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw Error(ErrorKind::kInvalidParameters, "frequencies must sum to 1");
  }
  if (nu.nu.front() >= 1.0 || nu.nu.back() >= 1.0) {
    throw Error(ErrorKind::kHypothesisViolated,
                "the unary exponent needs nu_0 < 1 and nu_{s-1} < 1");
  }
  HolderReport out;
  out.exponent = frequency_ratio(system, nu.nu);
  out.kind = HolderKind::kLocalUnary;
  out.frequencies_used = nu;
  out.critical_exponent_undetermined = true;
  return out;
}

HolderReport almost_everywhere_exponent(const SelfAffineSystem& system) {
  const auto w = system.q().weights();
  FrequencyVector nu{std::vector<double>(w.begin(), w.end()), 0, true};
  HolderReport out = local_exponent_unary(system, nu);
  out.kind = HolderKind::kAlmostEverywhere;
  return out;
}

HolderReport local_exponent_binary(const SelfAffineSystem& system) {
  HolderReport out;
  out.exponent = std::min(quotient(system, 0), quotient(system, system.size() - 1));
  out.kind = HolderKind::kLocalBinary;
  return out;
}

HolderReport empirical_exponent(const SelfAffineSystem& system, const DigitString& digits,
                                RankRange ranks) {
  if (digits.alphabet() != system.size()) {
    throw Error(ErrorKind::kAlphabetMismatch, "digit string alphabet does not match the system");
  }
  if (ranks.first == 0 || ranks.stride == 0 || ranks.last < ranks.first) {
    throw Error(ErrorKind::kPreconditionViolated, "rank range must satisfy 1 <= first <= last");
  }
  if (!digits.has_digit(ranks.last - 1)) {
    throw Error(ErrorKind::kInsufficientDepth, "digit string ends before the last rank");
  }

  std::vector<double> xs;
  std::vector<double> ys;
  double log_diam = 0.0;
  double log_osc = 0.0;
  std::size_t next = ranks.first;
  for (std::size_t n = 1; n <= ranks.last; ++n) {
    const auto d = static_cast<std::size_t>(digits.digit(n - 1));
    log_diam += std::log(system.q().q(d));
    log_osc += std::log(std::abs(system.g().g(d)));
    if (n == next) {
      xs.push_back(log_diam);
      ys.push_back(log_osc);
      next += ranks.stride;
    }
  }
  if (xs.size() < 2) {
    throw Error(ErrorKind::kInsufficientDepth, "regression needs at least two ranks");
  }

  const auto count = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
  }

  HolderReport out;
  out.exponent = sxy / sxx;
  out.kind = HolderKind::kEmpirical;
  out.regression_points = xs.size();
  out.critical_exponent_undetermined = true;
  return out;
}

bool singularity_predicate(const SelfAffineSystem& system) {
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const double qi = system.q().q(i);
    lhs += qi * std::log(std::abs(system.g().g(i)));
    rhs += qi * std::log(qi);
  }
  return lhs < rhs;
}

bool nowhere_differentiable_predicate(const SelfAffineSystem& system) {
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (!(std::abs(system.g().g(i)) > system.q().q(i))) return false;
  }
  return true;
}

}  // namespace qsaf
