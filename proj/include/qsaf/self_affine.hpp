#pragma once

// The self-affine function
//
//   f(x) = delta_{a1} + sum_{k>=2} delta_{ak} * g_{a1} * ... * g_{a(k-1)}
//
// where a1 a2 ... are the digits of x over q. It solves
// f(beta_i + q_i x) = delta_i + g_i f(x) for every digit i.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qsaf/qs_codec.hpp"

namespace qsaf {

class AffineCoefficients {
 public:
  // Requires 0 < |g_i| < 1 and sum(g) = 1 within 1e-12.
  explicit AffineCoefficients(std::vector<double> g);

  std::size_t size() const noexcept { return g_.size(); }
  double g(std::size_t i) const { return g_.at(i); }
  double delta(std::size_t i) const { return delta_.at(i); }
  double max_abs() const noexcept;

  std::span<const double> coefficients() const noexcept { return g_; }
  std::span<const double> offsets() const noexcept { return delta_; }

  friend bool operator==(const AffineCoefficients&, const AffineCoefficients&) = default;

 private:
  std::vector<double> g_;
  std::vector<double> delta_;
};

// Global bounds m <= f <= M. Since f(0) = 0 and f(1) = 1, lower <= 0 and upper >= 1.
struct BoundsPair {
  double lower = 0.0;  // m
  double upper = 1.0;  // M
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct BoundsIteration {
  BoundsPair bounds;
  std::vector<double> steps;  // sup-norm change of (m, M) per iteration
};

inline constexpr double kBoundsStepTolerance = 1e-14;
inline constexpr std::size_t kBoundsIterationCap = 10000;
inline constexpr double kDefaultAccuracy = 1e-12;
inline constexpr std::size_t kMaxDefaultDepth = 4096;

// Interval fixed-point iteration for (m, M) started from (0, 1):
//   M <- max_i delta_i + g_i * (g_i > 0 ? M : m)
//   m <- min_i delta_i + g_i * (g_i > 0 ? m : M)
// The bounds depend on g alone. Throws NonConvergence after the cap.
BoundsIteration iterate_bounds(const AffineCoefficients& g);

class SelfAffineSystem {
 public:
  SelfAffineSystem(StochasticVector q, AffineCoefficients g);

  const StochasticVector& q() const noexcept { return q_; }
  const AffineCoefficients& g() const noexcept { return g_; }
  std::size_t size() const noexcept { return q_.size(); }

  const BoundsPair& bounds() const noexcept { return bounds_; }
  // Smallest n with (max|g|)^n (M - m) < 1e-12, capped at 4096.
  std::size_t default_depth() const noexcept { return default_depth_; }

 private:
  StochasticVector q_;
  AffineCoefficients g_;
  BoundsPair bounds_;
  std::size_t default_depth_ = 1;
};

BoundsPair global_bounds(const SelfAffineSystem& system);

// f at the periodic point (t): 0 for t = 0, 1 for t = s-1, else delta_t / (1 - g_t).
double fixed_point_value(const SelfAffineSystem& system, Digit t);

// Periodic strings evaluate in closed form with error_bound 0. Truncations
// return the partial sum with error_bound = (M - m) * prod |g| over the digits.
Estimate eval(const SelfAffineSystem& system, const DigitString& digits);

// encode followed by eval; depth defaults to system.default_depth().
Estimate eval_at(const SelfAffineSystem& system, double x,
                 std::optional<std::size_t> depth = std::nullopt);

struct EquationResidual {
  double residual = 0.0;
  double error_bound = 0.0;  // bound of either side; residual <= 2 * error_bound
};

// |f(beta_i + q_i x) - delta_i - g_i f(x)| with the left side expanded to
// depth + 1 digits and the right side to depth digits.
EquationResidual functional_equation_residual(const SelfAffineSystem& system, Digit i,
                                              double x,
                                              std::optional<std::size_t> depth = std::nullopt);

// (sum |g_i|)^n: the variation of f over the rank-n cylinder partition, a lower
// bound for the total variation on [0, 1].
double variation_lower_bound(const SelfAffineSystem& system, std::size_t n);

struct SamplePoint {
  double x = 0.0;
  double value = 0.0;
  double error_bound = 0.0;
};

// Values at the left ends of the cylinders obtained by subdividing until each
// cylinder is no longer than 1/(points-1) (or reaches rank `depth`), plus x = 1.
// With include_extrema the located argmax and argmin are merged in as well.
// Sorted by x; deterministic.
std::vector<SamplePoint> sample(const SelfAffineSystem& system, std::size_t points,
                                std::optional<std::size_t> depth = std::nullopt,
                                bool include_extrema = false);

enum class Extremum { kMaximum, kMinimum };

struct ExtremumLocation {
  DigitString argument;
  double value = 0.0;
  // Best bound over unexplored cylinders; |bound - value| <= tolerance when certified.
  double bound = 0.0;
  std::size_t nodes = 0;
  bool certified = false;
};

// Best-first branch and bound over cylinders. A cylinder c maps as
// f(c.tail) = A_c + G_c f(tail), so its range lies in A_c + G_c [m, M];
// candidates are the eventually constant points c(t).
ExtremumLocation locate_extremum(const SelfAffineSystem& system, Extremum sense,
                                 double tolerance = kDefaultAccuracy,
                                 std::size_t node_budget = std::size_t{1} << 20);

}  // namespace qsaf
