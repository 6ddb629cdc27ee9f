#pragma once

// Extrema, level sets and digit-restricted Cantor sets of f in the regime
// where exactly one coefficient g_k is negative and delta_k > 1 (f is then
// nowhere monotone, yet M, m and the set of maximum points have closed forms).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qsaf/qs_codec.hpp"
#include "qsaf/self_affine.hpp"

namespace qsaf {

inline constexpr double kLevelTolerance = 1e-10;
inline constexpr double kMoranTolerance = 1e-12;
inline constexpr double kOracleAgreement = 1e-10;

// The unique k with g_k < 0 and delta_k > 1 when every other g_i is positive;
// empty otherwise (including when two or more coefficients are negative).
std::optional<Digit> overshoot_branch(const SelfAffineSystem& system);

struct MaximumResult {
  double value = 0.0;             // M = max_i delta_i / (1 - g_i)
  std::vector<Digit> argmax_digits;  // V(M)
  Digit branch = 0;               // k
  double oracle_value = 0.0;      // M from the bounds iteration
};

// Throws ConditionsNotMet outside the regime, InvariantViolated when the
// closed form disagrees with the oracle by more than 1e-10 or when 0 or k
// lands in V(M).
MaximumResult closed_form_max(const SelfAffineSystem& system);

// m = min(0, delta_k + g_k M), with |m| < M.
double closed_form_min(const SelfAffineSystem& system);

struct LevelSetDescriptor {
  double y = 0.0;
  std::vector<Digit> digits;  // V(y) = {i : delta_i / (1 - g_i) = y}
  bool continuum = false;     // |V(y)| >= 2
};

// Every string over V(y) maps to y, so C[q, V(y)] is contained in f^{-1}(y).
// Equality is only known at y = M.
LevelSetDescriptor level_set(const SelfAffineSystem& system, double y,
                             double tolerance = kLevelTolerance);

struct DerivedLevel {
  double y = 0.0;          // g_0^n y
  DigitString witness;     // 0^n followed by the digits of V(y), repeating
  double witness_value = 0.0;
};

// Levels g_0^n y, n = 1..count, each carried by a continuum of points.
// Requires a continuum level y and g_0 > 0.
std::vector<DerivedLevel> derived_levels(const SelfAffineSystem& system, double y,
                                         std::size_t count,
                                         double tolerance = kLevelTolerance);

// Root of sum_{i in allowed} q_i^x = 1 on [0, 1] by bisection.
double moran_dimension(const StochasticVector& q, std::span<const Digit> allowed);

struct CantorSpec {
  StochasticVector q;
  std::vector<Digit> allowed;  // sorted, unique, non-empty
  double dimension = 0.0;
  bool singleton = false;      // |allowed| == 1: the set is the single point (i)
};

CantorSpec make_cantor_spec(const StochasticVector& q, std::vector<Digit> allowed);

// The set of maximum points is C[q, V(M)].
CantorSpec maxima_set(const SelfAffineSystem& system);

struct Interval {
  double left = 0.0;
  double right = 0.0;
};

// Closures of the rank-t cylinders whose base digits all lie in `allowed`,
// sorted by left end: |allowed|^t intervals of total length (sum q_allowed)^t.
std::vector<Interval> cantor_stage(const CantorSpec& spec, std::size_t t);
// Same intervals in the same order, one at a time.
void visit_cantor_stage(const CantorSpec& spec, std::size_t t,
                        const std::function<void(const Interval&)>& visit);
std::vector<std::vector<Interval>> cantor_construction(const CantorSpec& spec,
                                                       std::size_t steps);
// Presentational view: joins intervals whose ends touch.
std::vector<Interval> merge_touching(std::span<const Interval> intervals);

// All digits in `allowed`; a binary point qualifies if either twin does.
// Truncations are checked on the digits they carry.
bool membership(const CantorSpec& spec, const DigitString& digits);

// Greedy preimage inside C[q, {0..k-1}]: pick the largest a < k with
// delta_a <= y_t, then y_{t+1} = (y_t - delta_a) / g_a.
DigitString preimage_digits(const SelfAffineSystem& system, double y, std::size_t depth);

// (M - m) * g_*^depth with g_* = max_{i<k} g_i.
double preimage_bound(const SelfAffineSystem& system, std::size_t depth);
// Floating-point slack on top of preimage_bound: 8 * depth * eps * max(1, M, -m).
// Only matters once g_*^depth drops below double resolution.
double preimage_rounding(const SelfAffineSystem& system, std::size_t depth);

struct PreimageWitness {
  double y = 0.0;
  DigitString digits;
  double value = 0.0;
  double residual = 0.0;
  double bound = 0.0;
  double rounding = 0.0;
};

struct NonInvarianceCertificate {
  Digit branch = 0;
  std::vector<Digit> allowed;  // {0, ..., k-1}
  double dimension = 0.0;      // < 1
  std::size_t depth = 0;
  std::vector<PreimageWitness> witnesses;
  double max_residual = 0.0;
  bool all_within_bound = true;  // residual <= bound + rounding for every witness
};

inline constexpr std::uint64_t kDefaultWitnessSeed = 0x5eed'0f'c0ffeeULL;

// A set of dimension < 1 and zero length whose image under f covers [0, 1]:
// the dimension of C[q, {0..k-1}] plus `samples` preimage witnesses for
// y_j drawn uniformly from per-sample seeds.
NonInvarianceCertificate non_invariance_certificate(const SelfAffineSystem& system,
                                                    std::size_t samples,
                                                    std::size_t depth = 64,
                                                    std::uint64_t seed = kDefaultWitnessSeed);

}  // namespace qsaf
