#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "qsaf/qs_codec.hpp"
#include "qsaf/self_affine.hpp"

namespace qsaf {

enum class HolderKind {
  kGlobal,             // min_i ln|g_i| / ln q_i
  kLocalUnary,         // L at a unary point with digit frequencies nu
  kLocalBinary,        // K at every binary point
  kAlmostEverywhere,   // L with nu = q
  kEmpirical,          // regression over cylinder oscillations
};

std::string_view to_string(HolderKind kind) noexcept;

struct HolderReport {
  double exponent = 0.0;
  HolderKind kind = HolderKind::kGlobal;
  std::optional<FrequencyVector> frequencies_used;
  std::optional<std::size_t> regression_points;
  // Set for the L-type exponents: the condition holds for every alpha < L and
  // fails for alpha > L, but behaviour at alpha = L itself is not determined.
  bool critical_exponent_undetermined = false;
};

HolderReport global_exponent(const SelfAffineSystem& system);

// L = sum nu_i ln|g_i| / sum nu_i ln q_i. Requires nu_0 < 1 and nu_{s-1} < 1.
HolderReport local_exponent_unary(const SelfAffineSystem& system, const FrequencyVector& nu);

HolderReport almost_everywhere_exponent(const SelfAffineSystem& system);

// K = min(ln|g_0| / ln q_0, ln|g_{s-1}| / ln q_{s-1}).
HolderReport local_exponent_binary(const SelfAffineSystem& system);

struct RankRange {
  std::size_t first = 1;
  std::size_t last = 1;
  std::size_t stride = 1;
};

// Ordinary least-squares slope of ln osc_n against ln diam_n over the ranks in
// `ranks`, where for the rank-n cylinder around the point
//   osc_n  = |f(right) - f(left)| = prod |g_{b_j}|,
//   diam_n = prod q_{b_j}.
// Needs at least two ranks.
HolderReport empirical_exponent(const SelfAffineSystem& system, const DigitString& digits,
                                RankRange ranks);

// sum q_i ln|g_i| < sum q_i ln q_i.
bool singularity_predicate(const SelfAffineSystem& system);

// |g_i| > q_i for every i. Sufficient, not necessary.
bool nowhere_differentiable_predicate(const SelfAffineSystem& system);

}  // namespace qsaf
