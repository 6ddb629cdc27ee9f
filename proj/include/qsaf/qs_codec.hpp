#pragma once

// Digit expansions of [0,1] over a positive stochastic vector q = (q_0..q_{s-1}):
//
//   x = beta_{a1} + sum_{k>=2} beta_{ak} * q_{a1} * ... * q_{a(k-1)},
//   beta_0 = 0, beta_i = q_0 + ... + q_{i-1}.
//
// Numbers with a digit string ending in (0) also have a twin ending in (s-1);
// every other number has exactly one expansion.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qsaf {

using Digit = int;

// Tolerance on |sum(q) - 1| (and on sum(g) for affine coefficients).
inline constexpr double kStochasticTolerance = 1e-12;

class StochasticVector {
 public:
  explicit StochasticVector(std::vector<double> q);

  std::size_t size() const noexcept { return q_.size(); }
  double q(std::size_t i) const { return q_.at(i); }
  double beta(std::size_t i) const { return beta_.at(i); }
  // Right end of the rank-1 cylinder of digit i: beta_{i+1}, or 1 for i = s-1.
  double beta_next(std::size_t i) const;

  std::span<const double> weights() const noexcept { return q_; }
  std::span<const double> offsets() const noexcept { return beta_; }

  friend bool operator==(const StochasticVector&, const StochasticVector&) = default;

 private:
  std::vector<double> q_;
  std::vector<double> beta_;
};

// An eventually periodic digit sequence, or a finite truncation of an
// aperiodic one (empty period). Periodic strings are kept canonical: minimal
// period, and the prefix never ends with the digit that closes the period.
class DigitString {
 public:
  // The point 0 over a binary alphabet.
  DigitString() : period_{0} {}

  static DigitString periodic(std::size_t alphabet, std::vector<Digit> prefix,
                              std::vector<Digit> period);
  static DigitString truncated(std::size_t alphabet, std::vector<Digit> digits);

  std::size_t alphabet() const noexcept { return alphabet_; }
  const std::vector<Digit>& prefix() const noexcept { return prefix_; }
  const std::vector<Digit>& period() const noexcept { return period_; }

  bool is_truncated() const noexcept { return period_.empty(); }
  bool is_periodic() const noexcept { return !period_.empty(); }
  // Period (0): the low representation of a binary point (or 0 itself).
  bool ends_low() const noexcept;
  // Period (s-1): the high representation of a binary point (or 1 itself).
  bool ends_high() const noexcept;

  bool has_digit(std::size_t index) const noexcept;
  // 0-based access; throws InsufficientDepth past the end of a truncation.
  Digit digit(std::size_t index) const;
  std::vector<Digit> first(std::size_t n) const;

  friend bool operator==(const DigitString&, const DigitString&) = default;

 private:
  DigitString(std::size_t alphabet, std::vector<Digit> prefix,
              std::vector<Digit> period);

  std::size_t alphabet_ = 2;
  std::vector<Digit> prefix_;
  std::vector<Digit> period_;
};

struct Cylinder {
  std::vector<Digit> base;

  std::size_t rank() const noexcept { return base.size(); }
};

struct CylinderBounds {
  double left = 0.0;
  double right = 1.0;
  double length = 1.0;
};

struct FrequencyVector {
  std::vector<double> nu;
  std::size_t n = 0;  // digits counted (one period when exact)
  bool exact = false;
};

// A computed value together with a bound on its distance to the true value.
struct Estimate {
  double value = 0.0;
  double error_bound = 0.0;
};

struct RunLength {
  std::size_t length = 0;
  bool infinite = false;
};

// Periodic tails are summed in closed form (error_bound = 0); truncations
// return the partial sum with error_bound = product of q over all digits.
Estimate decode(const DigitString& digits, const StochasticVector& q);

// First `depth` digits of x. Digits are extracted exactly from the binary64
// value of x, so they are the true digits of that number at every depth.
// Boundary points resolve to the (0)-tail form; x = 1 yields period (s-1); an
// expansion that terminates within `depth` digits comes back periodic.
DigitString encode(double x, const StochasticVector& q, std::size_t depth);

// Digits of beta_i + w_i * x computed without rounding, where
// w_i = beta_next(i) - beta(i) is the exact width of the rank-1 cylinder i.
DigitString encode_branch_image(double x, Digit branch, const StochasticVector& q,
                                std::size_t depth);

std::optional<DigitString> twin_representation(const DigitString& digits);

// Lexicographic order after folding high twins onto their (0)-tail form.
// Truncations that agree on every available digit compare unordered.
std::partial_ordering compare(const DigitString& a, const DigitString& b);

CylinderBounds cylinder_bounds(const Cylinder& cylinder, const StochasticVector& q);

// Relative frequencies over the first n digits, or the exact limit from one
// period when n is empty (the prefix does not contribute to the limit).
FrequencyVector digit_frequencies(const DigitString& digits,
                                  std::optional<std::size_t> n = std::nullopt);

// t_i(x, n): number of consecutive digits equal to i right after position n
// (1-based positions n+1, n+2, ...).
RunLength run_length(const DigitString& digits, Digit i, std::size_t n);

}  // namespace qsaf
