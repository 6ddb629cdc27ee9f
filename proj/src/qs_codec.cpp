#include "qsaf/qs_codec.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "qsaf/error.hpp"

namespace qsaf {

namespace {

void check_digits(const std::vector<Digit>& digits, std::size_t alphabet) {
  for (Digit d : digits) {
    if (d < 0 || static_cast<std::size_t>(d) >= alphabet) {
      throw Error(ErrorKind::kInvalidDigit,
                  "digit " + std::to_string(d) + " outside alphabet of size " +
                      std::to_string(alphabet));
    }
  }
}

void check_alphabet(const DigitString& digits, const StochasticVector& q) {
  if (digits.alphabet() != q.size()) {
    throw Error(ErrorKind::kInvalidDigit,
                "digit string over " + std::to_string(digits.alphabet()) +
                    " symbols used with a stochastic vector of size " +
                    std::to_string(q.size()));
  }
}

std::size_t minimal_period(const std::vector<Digit>& period) {
  const std::size_t n = period.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool repeats = true;
    for (std::size_t i = p; i < n && repeats; ++i) repeats = period[i] == period[i - p];
    if (repeats) return p;
  }
  return n;
}

// value = mantissa * 2^exponent, exactly.
struct Dyadic {
  mpz_class mantissa;
  long exponent = 0;
};

Dyadic to_dyadic(double v) {
  if (v == 0.0) return {mpz_class(0), 0};
  int e = 0;
  const double fraction = std::frexp(v, &e);
  const auto m = static_cast<long>(std::ldexp(fraction, 53));
  return {mpz_class(m), static_cast<long>(e) - 53};
}

mpz_class scaled(const Dyadic& d, long exponent) {
  mpz_class out = d.mantissa;
  mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(),
               static_cast<mp_bitcnt_t>(d.exponent - exponent));
  return out;
}

Dyadic add(const Dyadic& a, const Dyadic& b) {
  const long e = std::min(a.exponent, b.exponent);
  return {scaled(a, e) + scaled(b, e), e};
}

Dyadic subtract(const Dyadic& a, const Dyadic& b) {
  const long e = std::min(a.exponent, b.exponent);
  return {scaled(a, e) - scaled(b, e), e};
}

Dyadic multiply(const Dyadic& a, const Dyadic& b) {
  return {a.mantissa * b.mantissa, a.exponent + b.exponent};
}

std::size_t trailing_zeros(const mpz_class& v) {
  return v == 0 ? 0 : mpz_scan1(v.get_mpz_t(), 0);
}

double ratio_estimate(const mpz_class& num, const mpz_class& den) {
  long en = 0;
  long ed = 0;
  const double dn = mpz_get_d_2exp(&en, num.get_mpz_t());
  const double dd = mpz_get_d_2exp(&ed, den.get_mpz_t());
  return std::ldexp(dn / dd, static_cast<int>(en - ed));
}

// Greedy cylinder descent on exact integers. All offsets and the target are
// brought to a common scale 2^-E; `remainder / width` is the position of the
// target inside the current cylinder.
DigitString encode_exact(const Dyadic& target, const StochasticVector& q,
                         std::size_t depth) {
  const std::size_t s = q.size();
  std::vector<Dyadic> offsets;
  offsets.reserve(s + 1);
  for (std::size_t i = 0; i < s; ++i) offsets.push_back(to_dyadic(q.beta(i)));
  offsets.push_back({mpz_class(1), 0});

  long scale = target.exponent;
  for (const auto& d : offsets) scale = std::min(scale, d.exponent);
  const mpz_class one = scaled(offsets.back(), scale);
  const auto shift = static_cast<mp_bitcnt_t>(-scale);
  std::vector<mpz_class> offset(s + 1);
  for (std::size_t i = 0; i <= s; ++i) offset[i] = scaled(offsets[i], scale);
  std::vector<mpz_class> width(s);
  for (std::size_t i = 0; i < s; ++i) width[i] = offset[i + 1] - offset[i];

  mpz_class remainder = scaled(target, scale);
  if (remainder < 0 || remainder > one) {
    throw Error(ErrorKind::kOutOfDomain, "point outside [0, 1]");
  }
  if (remainder == one) return DigitString::periodic(s, {}, {static_cast<Digit>(s - 1)});
  if (remainder == 0) return DigitString::periodic(s, {}, {0});

  mpz_class cell = one;
  std::vector<Digit> digits;
  digits.reserve(depth);
  const auto offsets_span = q.offsets();
  mpz_class lifted;
  mpz_class probe;
  for (std::size_t k = 0; k < depth; ++k) {
    lifted = remainder;
    mpz_mul_2exp(lifted.get_mpz_t(), lifted.get_mpz_t(), shift);

    const double t = ratio_estimate(remainder, cell);
    auto it = std::upper_bound(offsets_span.begin(), offsets_span.end(), t);
    std::size_t j = it == offsets_span.begin()
                        ? 0
                        : static_cast<std::size_t>(it - offsets_span.begin()) - 1;
    // Correct the floating guess against the exact comparison.
    while (j > 0) {
      probe = cell * offset[j];
      if (probe <= lifted) break;
      --j;
    }
    while (j + 1 < s) {
      probe = cell * offset[j + 1];
      if (probe > lifted) break;
      ++j;
    }
    digits.push_back(static_cast<Digit>(j));

    remainder = lifted - cell * offset[j];
    cell *= width[j];
    if (remainder == 0) return DigitString::periodic(s, std::move(digits), {0});
    const std::size_t common = std::min(trailing_zeros(remainder), trailing_zeros(cell));
    if (common > 0) {
      mpz_tdiv_q_2exp(remainder.get_mpz_t(), remainder.get_mpz_t(), common);
      mpz_tdiv_q_2exp(cell.get_mpz_t(), cell.get_mpz_t(), common);
    }
  }
  return DigitString::truncated(s, std::move(digits));
}

// Backward Horner pass: beta_{d1} + q_{d1} (beta_{d2} + q_{d2} (... + tail)).
double fold_prefix(std::span<const Digit> digits, const StochasticVector& q,
                   double tail) {
  double h = tail;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    const auto d = static_cast<std::size_t>(*it);
    h = q.beta(d) + q.q(d) * h;
  }
  return h;
}

double periodic_tail(const DigitString& digits, const StochasticVector& q) {
  if (digits.ends_low()) return 0.0;
  if (digits.ends_high()) return 1.0;
  const auto& period = digits.period();
  double product = 1.0;
  for (Digit d : period) product *= q.q(static_cast<std::size_t>(d));
  return fold_prefix(period, q, 0.0) / (1.0 - product);
}

}  // namespace

StochasticVector::StochasticVector(std::vector<double> q) : q_(std::move(q)) {
  if (q_.size() < 2) {
    throw Error(ErrorKind::kInvalidParameters, "stochastic vector needs s >= 2 entries");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (!std::isfinite(q_[i]) || q_[i] <= 0.0) {
      throw Error(ErrorKind::kInvalidParameters,
                  "q_" + std::to_string(i) + " must be positive");
    }
    beta_.push_back(sum);
    sum += q_[i];
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw Error(ErrorKind::kInvalidParameters, "q entries must sum to 1 (within 1e-12)");
  }
}

double StochasticVector::beta_next(std::size_t i) const {
  if (i + 1 >= beta_.size()) return 1.0;
  return beta_[i + 1];
}

DigitString::DigitString(std::size_t alphabet, std::vector<Digit> prefix,
                         std::vector<Digit> period)
    : alphabet_(alphabet), prefix_(std::move(prefix)), period_(std::move(period)) {}

DigitString DigitString::periodic(std::size_t alphabet, std::vector<Digit> prefix,
                                  std::vector<Digit> period) {
  if (alphabet < 2) {
    throw Error(ErrorKind::kInvalidParameters, "alphabet needs at least 2 digits");
  }
  if (period.empty()) {
    throw Error(ErrorKind::kInvalidParameters, "period must be non-empty");
  }
  check_digits(prefix, alphabet);
  check_digits(period, alphabet);
  period.resize(minimal_period(period));
  while (!prefix.empty() && prefix.back() == period.back()) {
    std::rotate(period.rbegin(), period.rbegin() + 1, period.rend());
    prefix.pop_back();
  }
  return DigitString(alphabet, std::move(prefix), std::move(period));
}

DigitString DigitString::truncated(std::size_t alphabet, std::vector<Digit> digits) {
  if (alphabet < 2) {
    throw Error(ErrorKind::kInvalidParameters, "alphabet needs at least 2 digits");
  }
  check_digits(digits, alphabet);
  return DigitString(alphabet, std::move(digits), {});
}

bool DigitString::ends_low() const noexcept {
  return period_.size() == 1 && period_[0] == 0;
}

bool DigitString::ends_high() const noexcept {
  return period_.size() == 1 && static_cast<std::size_t>(period_[0]) == alphabet_ - 1;
}

bool DigitString::has_digit(std::size_t index) const noexcept {
  return is_periodic() || index < prefix_.size();
}

Digit DigitString::digit(std::size_t index) const {
  if (index < prefix_.size()) return prefix_[index];
  if (period_.empty()) {
    throw Error(ErrorKind::kInsufficientDepth,
                "digit " + std::to_string(index + 1) + " requested from a truncation of " +
                    std::to_string(prefix_.size()) + " digits");
  }
  return period_[(index - prefix_.size()) % period_.size()];
}

std::vector<Digit> DigitString::first(std::size_t n) const {
  std::vector<Digit> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(digit(i));
  return out;
}

Estimate decode(const DigitString& digits, const StochasticVector& q) {
  check_alphabet(digits, q);
  if (digits.is_truncated()) {
    double product = 1.0;
    for (Digit d : digits.prefix()) product *= q.q(static_cast<std::size_t>(d));
    return {fold_prefix(digits.prefix(), q, 0.0), product};
  }
  return {fold_prefix(digits.prefix(), q, periodic_tail(digits, q)), 0.0};
}

DigitString encode(double x, const StochasticVector& q, std::size_t depth) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::kOutOfDomain, "encode expects x in [0, 1]");
  }
  if (depth == 0) {
    throw Error(ErrorKind::kPreconditionViolated, "encode depth must be >= 1");
  }
  return encode_exact(to_dyadic(x), q, depth);
}

DigitString encode_branch_image(double x, Digit branch, const StochasticVector& q,
                                std::size_t depth) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::kOutOfDomain, "encode expects x in [0, 1]");
  }
  if (branch < 0 || static_cast<std::size_t>(branch) >= q.size()) {
    throw Error(ErrorKind::kInvalidDigit, "branch digit outside alphabet");
  }
  const auto i = static_cast<std::size_t>(branch);
  const Dyadic left = to_dyadic(q.beta(i));
  const Dyadic right = to_dyadic(q.beta_next(i));
  const Dyadic image = add(left, multiply(subtract(right, left), to_dyadic(x)));
  return encode_exact(image, q, depth);
}

std::optional<DigitString> twin_representation(const DigitString& digits) {
  if (digits.is_truncated() || digits.prefix().empty()) return std::nullopt;
  const auto s = digits.alphabet();
  std::vector<Digit> prefix = digits.prefix();
  if (digits.ends_low()) {
    prefix.back() -= 1;
    return DigitString::periodic(s, std::move(prefix), {static_cast<Digit>(s - 1)});
  }
  if (digits.ends_high()) {
    prefix.back() += 1;
    return DigitString::periodic(s, std::move(prefix), {0});
  }
  return std::nullopt;
}

std::partial_ordering compare(const DigitString& a, const DigitString& b) {
  if (a.alphabet() != b.alphabet()) {
    throw Error(ErrorKind::kAlphabetMismatch, "cannot compare digit strings over different alphabets");
  }
  auto low_form = [](const DigitString& d) {
    if (d.ends_high()) {
      if (auto twin = twin_representation(d)) return *twin;
    }
    return d;
  };
  const DigitString x = low_form(a);
  const DigitString y = low_form(b);

  std::size_t limit = 0;
  if (x.is_periodic() && y.is_periodic()) {
    limit = std::max(x.prefix().size(), y.prefix().size()) +
            std::lcm(x.period().size(), y.period().size());
  } else {
    const std::size_t lx = x.is_truncated() ? x.prefix().size() : SIZE_MAX;
    const std::size_t ly = y.is_truncated() ? y.prefix().size() : SIZE_MAX;
    limit = std::min(lx, ly);
  }
  for (std::size_t k = 0; k < limit; ++k) {
    const Digit dx = x.digit(k);
    const Digit dy = y.digit(k);
    if (dx != dy) return dx < dy ? std::partial_ordering::less : std::partial_ordering::greater;
  }
  if (x.is_periodic() && y.is_periodic()) return std::partial_ordering::equivalent;
  return std::partial_ordering::unordered;
}

CylinderBounds cylinder_bounds(const Cylinder& cylinder, const StochasticVector& q) {
  for (Digit d : cylinder.base) {
    if (d < 0 || static_cast<std::size_t>(d) >= q.size()) {
      throw Error(ErrorKind::kInvalidDigit, "cylinder base digit outside alphabet");
    }
  }
  double length = 1.0;
  for (Digit d : cylinder.base) length *= q.q(static_cast<std::size_t>(d));
  return {fold_prefix(cylinder.base, q, 0.0), fold_prefix(cylinder.base, q, 1.0), length};
}

FrequencyVector digit_frequencies(const DigitString& digits, std::optional<std::size_t> n) {
  FrequencyVector out;
  out.nu.assign(digits.alphabet(), 0.0);
  std::vector<std::size_t> counts(digits.alphabet(), 0);
  std::size_t total = 0;
  if (!n) {
    if (digits.is_truncated()) {
      throw Error(ErrorKind::kInsufficientDepth,
                  "exact frequencies need a periodic digit string");
    }
    for (Digit d : digits.period()) ++counts[static_cast<std::size_t>(d)];
    total = digits.period().size();
    out.exact = true;
  } else {
    if (*n == 0) {
      throw Error(ErrorKind::kPreconditionViolated, "frequency prefix length must be >= 1");
    }
    if (!digits.has_digit(*n - 1)) {
      throw Error(ErrorKind::kInsufficientDepth, "digit string shorter than requested prefix");
    }
    for (std::size_t k = 0; k < *n; ++k) ++counts[static_cast<std::size_t>(digits.digit(k))];
    total = *n;
  }
  out.n = total;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.nu[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return out;
}

RunLength run_length(const DigitString& digits, Digit i, std::size_t n) {
  if (i < 0 || static_cast<std::size_t>(i) >= digits.alphabet()) {
    throw Error(ErrorKind::kInvalidDigit, "run-length digit outside alphabet");
  }
  const bool constant_tail = digits.period().size() == 1 && digits.period()[0] == i;
  for (std::size_t k = n;; ++k) {
    if (constant_tail && k >= digits.prefix().size()) return {0, true};
    if (!digits.has_digit(k)) {
      throw Error(ErrorKind::kInsufficientDepth, "run extends past the available digits");
    }
    if (digits.digit(k) != i) return {k - n, false};
  }
}

}  // namespace qsaf
