#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "../support/generators.hpp"
#include "qsaf/error.hpp"
#include "qsaf/qs_codec.hpp"

using namespace qsaf;
using qsaf::testing::Rng;

namespace {

const StochasticVector kHalves({0.5, 0.5});
const StochasticVector kQ4({0.2, 0.4, 0.2, 0.2});

DigitString P(std::size_t s, std::vector<Digit> prefix, std::vector<Digit> period) {
  return DigitString::periodic(s, std::move(prefix), std::move(period));
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kIo;
}

// Binary digits of a double read straight off its bits.
std::vector<Digit> binary_digits(double x, std::size_t n) {
  int e = 0;
  const double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
  const auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));
  std::vector<Digit> out;
  for (std::size_t k = 1; k <= n; ++k) {
    const long pos = 53 - static_cast<long>(k) - e;  // mantissa bit carrying 2^-k
    out.push_back(pos >= 0 && pos <= 52 ? static_cast<Digit>((mant >> pos) & 1U) : 0);
  }
  return out;
}

}  // namespace

TEST_CASE("stochastic vector validation") {
  CHECK(kind_of([] { StochasticVector({1.0}); }) == ErrorKind::kInvalidParameters);
  CHECK(kind_of([] { StochasticVector({0.5, 0.0, 0.5}); }) == ErrorKind::kInvalidParameters);
  CHECK(kind_of([] { StochasticVector({0.5, 0.5 + 1e-9}); }) == ErrorKind::kInvalidParameters);
  CHECK_NOTHROW(StochasticVector({0.5, 0.5 + 1e-13}));
  CHECK(kQ4.beta(0) == 0.0);
  CHECK(kQ4.beta(3) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(kQ4.beta_next(3) == 1.0);
}

TEST_CASE("digit string canonical form") {
  CHECK(P(4, {}, {0, 0, 0}).period() == std::vector<Digit>{0});
  const auto d = P(4, {1, 2}, {1, 2});
  CHECK(d.prefix().empty());
  CHECK(d.period() == std::vector<Digit>{1, 2});
  CHECK(P(4, {3}, {3}).ends_high());
  CHECK(P(4, {3}, {3}).prefix().empty());
  CHECK(kind_of([] { P(3, {3}, {0}); }) == ErrorKind::kInvalidDigit);
  CHECK(kind_of([] { DigitString::truncated(3, {0, -1}); }) == ErrorKind::kInvalidDigit);
  CHECK(kind_of([] { DigitString::truncated(3, {0, 1}).digit(2); }) ==
        ErrorKind::kInsufficientDepth);
}

TEST_CASE("decode examples") {
  CHECK(decode(P(4, {}, {0}), kQ4).value == 0.0);
  CHECK(decode(P(4, {}, {3}), kQ4).value == 1.0);
  CHECK(decode(P(4, {}, {1}), kQ4).value == doctest::Approx(1.0 / 3).epsilon(1e-15));
  // 1/5 + 2/5 (4/5 + 1/5 * (1/5)(3/5) / (1 - 1/25))
  CHECK(decode(P(4, {1, 3}, {0, 2}), kQ4).value == doctest::Approx(0.53).epsilon(1e-15));
  const Estimate t = decode(DigitString::truncated(4, {1, 1}), kQ4);
  CHECK(t.value == doctest::Approx(0.28).epsilon(1e-15));
  CHECK(t.error_bound == doctest::Approx(0.16).epsilon(1e-15));
  CHECK(kind_of([] { decode(P(3, {}, {1}), kQ4); }) == ErrorKind::kInvalidDigit);
}

TEST_CASE("encode examples") {
  CHECK(encode(0.0, kQ4, 10) == P(4, {}, {0}));
  CHECK(encode(1.0, kQ4, 10) == P(4, {}, {3}));
  CHECK(encode(0.2, kQ4, 10) == P(4, {1}, {0}));
  CHECK(kind_of([] { encode(-0.1, kQ4, 5); }) == ErrorKind::kOutOfDomain);
  CHECK(kind_of([] { encode(1.5, kQ4, 5); }) == ErrorKind::kOutOfDomain);
  CHECK(kind_of([] { encode(std::nan(""), kQ4, 5); }) == ErrorKind::kOutOfDomain);
  CHECK(kind_of([] { encode(0.5, kQ4, 0); }) == ErrorKind::kPreconditionViolated);
}

TEST_CASE("encode over halves matches the bits of the double") {
  const auto d = encode(1.0 / 3, kHalves, 60);
  // double(1/3) has 54 significant binary digits from 2^-2, then terminates
  CHECK(d.first(54) == binary_digits(1.0 / 3, 54));
  CHECK(d.first(6) == std::vector<Digit>{0, 1, 0, 1, 0, 1});
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double x = qsaf::testing::uniform(rng, 0.0, 1.0);
    CHECK(encode(x, kHalves, 53).first(53) == binary_digits(x, 53));
  }
}

TEST_CASE("round trip") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto q = qsaf::testing::random_q(rng, qsaf::testing::pick(rng, 2, 7));
    const double x = qsaf::testing::uniform(rng, 0.0, 1.0);
    const std::size_t n = qsaf::testing::pick(rng, 1, 60);
    const DigitString d = encode(x, q, n);
    const Estimate back = decode(d, q);
    double max_q = 0.0;
    for (double v : q.weights()) max_q = std::max(max_q, v);
    CHECK(std::abs(back.value - x) <= back.error_bound + 1e-15);
    if (d.is_truncated()) CHECK(back.error_bound <= std::pow(max_q, n) * (1 + 1e-12));
  }
}

TEST_CASE("twin representation") {
  CHECK(twin_representation(P(3, {2}, {0})) == P(3, {1}, {2}));
  CHECK(twin_representation(P(3, {1}, {2})) == P(3, {2}, {0}));
  CHECK_FALSE(twin_representation(P(3, {}, {0})).has_value());
  CHECK_FALSE(twin_representation(P(3, {}, {2})).has_value());
  CHECK_FALSE(twin_representation(P(3, {0}, {1})).has_value());
  const auto twin = twin_representation(P(2, {0, 1}, {0}));
  REQUIRE(twin.has_value());
  CHECK(*twin == P(2, {0, 0}, {1}));
  CHECK(decode(*twin, kHalves).value == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(decode(P(2, {0, 1}, {0}), kHalves).value == 0.25);

  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t s = qsaf::testing::pick(rng, 2, 6);
    const auto q = qsaf::testing::random_q(rng, s);
    auto prefix = qsaf::testing::random_digits(rng, s, qsaf::testing::pick(rng, 1, 12));
    if (prefix.back() == 0) prefix.back() = 1;
    const auto low = P(s, prefix, {0});
    const auto high = twin_representation(low);
    REQUIRE(high.has_value());
    CHECK(high->ends_high());
    CHECK(std::abs(decode(low, q).value - decode(*high, q).value) <= 1e-12);
    CHECK(compare(low, *high) == std::partial_ordering::equivalent);
  }
}

TEST_CASE("compare") {
  CHECK(compare(DigitString::truncated(2, {0, 1}), DigitString::truncated(2, {1, 0})) ==
        std::partial_ordering::less);
  const auto a = P(4, {1, 3}, {0, 2});
  CHECK(compare(a, a) == std::partial_ordering::equivalent);
  CHECK(compare(DigitString::truncated(4, {1, 3}), DigitString::truncated(4, {1, 3})) ==
        std::partial_ordering::unordered);
  CHECK(kind_of([&] { compare(a, P(3, {}, {1})); }) == ErrorKind::kAlphabetMismatch);

  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t s = qsaf::testing::pick(rng, 2, 5);
    const auto q = qsaf::testing::random_q(rng, s);
    auto draw = [&] {
      return P(s, qsaf::testing::random_digits(rng, s, qsaf::testing::pick(rng, 0, 6)),
               qsaf::testing::random_digits(rng, s, qsaf::testing::pick(rng, 1, 3)));
    };
    const auto x = draw();
    const auto y = draw();
    const double dx = decode(x, q).value;
    const double dy = decode(y, q).value;
    const auto c = compare(x, y);
    if (std::abs(dx - dy) > 1e-12) CHECK((c == std::partial_ordering::less) == (dx < dy));
    if (c == std::partial_ordering::less) CHECK(dx <= dy + 1e-12);
  }
}

TEST_CASE("cylinders") {
  const auto whole = cylinder_bounds({{}}, kQ4);
  CHECK(whole.left == 0.0);
  CHECK(whole.right == 1.0);
  CHECK(whole.length == 1.0);
  const auto half = cylinder_bounds({{1}}, kHalves);
  CHECK(half.left == 0.5);
  CHECK(half.right == 1.0);
  CHECK(half.length == 0.5);
  const auto c11 = cylinder_bounds({{1, 1}}, kQ4);
  CHECK(c11.left == doctest::Approx(0.28).epsilon(1e-15));
  CHECK(c11.right == doctest::Approx(0.44).epsilon(1e-15));
  CHECK(c11.length == doctest::Approx(0.16).epsilon(1e-15));

  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t s = qsaf::testing::pick(rng, 2, 6);
    const auto q = qsaf::testing::random_q(rng, s);
    Cylinder c{qsaf::testing::random_digits(rng, s, qsaf::testing::pick(rng, 0, 10))};
    const auto parent = cylinder_bounds(c, q);
    auto base_low = c.base;
    CHECK(parent.left == doctest::Approx(decode(P(s, base_low, {0}), q).value).epsilon(1e-12));
    CHECK(parent.right ==
          doctest::Approx(decode(P(s, base_low, {static_cast<Digit>(s - 1)}), q).value)
              .epsilon(1e-12));
    // endpoints near 1/2 cannot resolve widths below their own ulp
    CHECK(std::abs(parent.right - parent.left - parent.length) <=
          std::max(1e-12 * parent.length, 0x1.0p-52 * parent.right));
    double cursor = parent.left;
    for (std::size_t t = 0; t < s; ++t) {
      Cylinder child{c.base};
      child.base.push_back(static_cast<Digit>(t));
      const auto b = cylinder_bounds(child, q);
      CHECK(b.left >= parent.left - 1e-15);
      CHECK(b.right <= parent.right + 1e-15);
      CHECK(std::abs(b.left - cursor) <= 1e-15);
      cursor = b.right;
    }
    CHECK(std::abs(cursor - parent.right) <= 1e-15);
  }
}

TEST_CASE("digit frequencies") {
  const auto alt = digit_frequencies(P(2, {}, {0, 1}));
  CHECK(alt.exact);
  CHECK(alt.nu == std::vector<double>{0.5, 0.5});
  CHECK(digit_frequencies(P(3, {0, 1}, {2})).nu == std::vector<double>{0, 0, 1});
  const auto fin = digit_frequencies(DigitString::truncated(4, {0, 0, 1}), 3);
  CHECK_FALSE(fin.exact);
  CHECK(fin.nu == std::vector<double>{2.0 / 3, 1.0 / 3, 0, 0});
  CHECK(kind_of([] { digit_frequencies(DigitString::truncated(4, {0, 1})); }) ==
        ErrorKind::kInsufficientDepth);
  CHECK(kind_of([] { digit_frequencies(DigitString::truncated(4, {0, 1}), 3); }) ==
        ErrorKind::kInsufficientDepth);

  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t s = qsaf::testing::pick(rng, 2, 6);
    const auto d = P(s, {}, qsaf::testing::random_digits(rng, s, qsaf::testing::pick(rng, 1, 9)));
    const auto exact = digit_frequencies(d);
    const std::size_t p = d.period().size();
    for (std::size_t m = 1; m <= 7; ++m) {
      CHECK(digit_frequencies(d, m * p).nu == exact.nu);  // bit-for-bit
    }
  }
}

TEST_CASE("run lengths") {
  const auto d = DigitString::truncated(3, {1, 0, 0, 2});
  CHECK(run_length(d, 0, 1).length == 2);
  CHECK_FALSE(run_length(d, 0, 1).infinite);
  CHECK(run_length(P(3, {}, {1}), 0, 5).length == 0);
  CHECK(run_length(P(3, {}, {0}), 0, 5).infinite);
  CHECK(run_length(P(3, {2, 0}, {0}), 0, 0).length == 0);
  CHECK(run_length(P(3, {2}, {0}), 0, 1).infinite);
  CHECK(kind_of([&] { run_length(DigitString::truncated(3, {0, 0}), 0, 0); }) ==
        ErrorKind::kInsufficientDepth);
}
