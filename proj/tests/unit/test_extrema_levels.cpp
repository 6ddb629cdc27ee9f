#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../support/generators.hpp"
#include "qsaf/error.hpp"
#include "qsaf/extrema_levels.hpp"

using namespace qsaf;
using qsaf::testing::Rng;
using qsaf::testing::pick;

namespace {

SelfAffineSystem cantor_maxima() {
  return {StochasticVector({0.2, 0.4, 0.2, 0.2}), AffineCoefficients({0.4, 0.8, 0.4, -0.6})};
}
SelfAffineSystem shared_level() {
  return {StochasticVector({0.05, 0.35, 0.2, 0.35, 0.05}),
          AffineCoefficients({0.5, 0.2, 0.1, -0.28, 0.48})};
}
SelfAffineSystem unique_maximum() {
  return {StochasticVector({0.5, 0.3, 0.2}), AffineCoefficients({0.2, 0.9, -0.1})};
}
SelfAffineSystem equal_halves() {
  return {StochasticVector({0.4, 0.4, 0.2}), AffineCoefficients({2.0 / 3, 2.0 / 3, -1.0 / 3})};
}
SelfAffineSystem negative_minimum() {
  return {StochasticVector({0.3, 0.45, 0.25}), AffineCoefficients({0.6, 0.9, -0.5})};
}
SelfAffineSystem increasing() {
  return {StochasticVector({0.3, 0.45, 0.25}), AffineCoefficients({0.5, 0.2, 0.3})};
}

DigitString P(std::size_t s, std::vector<Digit> prefix, std::vector<Digit> period) {
  return DigitString::periodic(s, std::move(prefix), std::move(period));
}

bool throws_kind(ErrorKind kind, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

double total_length(const std::vector<Interval>& stage) {
  double sum = 0.0;
  for (const auto& iv : stage) sum += iv.right - iv.left;
  return sum;
}

}  // namespace

TEST_CASE("overshoot branch detection") {
  CHECK(overshoot_branch(cantor_maxima()) == 3);
  CHECK_FALSE(overshoot_branch(increasing()).has_value());
  CHECK(overshoot_branch(equal_halves()) == 2);
  CHECK(equal_halves().g().delta(2) == doctest::Approx(4.0 / 3));
  // two negative coefficients: closed forms refused
  const SelfAffineSystem two(StochasticVector({0.25, 0.25, 0.25, 0.25}),
                             AffineCoefficients({0.9, 0.8, -0.3, -0.4}));
  CHECK_FALSE(overshoot_branch(two).has_value());
  // one negative coefficient but delta_k <= 1
  CHECK_FALSE(overshoot_branch(shared_level()).has_value());
  CHECK(throws_kind(ErrorKind::kConditionsNotMet, [&] { closed_form_max(shared_level()); }));
  CHECK(throws_kind(ErrorKind::kConditionsNotMet, [&] { closed_form_min(increasing()); }));
  CHECK(throws_kind(ErrorKind::kConditionsNotMet, [&] { maxima_set(two); }));
}

TEST_CASE("closed-form maximum") {
  const auto a = closed_form_max(cantor_maxima());
  CHECK(std::abs(a.value - 2.0) <= 1e-12);
  CHECK(a.argmax_digits == std::vector<Digit>{1, 2});
  CHECK(a.branch == 3);
  const auto b = closed_form_max(negative_minimum());
  CHECK(std::abs(b.value - 6.0) <= 1e-12);
  CHECK(b.argmax_digits == std::vector<Digit>{1});
  const auto c = closed_form_max(equal_halves());
  CHECK(std::abs(c.value - 2.0) <= 1e-12);
  CHECK(c.argmax_digits == std::vector<Digit>{1});
}

TEST_CASE("closed-form minimum") {
  CHECK(closed_form_min(cantor_maxima()) == 0.0);
  CHECK(std::abs(closed_form_min(negative_minimum()) + 1.5) <= 1e-12);
  CHECK(closed_form_min(unique_maximum()) == 0.0);
}

TEST_CASE("closed forms agree with the oracle on random draws") {
  Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const auto sys = qsaf::testing::random_overshoot_system(rng);
    const auto k = overshoot_branch(sys);
    REQUIRE(k.has_value());
    const auto max = closed_form_max(sys);
    const double m = closed_form_min(sys);
    CHECK(std::abs(max.value - sys.bounds().upper) <= 1e-10);
    CHECK(std::abs(m - sys.bounds().lower) <= 1e-10);
    CHECK(std::abs(m) < max.value);
    CHECK(std::find(max.argmax_digits.begin(), max.argmax_digits.end(), 0) == max.argmax_digits.end());
    CHECK(std::find(max.argmax_digits.begin(), max.argmax_digits.end(), *k) == max.argmax_digits.end());
    const auto ku = static_cast<std::size_t>(*k);
    const auto& g = sys.g();
    CHECK(g.delta(ku - 1) / (1 - g.g(ku - 1)) > g.delta(ku) / (1 - g.g(ku)));
  }
}

TEST_CASE("level sets") {
  const auto two = level_set(shared_level(), 0.625);
  CHECK(two.digits == std::vector<Digit>{1, 3});
  CHECK(two.continuum);
  const auto zero = level_set(cantor_maxima(), 0.0);
  CHECK(zero.digits == std::vector<Digit>{0});
  CHECK_FALSE(zero.continuum);
  const auto top = level_set(cantor_maxima(), 2.0);
  CHECK(top.digits == std::vector<Digit>{1, 2});
  CHECK(top.continuum);
  CHECK(level_set(cantor_maxima(), 1.234).digits.empty());

  Rng rng(67);
  for (const auto& [sys, y] : {std::pair{shared_level(), 0.625}, std::pair{cantor_maxima(), 2.0}}) {
    const auto ls = level_set(sys, y);
    for (std::size_t i : ls.digits) {
      CHECK(std::abs(sys.g().delta(i) - (1 - sys.g().g(i)) * y) <= 1e-10);
    }
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Digit> prefix(pick(rng, 0, 10));
      std::vector<Digit> period(pick(rng, 1, 6));
      for (Digit& d : prefix) d = ls.digits[rng() % ls.digits.size()];
      for (Digit& d : period) d = ls.digits[rng() % ls.digits.size()];
      CHECK(std::abs(eval(sys, P(sys.size(), prefix, period)).value - y) <= 1e-10);
    }
  }
}

TEST_CASE("derived levels") {
  const auto sys = shared_level();
  const auto levels = derived_levels(sys, 0.625, 2);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].y == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(levels[1].y == doctest::Approx(0.15625).epsilon(1e-15));
  CHECK(levels[0].witness == P(5, {0}, {1, 3}));
  CHECK(std::abs(eval(sys, P(5, {0, 1}, {3, 1})).value - 0.3125) <= 1e-12);
  CHECK(derived_levels(sys, 0.625, 0).empty());
  CHECK(throws_kind(ErrorKind::kPreconditionViolated, [&] { derived_levels(sys, 0.5, 3); }));
}

TEST_CASE("Moran dimension") {
  const StochasticVector q({0.2, 0.4, 0.2, 0.2});
  const std::vector<Digit> top{1, 2};
  const double d = moran_dimension(q, top);
  // scipy brentq on 0.4^x + 0.2^x - 1
  CHECK(std::abs(d - 0.5638955242599442) <= 1e-11);
  CHECK(std::abs(std::pow(0.4, d) + std::pow(0.2, d) - 1) <= 1e-11);
  const std::vector<Digit> low{0, 1, 2};
  // scipy brentq on 2 * 0.2^x + 0.4^x - 1
  CHECK(std::abs(moran_dimension(q, low) - 0.8247630705439826) <= 1e-11);
  const std::vector<Digit> all{0, 1, 2, 3};
  CHECK(moran_dimension(q, all) == 1.0);
  const std::vector<Digit> one{2};
  CHECK(moran_dimension(q, one) == 0.0);

  Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t s = pick(rng, 3, 9);
    const auto qq = qsaf::testing::random_q(rng, s);
    std::vector<Digit> v;
    for (std::size_t i = 0; i < s; ++i) {
      if (rng() % 2) v.push_back(static_cast<Digit>(i));
    }
    if (v.size() < 2 || v.size() == s) continue;
    const double x = moran_dimension(qq, v);
    double sum = 0.0;
    for (Digit i : v) sum += std::pow(qq.q(static_cast<std::size_t>(i)), x);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    CHECK(std::abs(sum - 1.0) <= 1e-11);
  }
}

TEST_CASE("maxima set") {
  const auto spec = maxima_set(cantor_maxima());
  CHECK(spec.allowed == std::vector<Digit>{1, 2});
  CHECK(std::abs(spec.dimension - 0.564) <= 1e-3);
  CHECK_FALSE(spec.singleton);
  const auto single = maxima_set(unique_maximum());
  CHECK(single.allowed == std::vector<Digit>{1});
  CHECK(single.singleton);
  CHECK(single.dimension == 0.0);
  CHECK(throws_kind(ErrorKind::kPreconditionViolated,
                    [] { make_cantor_spec(StochasticVector({0.5, 0.5}), {}); }));
  CHECK(throws_kind(ErrorKind::kInvalidDigit,
                    [] { make_cantor_spec(StochasticVector({0.5, 0.5}), {2}); }));
}

TEST_CASE("Cantor construction") {
  const auto spec = maxima_set(cantor_maxima());
  const auto first = cantor_stage(spec, 1);
  REQUIRE(first.size() == 2);
  CHECK(first[0].left == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(first[0].right == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(first[1].left == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(first[1].right == doctest::Approx(0.8).epsilon(1e-15));
  const auto merged = merge_touching(first);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].right == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(std::abs(total_length(cantor_stage(spec, 2)) - 0.36) <= 1e-12);

  const auto stages = cantor_construction(spec, 5);
  REQUIRE(stages.size() == 5);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(stages[t].size() == (std::size_t{1} << (t + 1)));
    CHECK(std::abs(total_length(stages[t]) - std::pow(0.6, t + 1)) <= 1e-12);
    CHECK(std::is_sorted(stages[t].begin(), stages[t].end(),
                         [](const Interval& a, const Interval& b) { return a.left < b.left; }));
  }
  CHECK(throws_kind(ErrorKind::kPreconditionViolated, [&] { cantor_construction(spec, 0); }));

  const auto zero = make_cantor_spec(StochasticVector({0.2, 0.4, 0.2, 0.2}), {0});
  for (std::size_t t = 1; t <= 6; ++t) {
    const auto st = cantor_stage(zero, t);
    REQUIRE(st.size() == 1);
    CHECK(st[0].left == 0.0);
    CHECK(st[0].right == doctest::Approx(std::pow(0.2, t)).epsilon(1e-14));
  }
}

TEST_CASE("membership") {
  const auto spec = maxima_set(cantor_maxima());
  CHECK(membership(spec, P(4, {}, {1})));
  CHECK_FALSE(membership(spec, P(4, {3}, {1})));
  CHECK_FALSE(membership(spec, DigitString::truncated(4, {1, 2, 3})));
  CHECK(membership(spec, DigitString::truncated(4, {1, 2, 2})));
  const auto odd = make_cantor_spec(StochasticVector({0.2, 0.4, 0.2, 0.2}), {1, 3});
  CHECK(membership(odd, P(4, {2}, {0})));  // twin 1,(3)
  CHECK(throws_kind(ErrorKind::kAlphabetMismatch, [&] { membership(spec, P(3, {}, {1})); }));

  const auto sys = cantor_maxima();
  Rng rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Digit> prefix(pick(rng, 0, 12));
    std::vector<Digit> period(pick(rng, 1, 5));
    for (Digit& d : prefix) d = 1 + static_cast<Digit>(rng() % 2);
    for (Digit& d : period) d = 1 + static_cast<Digit>(rng() % 2);
    const auto d = P(4, prefix, period);
    REQUIRE(membership(spec, d));
    CHECK(std::abs(eval(sys, d).value - 2.0) <= 1e-12);
  }
}

TEST_CASE("preimage digits") {
  const auto sys = cantor_maxima();
  CHECK(preimage_digits(sys, 0.0, 64) == P(4, {}, {0}));
  CHECK(preimage_digits(sys, sys.g().delta(1), 64) == P(4, {1}, {0}));
  CHECK(preimage_digits(equal_halves(), 2.0 / 3, 64) == P(3, {1}, {0}));
  const double y = std::numbers::pi / 4;
  const auto d = preimage_digits(sys, y, 64);
  CHECK(d.is_truncated());
  CHECK(d.prefix().size() == 64);
  for (Digit a : d.prefix()) CHECK(a < 3);
  CHECK(std::abs(eval(sys, d).value - y) <= 2 * std::pow(0.8, 64));
  CHECK(preimage_bound(sys, 64) == doctest::Approx(2 * std::pow(0.8, 64)).epsilon(1e-12));
  CHECK(throws_kind(ErrorKind::kOutOfDomain, [&] { preimage_digits(sys, 1.1, 8); }));
  CHECK(throws_kind(ErrorKind::kConditionsNotMet, [&] { preimage_digits(increasing(), 0.5, 8); }));

  Rng rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = qsaf::testing::random_overshoot_system(rng);
    const auto k = *overshoot_branch(s);
    for (std::size_t depth : {1, 5, 20, 64}) {
      const double target = qsaf::testing::uniform(rng, 0.0, 1.0);
      const auto w = preimage_digits(s, target, depth);
      for (Digit a : w.prefix()) CHECK(a < k);
      CHECK(std::abs(eval(s, w).value - target) <=
            preimage_bound(s, depth) + preimage_rounding(s, depth));
    }
  }
}

TEST_CASE("non-invariance certificate") {
  const auto sys = cantor_maxima();
  const auto empty = non_invariance_certificate(sys, 0);
  CHECK(empty.witnesses.empty());
  CHECK(empty.allowed == std::vector<Digit>{0, 1, 2});
  CHECK(std::abs(empty.dimension - 0.8247630705439826) <= 1e-11);

  const auto cert = non_invariance_certificate(sys, 200);
  CHECK(cert.witnesses.size() == 200);
  CHECK(cert.all_within_bound);
  const auto again = non_invariance_certificate(sys, 200);
  for (std::size_t j = 0; j < 200; ++j) {
    CHECK(cert.witnesses[j].y == again.witnesses[j].y);
    CHECK(cert.witnesses[j].digits == again.witnesses[j].digits);
    CHECK(cert.witnesses[j].y >= 0.0);
    CHECK(cert.witnesses[j].y < 1.0);
  }
  CHECK(throws_kind(ErrorKind::kConditionsNotMet, [] { non_invariance_certificate(increasing(), 4); }));
}
