#include <gtest/gtest.h>

#include <cmath>

#include "centerbias/coeffs.hpp"
#include "centerbias/elliptic.hpp"
#include "centerbias/primes.hpp"

using namespace centerbias;

namespace {

// #E(F_p) by enumerating every (x, y) against the long Weierstrass
// equation written out with plain signed arithmetic.
std::int64_t brute_count(const WeierstrassModel& e, std::int64_t p) {
  auto md = [p](std::int64_t v) { return ((v % p) + p) % p; };
  std::int64_t count = 1;
  for (std::int64_t x = 0; x < p; ++x) {
    for (std::int64_t y = 0; y < p; ++y) {
      const std::int64_t lhs = md(y * y + e.a1 * x * y + e.a3 * y);
      const std::int64_t rhs = md(x * x * x + e.a2 * x * x + e.a4 * x + e.a6);
      if (lhs == rhs) ++count;
    }
  }
  return count;
}

const WeierstrassModel k37a1{0, 0, 1, -1, 0};

}  // namespace

TEST(Weierstrass, InvariantsOf11a1) {
  const auto e = curve_11a1();
  EXPECT_TRUE(e.c4() == 496);
  EXPECT_TRUE(e.c6() == 20008);
  EXPECT_TRUE(e.discriminant() == -161051);  // -11^5
}

TEST(Elliptic, SmallTracesOf11a1) {
  const EllipticCurve e(curve_11a1(), 11);
  EXPECT_EQ(e.ap(2), -2);
  EXPECT_EQ(e.ap(3), -1);
  EXPECT_EQ(e.ap(5), 1);
  EXPECT_EQ(e.np(5), 5);
  EXPECT_EQ(e.ap(11), 1);  // split multiplicative
  EXPECT_EQ(e.np(11), 10);
}

TEST(Elliptic, TracesMatchBruteForceBelow200) {
  for (const auto& [model, conductor] :
       {std::pair{curve_11a1(), std::uint64_t{11}}, std::pair{k37a1, std::uint64_t{37}}}) {
    const EllipticCurve e(model, conductor);
    for (const std::uint64_t p : sieve_primes(199)) {
      if (e.is_bad(p)) continue;
      const auto p_s = static_cast<std::int64_t>(p);
      ASSERT_EQ(e.ap(p), p_s + 1 - brute_count(model, p_s)) << "p=" << p;
      ASSERT_EQ(count_points_naive(model, p), brute_count(model, p_s)) << "p=" << p;
    }
  }
}

TEST(Elliptic, BadPrimeOf37a1IsNonSplit) {
  const EllipticCurve e(k37a1, 37);
  EXPECT_EQ(e.ap(37), -1);
  EXPECT_EQ(e.ap(2), -2);
  EXPECT_EQ(e.ap(3), -3);
}

TEST(Elliptic, HasseBoundToTenThousand) {
  const EllipticCurve e(curve_11a1(), 11);
  for (const std::uint64_t p : sieve_primes(10'000)) {
    const double a = static_cast<double>(e.ap(p));
    ASSERT_LE(std::fabs(a), 2.0 * std::sqrt(static_cast<double>(p))) << p;
  }
}

TEST(Elliptic, BadPrimesTwoAndThreeNeedConfiguredTraces) {
  const WeierstrassModel k14a1{1, 0, 1, 4, -6};
  EXPECT_THROW(EllipticCurve(k14a1, 14), ValidationError);
  const EllipticCurve e(k14a1, 14, {{2, -1}});
  EXPECT_EQ(e.ap(2), -1);
  EXPECT_EQ(e.ap(7), 1);
  EXPECT_EQ(e.ap(3), -2);
}

TEST(Elliptic, RejectsInconsistentData) {
  EXPECT_THROW(EllipticCurve(curve_11a1(), 13), ValidationError);  // 13 ∤ Δ
  EXPECT_THROW(EllipticCurve({0, 0, 0, 0, 0}, 1), ValidationError);  // singular
  EXPECT_THROW(EllipticCurve(curve_11a1(), 11, {{3, 1}}), ValidationError);
  const EllipticCurve wrong_conductor(curve_11a1(), 1);
  EXPECT_THROW(wrong_conductor.ap(11), ValidationError);
}
