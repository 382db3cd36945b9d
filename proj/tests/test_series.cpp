#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "centerbias/coeffs.hpp"
#include "centerbias/primes.hpp"
#include "centerbias/series.hpp"

using namespace centerbias;

namespace {

std::shared_ptr<const TauTable> tau_table() {
  static const auto t = std::make_shared<const TauTable>(build_tau_table(20'000));
  return t;
}

const LFunctionSpec& chi4() {
  static const LFunctionSpec s = chi4_spec();
  return s;
}

const LFunctionSpec& trivial() {
  static const LFunctionSpec s = trivial_character_spec();
  return s;
}

const LFunctionSpec& e11() {
  static const LFunctionSpec s = elliptic_spec("11a1", curve_11a1(), 11, 0, {}, 20'000);
  return s;
}

// Degree-1 source with α = 1 at p = 2 and α = 0 everywhere else up to 7.
LFunctionSpec single_prime_spec() {
  CustomSource c{1, 7, {}, true};
  c.factors.emplace(2, LocalFactor(2, {cplx{1.0}}));
  for (std::uint64_t p : {3, 5, 7}) c.factors.emplace(p, LocalFactor(p, {cplx{0.0}}));
  return make_spec("single", c, 0, 0);
}

}  // namespace

TEST(Series, LogProductTrivialCharacterAtTwo) {
  const double want = -std::log(1 - 1 / 4.0) - std::log(1 - 1 / 9.0) - std::log(1 - 1 / 25.0) -
                      std::log(1 - 1 / 49.0);
  const cplx got = log_partial_euler_product(trivial(), 10, {2.0, 0.0});
  EXPECT_NEAR(got.real(), want, 1e-15);
  EXPECT_NEAR(got.real(), 0.466906, 1e-6);
  EXPECT_EQ(got.imag(), 0.0);
}

TEST(Series, EmptyRegionsBelowTwo) {
  EXPECT_EQ(log_partial_euler_product(chi4(), 1.9, {0.5, 0.0}), cplx(0.0));
  EXPECT_EQ(central_scaled_product(chi4(), 1.5), cplx(1.0));
  EXPECT_EQ(bias_sum(chi4(), 1.0), 0.0);
  EXPECT_EQ(psi(trivial(), 1.99), 0.0);
  EXPECT_EQ(goldfeld_product(e11(), 1.5), 1.0);
}

TEST(Series, Chi4AtTen) {
  const double r3 = std::sqrt(3.0), r5 = std::sqrt(5.0), r7 = std::sqrt(7.0);
  const double log_want = -std::log(1 + 1 / r3) - std::log(1 - 1 / r5) - std::log(1 + 1 / r7);
  EXPECT_NEAR(log_partial_euler_product(chi4(), 10, {0.5, 0.0}).real(), log_want, 1e-15);
  const double prod = 1 / ((1 + 1 / r3) * (1 - 1 / r5) * (1 + 1 / r7));
  EXPECT_NEAR(central_scaled_product(chi4(), 10).real(), prod, 1e-14);
  EXPECT_NEAR(prod, 0.832, 5e-4);
  EXPECT_NEAR(bias_sum(chi4(), 10), -1 / r3 + 1 / r5 - 1 / r7, 1e-15);
  EXPECT_NEAR(bias_sum(chi4(), 10), -0.508101, 5e-7);
  EXPECT_NEAR(second_moment_sum(chi4(), 10), 1 / 3.0 + 1 / 5.0 + 1 / 7.0, 1e-15);
  EXPECT_NEAR(psi(chi4(), 10), std::log(5.0) - std::log(7.0), 1e-14);
  EXPECT_NEAR(psi(chi4(), 10), -0.33647, 5e-6);
}

TEST(Series, TrivialCharacterEnumerations) {
  EXPECT_NEAR(second_moment_sum(trivial(), 10), 0.5 + 1 / 3.0 + 0.2 + 1 / 7.0, 1e-15);
  EXPECT_NEAR(second_moment_sum(trivial(), 10), 1.17619, 5e-6);
  EXPECT_NEAR(psi(trivial(), 10), 3 * std::log(2.0) + 2 * std::log(3.0) + std::log(5.0) + std::log(7.0),
              1e-14);
  EXPECT_NEAR(psi(trivial(), 10), 7.83201, 5e-6);
  double want = 0.0;
  int count = 0;
  for (const std::uint64_t p : sieve_primes(100)) {
    if (p > 10) {
      want += 1.0 / (2.0 * p);
      ++count;
    }
  }
  EXPECT_EQ(count, 21);
  EXPECT_NEAR(u_half(trivial(), 100), want, 1e-15);
  EXPECT_NEAR(u_half(trivial(), 100), 0.313313, 5e-7);
}

TEST(Series, UHalfSmallCases) {
  EXPECT_NEAR(u_half(chi4(), 4), 1 / 6.0, 1e-16);
  EXPECT_THROW(u_half(chi4(), 3.9), DomainError);
}

TEST(Series, UHalfEqualsHalvedSecondMomentDifference) {
  for (const double x : {4.0, 50.0, 1000.0, 12345.0, 1e6}) {
    for (const LFunctionSpec* s : {&chi4(), &trivial(), &e11()}) {
      if (x > 20'000 && s == &e11()) continue;
      const double diff = (second_moment_sum(*s, x) - second_moment_sum(*s, std::sqrt(x))) / 2;
      EXPECT_NEAR(u_half(*s, x), diff, 1e-12) << s->name << " x=" << x;
    }
  }
}

TEST(Series, TailOfSinglePrime) {
  // Σ_{k>=3} w^k/k = -log(1 - w) - w - w^2/2 with w = 2^{-1/2}.
  const double w = 1 / std::sqrt(2.0);
  const double want = -std::log1p(-w) - w - w * w / 2;
  double direct = 0.0;
  for (int k = 60; k >= 3; --k) direct += 1.0 / (k * std::pow(2.0, k / 2.0));
  const auto spec = single_prime_spec();
  EXPECT_NEAR(tail_sum(spec, 2), want, 1e-15);
  EXPECT_NEAR(tail_sum(spec, 7), want, 1e-15);
  EXPECT_NEAR(direct, want, 5e-11);  // 60 terms leave ~3.7e-11 behind
  EXPECT_NEAR(want, 0.270840, 5e-7);
  EXPECT_EQ(tail_sum(chi4(), 2), 0.0);
}

TEST(Series, LogExpansionIdentity) {
  const auto delta = delta_spec(tau_table());
  for (const LFunctionSpec* s : {&chi4(), &trivial(), &e11(), &delta}) {
    for (const double x : {10.0, 1000.0, 20'000.0}) {
      const double lhs = log_partial_euler_product(*s, x, {0.5, 0.0}).real();
      const double rhs = bias_sum(*s, x) + second_moment_sum(*s, x) / 2 + tail_sum(*s, x);
      EXPECT_NEAR(lhs, rhs, 1e-10) << s->name << " x=" << x;
    }
  }
}

TEST(Series, LogRouteMatchesLiteralProduct) {
  const auto delta = delta_spec(tau_table());
  for (const LFunctionSpec* s : {&chi4(), &e11(), &delta}) {
    for (const cplx sv : {cplx{0.5, 0.0}, cplx{0.75, 3.0}, cplx{2.0, -1.0}}) {
      const cplx lit = direct_partial_euler_product(*s, 20'000, sv);
      const cplx viaLog = std::exp(log_partial_euler_product(*s, 20'000, sv));
      EXPECT_LT(std::abs(lit - viaLog) / std::abs(lit), 1e-12) << s->name;
    }
  }
}

TEST(Series, SingularFactorNamesPrime) {
  // α = 2^{1/2} at p = 2 makes 1 - α 2^{-1/2} vanish at s = 1/2.
  CustomSource c{1, 3, {}, true};
  c.factors.emplace(2, LocalFactor(2, {cplx{std::sqrt(2.0)}}));
  c.factors.emplace(3, LocalFactor(3, {cplx{1.0}}));
  const auto spec = make_spec("bad", c, 0, 0);
  try {
    log_partial_euler_product(spec, 3, {0.5, 0.0});
    FAIL() << "expected SingularFactorError";
  } catch (const SingularFactorError& e) {
    EXPECT_EQ(e.prime(), 2u);
  }
  EXPECT_THROW(direct_partial_euler_product(spec, 3, {0.5, 0.0}), SingularFactorError);
}

TEST(Series, CutoffIsEnforced) {
  EXPECT_THROW(bias_sum(e11(), 30'000), CutoffError);
}

TEST(Series, GoldfeldProductSmallX) {
  EXPECT_NEAR(goldfeld_product(e11(), 5), 25.0 / 6.0, 1e-14);
  EXPECT_THROW(goldfeld_product(chi4(), 10), DomainError);
}

TEST(Series, WeightedPrimeCounts) {
  EXPECT_EQ(weighted_prime_count(4, 3, 0.0, 20), 4.0);
  EXPECT_EQ(weighted_prime_count(4, 1, 0.0, 20), 3.0);
  EXPECT_THROW(weighted_prime_count(4, 2, 0.0, 20), DomainError);
  EXPECT_THROW(weighted_prime_count(4, 1, -1.0, 20), DomainError);
  const std::array<double, 3> xs{2.0, 20.0, 100.0};
  const auto d = race_difference(4, 3, 1, 0.0, xs);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 1.0);
}

TEST(Series, RaceIdentityIsBitExact) {
  std::mt19937_64 rng(17);
  std::vector<double> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(std::uniform_real_distribution<double>(3, 2e6)(rng));
  std::sort(xs.begin(), xs.end());
  const auto race = race_difference(4, 1, 3, 0.5, xs);
  const auto reversed = race_difference(4, 3, 1, 0.5, xs);
  const auto bias = sample(chi4(), SeriesKind::bias, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ASSERT_EQ(race[i], bias.values[i].real()) << xs[i];
    ASSERT_EQ(reversed[i], -bias.values[i].real()) << xs[i];
    // Separately accumulated counts agree to rounding only.
    const double separate =
        weighted_prime_count(4, 1, 0.5, xs[i]) - weighted_prime_count(4, 3, 0.5, xs[i]);
    ASSERT_NEAR(separate, race[i], 1e-11);
  }
}

TEST(Series, SnapshotConsistency) {
  const std::array<double, 2> grid{10.0, 100.0};
  const auto s = sample(chi4(), SeriesKind::bias, grid);
  EXPECT_EQ(s.values[0].real(), bias_sum(chi4(), 10));
  EXPECT_EQ(s.values[1].real(), bias_sum(chi4(), 100));

  const auto xs = dyadic_grid(3e6);
  const std::array<SeriesKind, 5> kinds{SeriesKind::bias, SeriesKind::second_moment,
                                        SeriesKind::tail, SeriesKind::psi,
                                        SeriesKind::central_product};
  const auto one = sample(chi4(), kinds, xs, {{0.5, 0.0}, 1});
  const auto many = sample(chi4(), kinds, xs, {{0.5, 0.0}, 7});
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ASSERT_EQ(one[k].values[i], many[k].values[i]) << one[k].label << " x=" << xs[i];
    }
  }
  // Fresh single-point evaluations, including points inside a block.
  for (const std::size_t i : {std::size_t{0}, std::size_t{10}, xs.size() - 1}) {
    EXPECT_EQ(one[0].values[i].real(), bias_sum(chi4(), xs[i], 3));
    EXPECT_EQ(one[1].values[i].real(), second_moment_sum(chi4(), xs[i]));
    EXPECT_EQ(one[3].values[i].real(), psi(chi4(), xs[i], 2));
  }
}

TEST(Series, GridShapes) {
  const auto xs = dyadic_grid(std::ldexp(1.0, 20));
  ASSERT_EQ(xs.size(), 17u);
  EXPECT_EQ(xs.front(), 16.0);
  for (std::size_t i = 1; i < xs.size(); ++i) EXPECT_LT(xs[i - 1], xs[i]);
  EXPECT_EQ(dyadic_grid(1000.0).back(), 1000.0);
  EXPECT_EQ(dyadic_grid(10.0), std::vector<double>{10.0});
  const auto ls = log_spaced_grid(16, 1e6, 30);
  ASSERT_EQ(ls.size(), 30u);
  EXPECT_EQ(ls.back(), 1e6);
  const std::array<double, 1> one{50.0};
  EXPECT_EQ(sample(chi4(), SeriesKind::bias, one).size(), 1u);
}

TEST(Series, PsiJumpsOnlyAtPrimePowers) {
  const auto pp = prime_powers_up_to(3000);
  std::vector<double> jump(3001, 0.0);
  for (const auto& q : pp) {
    jump[q.value] = std::log(static_cast<double>(q.p)) * chi4().local_factor(q.p).power_sum(q.k).real();
  }
  double prev = psi(chi4(), 1);
  for (std::uint64_t x = 2; x <= 3000; ++x) {
    const double cur = psi(chi4(), static_cast<double>(x));
    ASSERT_NEAR(cur - prev, jump[x], 1e-11) << x;
    prev = cur;
  }
}

TEST(Series, ComplexCharacterKeepsImaginaryParts) {
  const cplx i{0.0, 1.0};
  const auto spec =
      make_spec("chi5", dirichlet_source(5, {{1, 1.0}, {2, i}, {4, -1.0}, {3, -i}}), 0, 0, {1.0}, 5);
  const std::array<double, 1> xs{10.0};
  const auto b = sample(spec, SeriesKind::bias, xs);
  // p = 2 → i, 3 → -i, 7 → i.
  EXPECT_NEAR(b.values[0].imag(), 1 / std::sqrt(2.0) - 1 / std::sqrt(3.0) + 1 / std::sqrt(7.0), 1e-15);
  EXPECT_NEAR(b.values[0].real(), 0.0, 1e-15);
}
