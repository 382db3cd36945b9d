#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "centerbias/analysis.hpp"

using namespace centerbias;

namespace {

SampledSeries make(std::vector<double> xs, const std::function<double(double)>& f) {
  SampledSeries s{std::move(xs), {}, "synthetic"};
  for (const double x : s.xs) s.values.emplace_back(f(x));
  return s;
}

double loglog(double x) { return std::log(std::log(x)); }

}  // namespace

TEST(LoglogFit, RecoversAffineRelation) {
  const auto s = make({16, 256, 65536}, [](double x) { return 2 * loglog(x) + 5; });
  const FitReport f = loglog_fit(s);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 5.0, 1e-12);
  EXPECT_NEAR(f.rms_residual, 0.0, 1e-12);
  EXPECT_EQ(f.n_samples, 3u);
}

TEST(LoglogFit, ConstantSeriesHasZeroSlope) {
  const auto f = loglog_fit(make(dyadic_grid(1e6), [](double) { return 3.25; }));
  EXPECT_NEAR(f.slope, 0.0, 1e-13);
  EXPECT_NEAR(f.intercept, 3.25, 1e-12);
}

TEST(LoglogFit, RandomAffineInputs) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), b = u(rng);
    const auto f = loglog_fit(make(log_spaced_grid(3, 1e9, 25), [&](double x) { return a * loglog(x) + b; }));
    EXPECT_NEAR(f.slope, a, 1e-10);
    EXPECT_NEAR(f.intercept, b, 1e-10);
    EXPECT_LT(f.rms_residual, 1e-12);
  }
}

TEST(LoglogFit, Errors) {
  EXPECT_THROW(loglog_fit(make({16}, [](double) { return 1.0; })), DomainError);
  EXPECT_THROW(loglog_fit(make({2, 16}, [](double) { return 1.0; })), DomainError);
  SampledSeries same{{16, 16}, {1.0, 2.0}, "dup"};
  EXPECT_THROW(loglog_fit(same), ValidationError);
}

TEST(ExceptionalMeasure, EverywhereSmallIsZero) {
  const auto s = make(log_spaced_grid(10, 1e6, 50), [](double) { return 0.01; });
  EXPECT_EQ(exceptional_measure(s, 0.1), 0.0);
}

TEST(ExceptionalMeasure, Interval) {
  // D(t) = 1 on [100, 1000], 0 elsewhere, sampled densely in log t with
  // the jumps landing on samples: the measure is log(1000/100) up to the
  // two interpolated ramps, each one grid step wide and half counted.
  const auto xs = log_spaced_grid(10, 1e4, 301);  // step = log(1000)/300
  const auto s = make(xs, [](double x) { return (x >= 100 * (1 - 1e-12) && x <= 1000 * (1 + 1e-12)) ? 1.0 : 0.0; });
  const double step = std::log(1000.0) / 300;
  EXPECT_NEAR(exceptional_measure(s, 0.5), std::log(10.0) + step, 1e-9);
}

TEST(ExceptionalMeasure, LinearCrossingIsExact) {
  // D linear in log t from -2 to 2 over [e, e^5]: |D| > 1 on a quarter of
  // each end, measure 2.
  const std::vector<double> xs{std::exp(1.0), std::exp(5.0)};
  SampledSeries s{xs, {-2.0, 2.0}, "lin"};
  EXPECT_NEAR(exceptional_measure(s, 1.0), 2.0, 1e-12);
}

TEST(ExceptionalMeasure, MonotoneInEps) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> n(0, 1);
  const auto s = make(log_spaced_grid(10, 1e7, 200), [&](double) { return n(rng); });
  double prev = 1e300;
  const double total = std::log(1e7 / 10);
  for (const double eps : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double m = exceptional_measure(s, eps);
    EXPECT_LE(m, prev + 1e-12);
    EXPECT_LE(m, total + 1e-9);
    prev = m;
  }
  EXPECT_THROW(exceptional_measure(s, 0.0), DomainError);
}

TEST(BoundedRatio, Basics) {
  const auto xs = dyadic_grid(1e6);
  EXPECT_EQ(bounded_ratio_report(make(xs, [](double) { return 0.0; }), GrowthLaw::sqrt_log), 0.0);
  const auto exact = make(xs, [](double x) { return std::sqrt(x) * loglog(x) * loglog(x); });
  EXPECT_NEAR(bounded_ratio_report(exact, GrowthLaw::sqrt_loglog_sq), 1.0, 1e-14);
  auto flipped = exact;
  for (auto& v : flipped.values) v = -v;
  EXPECT_EQ(bounded_ratio_report(flipped, GrowthLaw::sqrt_log_sq),
            bounded_ratio_report(exact, GrowthLaw::sqrt_log_sq));
  EXPECT_THROW(bounded_ratio_report(make({2.0}, [](double) { return 1.0; }), GrowthLaw::sqrt_log),
               DomainError);
  EXPECT_EQ(to_string(GrowthLaw::sqrt_loglog_sq), "sqrt_loglog_sq");
}
