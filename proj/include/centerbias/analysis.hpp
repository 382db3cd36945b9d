#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "centerbias/error.hpp"
#include "centerbias/series.hpp"

namespace centerbias {

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t n_samples = 0;
};

// Unweighted least squares of Re(value) against log log x.
inline FitReport loglog_fit(const SampledSeries& series) {
  series.validate();
  const std::size_t n = series.size();
  if (n < 2) throw DomainError("loglog_fit needs at least 2 samples");
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(series.xs[i] >= 3.0)) throw DomainError("loglog_fit needs every x >= 3");
    u[i] = std::log(std::log(series.xs[i]));
  }
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += series.values[i].real();
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (series.values[i].real() - mv);
  }
  if (!(suu > 1e-300)) throw SingularFitError("all samples share one log log x");
  FitReport r;
  r.slope = suv / suu;
  r.intercept = mv - r.slope * mu;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = series.values[i].real() - (r.slope * u[i] + r.intercept);
    ss += e * e;
  }
  r.rms_residual = std::sqrt(ss / static_cast<double>(n));
  r.n_samples = n;
  return r;
}

// Logarithmic measure ∫ dt/t of {t in [x_0, x_last] : |D(t)| > eps}, with D
// interpolated linearly in log t between samples. On each interval the
// linear D makes {|D| <= eps} a single sub-interval, located exactly. Only
// as good as the sampling density.
inline double exceptional_measure(const SampledSeries& deviations, double eps) {
  deviations.validate();
  if (!(eps > 0.0)) throw DomainError("exceptional_measure needs eps > 0");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < deviations.size(); ++i) {
    const double u0 = std::log(deviations.xs[i]);
    const double u1 = std::log(deviations.xs[i + 1]);
    const double d0 = deviations.values[i].real();
    const double d1 = deviations.values[i + 1].real();
    const double len = u1 - u0;
    // Fraction λ in [0, 1] with |d0 + λ (d1 - d0)| <= eps.
    double lo = 0.0, hi = 1.0;
    const double slope = d1 - d0;
    if (slope == 0.0) {
      if (std::fabs(d0) <= eps) continue;
      total += len;
      continue;
    }
    double a = (-eps - d0) / slope;
    double b = (eps - d0) / slope;
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    const double inside = hi > lo ? hi - lo : 0.0;
    total += len * (1.0 - inside);
  }
  return total;
}

enum class GrowthLaw {
  sqrt_loglog_sq,  // √x (log log x)^2
  sqrt_log_sq,     // √x (log x)^2
  sqrt_log,        // √x log x
};

inline double growth_normalizer(GrowthLaw law, double x) {
  switch (law) {
    case GrowthLaw::sqrt_loglog_sq: {
      const double ll = std::log(std::log(x));
      return std::sqrt(x) * ll * ll;
    }
    case GrowthLaw::sqrt_log_sq: {
      const double l = std::log(x);
      return std::sqrt(x) * l * l;
    }
    case GrowthLaw::sqrt_log: return std::sqrt(x) * std::log(x);
  }
  return 1.0;
}

inline std::string to_string(GrowthLaw law) {
  switch (law) {
    case GrowthLaw::sqrt_loglog_sq: return "sqrt_loglog_sq";
    case GrowthLaw::sqrt_log_sq: return "sqrt_log_sq";
    case GrowthLaw::sqrt_log: return "sqrt_log";
  }
  return "unknown";
}

// max |value| / normalizer(x) over the samples. The log log law is only
// defined for x >= 3.
inline double bounded_ratio_report(const SampledSeries& series, GrowthLaw law) {
  series.validate();
  double worst = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double x = series.xs[i];
    if (!(x >= 3.0)) throw DomainError("growth ratio needs x >= 3");
    worst = std::max(worst, std::abs(series.values[i]) / growth_normalizer(law, x));
  }
  return worst;
}

}  // namespace centerbias
