#pragma once

// Central values L^{(m)}(1/2, π), m <= 1, for the three concrete families,
// and the limit constant √2^ν / (e^{mγ} m!) · L^{(m)}(1/2, π).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "centerbias/coeffs.hpp"
#include "centerbias/error.hpp"
#include "centerbias/tau.hpp"

namespace centerbias {

inline constexpr long double kEulerGamma = 0.577215664901532860606512090082402431042L;
inline constexpr long double kPi = 3.14159265358979323846264338327950288420L;

struct CentralValue {
  cplx value;
  int m = 0;
  std::string method;
  double est_error = 0.0;

  double real() const noexcept { return value.real(); }
};

namespace detail {

using lcplx = std::complex<long double>;

struct HurwitzDepth {
  int terms = 30;      // direct terms before the Euler–Maclaurin tail
  int corrections = 15;  // Bernoulli corrections
};

// ζ(s, a) by Euler–Maclaurin summation, s != 1, a > 0.
inline lcplx hurwitz_zeta(lcplx s, long double a, HurwitzDepth depth) {
  const int n = std::max(depth.terms, static_cast<int>(std::abs(s)) + depth.terms);
  lcplx sum = 0;
  for (int k = 0; k < n; ++k) sum += std::exp(-s * std::log(k + a));
  const long double na = n + a;
  const long double log_na = std::log(na);
  const lcplx na_s = std::exp(-s * log_na);  // (N + a)^{-s}
  sum += na * na_s / (s - 1.0L);
  sum += na_s / 2.0L;
  // B_{2j}/(2j)! · s(s+1)...(s+2j-2) · (N+a)^{-s-2j+1}
  lcplx rising = s;             // (s)_{2j-1}
  lcplx power = na_s / na;      // (N+a)^{-s-2j+1}
  long double fact = 2.0L;      // (2j)!
  for (int j = 1; j <= depth.corrections; ++j) {
    const long double b = boost::math::bernoulli_b2n<long double>(j);
    sum += b / fact * rising * power;
    rising *= (s + static_cast<long double>(2 * j - 1)) * (s + static_cast<long double>(2 * j));
    power /= na * na;
    fact *= static_cast<long double>(2 * j + 1) * static_cast<long double>(2 * j + 2);
  }
  return sum;
}

inline lcplx dirichlet_l_hurwitz(const DirichletCharacter& chi, lcplx s, HurwitzDepth depth) {
  const std::uint64_t q = chi.modulus();
  lcplx total = 0;
  for (std::uint64_t a = 1; a <= q; ++a) {
    const cplx c = chi(a);
    if (c == cplx{}) continue;
    total += lcplx(c.real(), c.imag()) *
             hurwitz_zeta(s, static_cast<long double>(a) / static_cast<long double>(q), depth);
  }
  return total * std::exp(-s * std::log(static_cast<long double>(q)));
}

// L(1/2, χ) = (2/√π) ∫_0^∞ Σ_n χ(n) e^{-n u^2} du for non-principal χ.
// The inner sum is Σ_a χ(a) e^{-at} / (1 - e^{-qt}) with t = u^2; near
// t = 0 the numerator is rewritten with expm1 using Σ_a χ(a) = 0.
inline cplx dirichlet_central_mellin(const DirichletCharacter& chi) {
  const std::uint64_t q = chi.modulus();
  auto theta = [&](double t, bool imag) {
    double num = 0.0;
    for (std::uint64_t a = 1; a <= q; ++a) {
      const cplx c = chi(a);
      const double w = imag ? c.imag() : c.real();
      if (w == 0.0) continue;
      num += t < 1.0 ? w * std::expm1(-static_cast<double>(a) * t)
                     : w * std::exp(-static_cast<double>(a) * t);
    }
    if (t == 0.0) {
      // Limit t -> 0 of the expm1 quotient: -Σ a χ(a) / q.
      double lim = 0.0;
      for (std::uint64_t a = 1; a <= q; ++a) {
        const cplx c = chi(a);
        lim -= static_cast<double>(a) * (imag ? c.imag() : c.real());
      }
      return lim / static_cast<double>(q);
    }
    const double den = -std::expm1(-static_cast<double>(q) * t);
    return num / den;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double upper = 8.0;  // e^{-64} below double resolution
  const double re = integrator.integrate([&](double u) { return theta(u * u, false); }, 0.0, upper);
  const double im = chi.is_real()
                        ? 0.0
                        : integrator.integrate([&](double u) { return theta(u * u, true); }, 0.0, upper);
  const double scale = 2.0 / std::sqrt(static_cast<double>(kPi));
  return {scale * re, scale * im};
}

}  // namespace detail

// L(s, χ) for any table character via the Hurwitz decomposition
// L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q). At s = 1 the Hurwitz poles cancel for
// non-principal χ and L(1, χ) = -(1/q) Σ_a χ(a) ψ(a/q); the principal
// character has a pole there.
inline cplx dirichlet_l_value(const DirichletCharacter& chi, cplx s) {
  if (s == cplx{1.0, 0.0}) {
    if (chi.is_principal()) throw DomainError("L(s, χ) has a pole at s = 1 for principal χ");
    const std::uint64_t q = chi.modulus();
    cplx total = 0.0;
    for (std::uint64_t a = 1; a < q; ++a) {
      total += chi(a) * boost::math::digamma(static_cast<double>(a) / static_cast<double>(q));
    }
    return -total / static_cast<double>(q);
  }
  const auto v = detail::dirichlet_l_hurwitz(chi, {s.real(), s.imag()}, {});
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

// L(1/2, χ) by two independent routes: Euler–Maclaurin on the Hurwitz split
// and quadrature of the Mellin integral of the theta-type series. The
// reported error is the larger of their disagreement and the Hurwitz
// truncation drift between two depths.
inline CentralValue dirichlet_central_value(const DirichletCharacter& chi) {
  if (chi.is_principal()) {
    throw DomainError("central value needs a non-principal character");
  }
  const detail::lcplx half{0.5L, 0.0L};
  const auto shallow = detail::dirichlet_l_hurwitz(chi, half, {30, 15});
  const auto deep = detail::dirichlet_l_hurwitz(chi, half, {60, 20});
  const cplx mellin = detail::dirichlet_central_mellin(chi);
  const cplx value{static_cast<double>(deep.real()), static_cast<double>(deep.imag())};
  const double drift = static_cast<double>(std::abs(deep - shallow));
  const double split = std::abs(value - mellin);
  return {value, 0, "hurwitz-euler-maclaurin/mellin-quadrature",
          std::max({drift, split, 1e-16})};
}

// The Mellin-quadrature route alone, for cross-checks.
inline cplx dirichlet_central_value_quadrature(const DirichletCharacter& chi) {
  if (chi.is_principal()) throw DomainError("central value needs a non-principal character");
  return detail::dirichlet_central_mellin(chi);
}

struct LogDerivative {
  cplx value;  // L'(s)/L(s)
  double est_error = 0.0;
};

// L'/L(s, χ) with L' from central differences refined by two Richardson
// steps. h = 0.02 balances the O(h^6) truncation of the extrapolated
// difference against long-double rounding in L.
inline LogDerivative dirichlet_log_derivative(const DirichletCharacter& chi, cplx s) {
  using detail::lcplx;
  const lcplx z{s.real(), s.imag()};
  auto l = [&](lcplx w) { return detail::dirichlet_l_hurwitz(chi, w, {40, 18}); };
  auto diff = [&](long double h) { return (l(z + h) - l(z - h)) / (2.0L * h); };
  const long double h = 0.02L;
  const lcplx d1 = diff(h), d2 = diff(h / 2), d3 = diff(h / 4);
  const lcplx r1 = (4.0L * d2 - d1) / 3.0L;
  const lcplx r2 = (4.0L * d3 - d2) / 3.0L;
  const lcplx deriv = (16.0L * r2 - r1) / 15.0L;
  const lcplx value = l(z);
  if (std::abs(value) < 1e-300L) throw DomainError("L(s, χ) vanishes at the requested s");
  const lcplx ratio = deriv / value;
  const double err = static_cast<double>(std::abs((deriv - r2) / value));
  return {{static_cast<double>(ratio.real()), static_cast<double>(ratio.imag())},
          std::max(err, 1e-16)};
}

// L(6, Δ) = L(1/2, π_Δ) from the completed function Λ(s) = (2π)^{-s} Γ(s) L(s, Δ),
// Λ(s) = Λ(12 - s). Splitting the Mellin integral at y = t gives
//
//   L(6, Δ) = Σ τ(n) n^{-6} [Q(6, 2πnt) + Q(6, 2πn/t)],
//
// Q the regularized upper incomplete gamma. t = 1 is the symmetric split;
// any other t is an independent evaluation of the same number.
inline long double delta_smoothed_series(const TauTable& tau, std::size_t terms,
                                         long double split = 1.0L) {
  if (terms > tau.cutoff()) {
    throw CutoffError(terms, tau.cutoff());
  }
  auto q6 = [](long double x) {
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 5; ++k) {
      term *= x / k;
      sum += term;
    }
    return std::exp(-x) * sum;
  };
  long double total = 0.0L;
  for (std::size_t n = terms; n >= 1; --n) {
    const long double nn = static_cast<long double>(n);
    const long double x = 2.0L * kPi * nn;
    const long double weight = q6(x * split) + q6(x / split);
    total += static_cast<long double>(tau(n)) * std::pow(nn, -6.0L) * weight;
  }
  return total;
}

// Σ_{n <= terms} τ(n) n^{-6}. The Dirichlet series at s = 6 is only
// conditionally convergent (absolute convergence needs s > 13/2), so this
// partial sum drifts on the order of 1e-2 at 10^4 terms.
inline long double delta_naive_partial_sum(const TauTable& tau, std::size_t terms) {
  if (terms > tau.cutoff()) throw CutoffError(terms, tau.cutoff());
  long double total = 0.0L;
  for (std::size_t n = terms; n >= 1; --n) {
    total += static_cast<long double>(tau(n)) * std::pow(static_cast<long double>(n), -6.0L);
  }
  return total;
}

inline CentralValue delta_central_value(const TauTable& tau, std::size_t terms = 100) {
  if (tau.cutoff() < terms) {
    throw CutoffError(terms, tau.cutoff());
  }
  const long double deep = delta_smoothed_series(tau, terms);
  const long double shallow = delta_smoothed_series(tau, terms / 2);
  const auto err = static_cast<double>(std::fabs(deep - shallow));
  return {{static_cast<double>(deep), 0.0}, 0, "smoothed-functional-equation",
          std::max(err, 1e-15)};
}

// a_n for 1 <= n <= n_max from the prime traces: a_{p^{k+1}} = a_p a_{p^k} - p a_{p^{k-1}}
// at good p, a_{p^k} = a_p^k at bad p, multiplicative across coprime factors.
// Index 0 is unused.
inline std::vector<std::int64_t> elliptic_an(const EllipticCurve& curve, std::uint64_t n_max) {
  std::vector<std::uint64_t> spf(n_max + 1, 0);
  for (std::uint64_t i = 2; i <= n_max; ++i) {
    if (spf[i]) continue;
    for (std::uint64_t j = i; j <= n_max; j += i) {
      if (!spf[j]) spf[j] = i;
    }
  }
  std::vector<std::int64_t> a(n_max + 1, 0);
  if (n_max >= 1) a[1] = 1;
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    const std::uint64_t p = spf[n];
    std::uint64_t pk = 1;
    std::uint64_t r = n;
    while (r % p == 0) {
      r /= p;
      pk *= p;
    }
    if (r > 1) {
      a[n] = a[pk] * a[r];
    } else if (pk == p) {
      a[n] = curve.ap(p);
    } else if (curve.is_bad(p)) {
      a[n] = a[p] * a[n / p];
    } else {
      a[n] = a[p] * a[n / p] - static_cast<std::int64_t>(p) * a[n / (p * p)];
    }
  }
  return a;
}

namespace detail {

inline long double elliptic_series(const std::vector<std::int64_t>& a, std::uint64_t conductor,
                                   std::uint64_t terms, int m) {
  const long double c = 2.0L * kPi / std::sqrt(static_cast<long double>(conductor));
  long double total = 0.0L;
  for (std::uint64_t n = terms; n >= 1; --n) {
    if (a[n] == 0) continue;
    const long double x = c * static_cast<long double>(n);
    const long double kernel = m == 0 ? std::exp(-x) : boost::math::expint(1, x);
    total += static_cast<long double>(a[n]) / static_cast<long double>(n) * kernel;
  }
  return 2.0L * total;
}

}  // namespace detail

// L^{(m)}(E, 1) = L^{(m)}(1/2, π_E) for m in {0, 1}:
//   m = 0:  2 Σ a_n/n e^{-2πn/√N}
//   m = 1:  2 Σ a_n/n E_1(2πn/√N)
// with the root number w supplied (w = +1 for m = 0, w = -1 for m = 1).
// Truncation at depth_factor·√N terms; the estimate compares against twice
// that depth.
inline CentralValue elliptic_central_value(const EllipticCurve& curve, int m, int root_number,
                                           double depth_factor = 20.0) {
  if (m < 0) throw DomainError("central order m must be >= 0");
  if (m >= 2) throw UnsupportedError("central derivatives of order >= 2 are not supported");
  if (root_number != 1 && root_number != -1) throw DomainError("root number must be ±1");
  if ((m == 0 && root_number != 1) || (m == 1 && root_number != -1)) {
    throw DomainError("root number inconsistent with central order parity");
  }
  const auto terms = static_cast<std::uint64_t>(
      std::ceil(depth_factor * std::sqrt(static_cast<double>(curve.conductor()))));
  const auto a = elliptic_an(curve, 2 * terms);
  const long double shallow = detail::elliptic_series(a, curve.conductor(), terms, m);
  const long double deep = detail::elliptic_series(a, curve.conductor(), 2 * terms, m);
  const auto err = static_cast<double>(std::fabs(deep - shallow));
  return {{static_cast<double>(deep), 0.0}, m,
          m == 0 ? "exponential-series" : "exponential-integral-series", std::max(err, 1e-16)};
}

// √2^ν / (e^{mγ} m!) · L^{(m)}(1/2, π).
inline double predicted_central_constant(const LFunctionSpec& spec, const CentralValue& central) {
  if (spec.m != central.m) {
    throw DomainError("central value order m=" + std::to_string(central.m) +
                      " does not match spec m=" + std::to_string(spec.m));
  }
  if (std::abs(central.value.imag()) > 1e-12) {
    throw DomainError("predicted constant needs a real central value");
  }
  long double factorial = 1.0L;
  for (int k = 2; k <= spec.m; ++k) factorial *= k;
  const long double scale = std::pow(std::sqrt(2.0L), static_cast<long double>(spec.nu)) /
                            (std::exp(spec.m * kEulerGamma) * factorial);
  return static_cast<double>(scale * static_cast<long double>(central.value.real()));
}

}  // namespace centerbias
