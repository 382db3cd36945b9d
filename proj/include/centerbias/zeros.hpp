#pragma once

// Tables of nontrivial zeros ρ = 1/2 + iγ and the zero-dependent terms of the
// explicit formula at finite height T.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "centerbias/coeffs.hpp"
#include "centerbias/error.hpp"
#include "centerbias/lvalues.hpp"
#include "centerbias/primes.hpp"
#include "centerbias/summation.hpp"

namespace centerbias {

// Positive ordinates only; the conjugate zero 1/2 - iγ is implied. A zero of
// multiplicity r appears r times.
struct ZeroTable {
  std::vector<double> gammas;
  std::string lfunction;
  std::string source;

  double t_max() const noexcept { return gammas.empty() ? 0.0 : gammas.back(); }
  std::size_t size() const noexcept { return gammas.size(); }

  // Height just covering the first n zeros.
  double height_for(std::size_t n) const {
    if (n == 0) return 0.0;
    if (n > gammas.size()) {
      throw InsufficientDataError("table holds " + std::to_string(gammas.size()) +
                                  " zeros, asked for " + std::to_string(n));
    }
    return gammas[n - 1];
  }
};

// One γ per line, ascending. '#' starts a comment line; a comment of the form
// "# lfunction: <label>" sets the table label. Blank lines are ignored.
inline ZeroTable parse_zero_table(std::istream& in, std::string source = "<stream>") {
  ZeroTable table;
  table.source = std::move(source);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view v(line);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    if (v.empty()) continue;
    if (v.front() == '#') {
      constexpr std::string_view key = "lfunction:";
      v.remove_prefix(1);
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      if (v.substr(0, key.size()) == key) {
        v.remove_prefix(key.size());
        while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
        table.lfunction = std::string(v);
      }
      continue;
    }
    double gamma = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), gamma);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(gamma)) {
      throw ParseError("not a number: '" + std::string(v) + "'", number);
    }
    if (gamma <= 0.0) throw ParseError("zero ordinate must be positive", number);
    if (!table.gammas.empty() && gamma < table.gammas.back()) {
      throw ParseError("ordinates must be ascending", number);
    }
    table.gammas.push_back(gamma);
  }
  return table;
}

inline ZeroTable load_zero_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open zero table: " + path.string());
  return parse_zero_table(in, path.string());
}

namespace detail {

inline void check_height(const ZeroTable& table, double T) {
  if (!table.gammas.empty() && T > table.t_max()) {
    throw InsufficientDataError("height T=" + std::to_string(T) + " exceeds table T_max=" +
                                std::to_string(table.t_max()));
  }
}

}  // namespace detail

// Σ_{0 < γ <= T} [x^{ρ-s}/(ρ-s) + x^{ρ̄-s}/(ρ̄-s)]. Real for real s. An
// empty table contributes 0 at any height.
inline cplx zero_sum(const ZeroTable& table, double x, cplx s, double T) {
  detail::check_height(table, T);
  const double lx = std::log(x);
  CompensatedSum<cplx> acc;
  for (const double g : table.gammas) {
    if (g > T) break;
    const cplx up = cplx{0.5, g} - s;
    const cplx down = cplx{0.5, -g} - s;
    if (up == cplx{} || down == cplx{}) throw DomainError("s coincides with a zero");
    acc.add(std::exp(up * lx) / up + std::exp(down * lx) / down);
  }
  return acc.value();
}

struct ZeroTerm {
  cplx value;
  double est_error = 0.0;
};

// R_s(x) = (1/log x) [Σ_ρ x^{ρ-s}/(ρ-s) + Σ_ρ ∫_s^∞ x^{ρ-z}/(ρ-z)^2 dz] over
// zeros with |γ| <= T, the integral along the horizontal ray z = s + t.
// The ray is cut at t = 40/log x, where x^{-t} = e^{-40}; the dropped piece
// is bounded and folded into est_error. `max_depth` is the adaptive
// Gauss–Kronrod bisection limit.
inline ZeroTerm r_s_term(const ZeroTable& table, double x, cplx s, double T,
                         unsigned max_depth = 15) {
  if (!(s.real() > 0.5)) throw DomainError("r_s_term needs Re(s) > 1/2");
  if (!(x >= 2.0)) throw DomainError("r_s_term needs x >= 2");
  detail::check_height(table, T);
  const double lx = std::log(x);
  const double length = 40.0 / lx;
  const double sigma = s.real() - 0.5;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

  CompensatedSum<cplx> integrals;
  double quad_error = 0.0;
  double ray_tail = 0.0;
  for (const double g : table.gammas) {
    if (g > T) break;
    for (const double gg : {g, -g}) {
      const cplx rho{0.5, gg};
      auto f = [&](double t, bool imag) {
        const cplx d = rho - s - t;
        const cplx v = std::exp(d * lx) / (d * d);
        return imag ? v.imag() : v.real();
      };
      double e_re = 0.0, e_im = 0.0;
      const double re = GK::integrate([&](double t) { return f(t, false); }, 0.0, length,
                                      max_depth, 1e-14, &e_re);
      const double im = GK::integrate([&](double t) { return f(t, true); }, 0.0, length,
                                      max_depth, 1e-14, &e_im);
      integrals.add({re, im});
      quad_error += std::abs(e_re) + std::abs(e_im);
      // |x^{ρ-z}/(ρ-z)^2| <= x^{-σ-t}/σ^2 on the dropped part of the ray.
      ray_tail += std::exp(-(sigma + length) * lx) / (sigma * sigma * lx);
    }
  }
  const cplx total = (zero_sum(table, x, s, T) + integrals.value()) / lx;
  return {total, (quad_error + ray_tail) / lx};
}

// Σ_{0<γ<=T} 2 x^{1/2-σ} / ((σ - 1/2)^2 log x): triangle-inequality bound on
// the integral part of r_s_term (before the 1/log x factor).
inline double r_s_integral_bound(const ZeroTable& table, double x, cplx s, double T) {
  const double sigma = s.real() - 0.5;
  std::size_t count = 0;
  for (const double g : table.gammas) {
    if (g > T) break;
    ++count;
  }
  return 2.0 * static_cast<double>(count) * std::pow(x, -sigma) / (sigma * sigma * std::log(x));
}

struct TrivialZeroTail {
  cplx value;
  cplx first_term;
  double geometric_bound = 0.0;  // |first term| / (1 - x^{-2}) summed over j
  std::size_t terms = 0;
};

// Σ_j Σ_{k>=0} x^{-2k-μ_j-s} / (2k + μ_j + s), summed until terms fall
// below 1e-18 of the first.
inline TrivialZeroTail trivial_zero_tail(const std::vector<double>& mu, double x, cplx s) {
  TrivialZeroTail out;
  if (!(x > 1.0)) throw DomainError("trivial-zero tail needs x > 1");
  const double lx = std::log(x);
  CompensatedSum<cplx> acc;
  for (const double m : mu) {
    const cplx first = std::exp(-(m + s) * lx) / (m + s);
    out.first_term += first;
    out.geometric_bound += std::abs(first) / (1.0 - 1.0 / (x * x));
    for (std::size_t k = 0; k < 200; ++k) {
      const cplx shift = 2.0 * static_cast<double>(k) + m + s;
      if (shift == cplx{}) throw DomainError("s sits on a trivial zero");
      const cplx t = std::exp(-shift * lx) / shift;
      acc.add(t);
      ++out.terms;
      if (std::abs(t) <= 1e-18 * std::abs(first)) break;
    }
  }
  out.value = acc.value();
  return out;
}

struct ExplicitFormulaReport {
  double x = 0.0;
  cplx s;
  double T = 0.0;
  std::size_t zeros_used = 0;
  cplx lhs;             // Σ_{n<=x} Λ(n) a(n) n^{-s}, boundary term halved at integer x
  cplx central_term;    // -m x^{1/2-s} / (1/2 - s)
  cplx log_derivative;  // -L'/L(s)
  double log_derivative_error = 0.0;
  cplx zero_term;       // -Σ_ρ x^{ρ-s}/(ρ-s)
  TrivialZeroTail trivial;
  cplx rhs;
  double residual = 0.0;  // |lhs - rhs|
};

// Σ_{p^k <= x} log p · a(p^k) p^{-ks}. When x is an exact integer equal to a
// prime power, that final term is weighted by 1/2.
inline cplx explicit_formula_lhs(const LFunctionSpec& spec, double x, cplx s) {
  if (!(x >= 2.0)) return {};
  const auto n = static_cast<std::uint64_t>(std::floor(x));
  const bool integral = static_cast<double>(n) == x;
  CompensatedSum<cplx> acc;
  for (const PrimePower& pp : prime_powers_up_to(n)) {
    const LocalFactor f = spec.local_factor(pp.p);
    const double lp = std::log(static_cast<double>(pp.p));
    cplx term = lp * f.power_sum(pp.k) * std::exp(-s * (lp * pp.k));
    if (integral && pp.value == n) term *= 0.5;
    acc.add(term);
  }
  return acc.value();
}

// |LHS - RHS(T)| for the truncated explicit formula of a Dirichlet L-function.
inline ExplicitFormulaReport explicit_formula_residual(const LFunctionSpec& spec,
                                                       const ZeroTable& table, double x, cplx s,
                                                       double T) {
  const auto* dirichlet = spec.source.get_if<DirichletSource>();
  if (!dirichlet) {
    throw UnsupportedError("explicit formula is only implemented for Dirichlet specs");
  }
  if (dirichlet->chi.is_principal()) {
    throw UnsupportedError("explicit formula needs a non-principal character (entire L)");
  }
  if (spec.mu.size() != spec.degree()) {
    throw ValidationError("explicit formula needs one archimedean shift mu per degree");
  }
  if (s == cplx{0.5, 0.0}) throw DomainError("explicit formula excludes s = 1/2");
  detail::check_height(table, T);

  ExplicitFormulaReport r;
  r.x = x;
  r.s = s;
  r.T = T;
  for (const double g : table.gammas) {
    if (g > T) break;
    ++r.zeros_used;
  }
  r.lhs = explicit_formula_lhs(spec, x, s);
  const double xe = std::max(x, 1.0 + 1e-9);
  if (spec.m != 0) {
    const cplx d = 0.5 - s;
    r.central_term = -static_cast<double>(spec.m) * std::exp(d * std::log(xe)) / d;
  }
  const LogDerivative ld = dirichlet_log_derivative(dirichlet->chi, s);
  r.log_derivative = -ld.value;
  r.log_derivative_error = ld.est_error;
  r.zero_term = table.gammas.empty() ? cplx{} : -zero_sum(table, xe, s, T);
  r.trivial = trivial_zero_tail(spec.mu, xe, s);
  r.rhs = r.central_term + r.log_derivative + r.zero_term + r.trivial.value;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

}  // namespace centerbias
