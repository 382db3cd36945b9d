#pragma once

// The command-line experiments as library functions: each takes a parsed
// config and returns a Table. The CLI only adds argument parsing and file
// output on top.

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "centerbias/analysis.hpp"
#include "centerbias/config.hpp"
#include "centerbias/lvalues.hpp"
#include "centerbias/series.hpp"
#include "centerbias/table.hpp"
#include "centerbias/zeros.hpp"

namespace centerbias {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
  unsigned threads = 1;
  std::filesystem::path tau_cache = "tau_cache.bin";
  std::optional<cplx> s;  // unset = centre (product) or 0.75 (explicit)
  std::optional<double> T;
};

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double loglog_or_nan(double x) { return x > 1.0 ? std::log(std::log(x)) : kNaN; }

inline SampledSeries fit_window(const SampledSeries& s) {
  SampledSeries out{{}, {}, s.label};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.xs[i] >= 3.0) {
      out.xs.push_back(s.xs[i]);
      out.values.push_back(s.values[i]);
    }
  }
  return out;
}

inline double fit_slope_or_nan(const SampledSeries& s) {
  const SampledSeries w = fit_window(s);
  if (w.size() < 2) return kNaN;
  try {
    return loglog_fit(w).slope;
  } catch (const SingularFitError&) {
    return kNaN;
  }
}

// L^{(m)}(1/2, π) for the families where an engine exists, else nullopt.
inline std::optional<CentralValue> central_value_for(const ExperimentConfig& c,
                                                     const LFunctionSpec& spec) {
  try {
    if (const auto* d = spec.source.get_if<DirichletSource>()) {
      if (d->chi.is_principal() || c.m != 0) return std::nullopt;
      return dirichlet_central_value(d->chi);
    }
    if (const auto* d = spec.source.get_if<DeltaSource>()) {
      if (c.m != 0) return std::nullopt;
      return delta_central_value(*d->tau);
    }
    if (const auto* e = spec.source.get_if<EllipticSource>()) {
      return elliptic_central_value(*e->curve, c.m, c.root_number);
    }
  } catch (const UnsupportedError&) {
  } catch (const DomainError&) {
  } catch (const CutoffError&) {
  }
  return std::nullopt;
}

}  // namespace detail

inline ojson run_meta(const ExperimentConfig& c, const std::string& command) {
  ojson meta;
  meta["command"] = command;
  meta["version"] = kVersion;
  meta["config"] = c.raw;
  return meta;
}

// x, bias, loglog_x, fit_slope, predicted_slope = R/2 - m.
inline Table cmd_bias(const ExperimentConfig& c, const RunOptions& o = {}) {
  const LFunctionSpec spec = build_spec(c, o.tau_cache, o.threads);
  const auto xs = c.grid();
  const SampledSeries bias = sample(spec, SeriesKind::bias, xs, {{0.5, 0.0}, o.threads});
  const double slope = detail::fit_slope_or_nan(bias);
  const double predicted = 0.5 * c.R - c.m;
  const bool complex = !spec.source.self_dual();
  Table t;
  t.columns = {"x", "bias"};
  if (complex) t.columns.push_back("bias_im");
  for (const char* col : {"loglog_x", "fit_slope", "predicted_slope"}) t.columns.push_back(col);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<Cell> row{xs[i], bias.values[i].real()};
    if (complex) row.emplace_back(bias.values[i].imag());
    row.emplace_back(detail::loglog_or_nan(xs[i]));
    row.emplace_back(slope);
    row.emplace_back(predicted);
    t.add_row(std::move(row));
  }
  return t;
}

// At the centre: x, scaled_product (= (log x)^m ∏ local factors), target.
// Elsewhere: the plain partial product beside L(s) when it is available.
inline Table cmd_product(const ExperimentConfig& c, const RunOptions& o = {}) {
  const LFunctionSpec spec = build_spec(c, o.tau_cache, o.threads);
  const auto xs = c.grid();
  const bool center = !o.s || *o.s == cplx{0.5, 0.0};
  const bool complex = !spec.source.self_dual();
  Table t;
  if (center) {
    const SampledSeries prod = sample(spec, SeriesKind::central_product, xs, {{0.5, 0.0}, o.threads});
    double target = detail::kNaN;
    if (const auto central = detail::central_value_for(c, spec)) {
      try {
        target = predicted_central_constant(spec, *central);
      } catch (const DomainError&) {
      }
    }
    t.columns = {"x", "scaled_product"};
    if (complex) t.columns.push_back("scaled_product_im");
    t.columns.push_back("target");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::vector<Cell> row{xs[i], prod.values[i].real()};
      if (complex) row.emplace_back(prod.values[i].imag());
      row.emplace_back(target);
      t.add_row(std::move(row));
    }
    return t;
  }
  const cplx s = *o.s;
  const SampledSeries logp = sample(spec, SeriesKind::log_product, xs, {s, o.threads});
  cplx target{detail::kNaN, detail::kNaN};
  if (const auto* d = spec.source.get_if<DirichletSource>()) {
    if (s != cplx{1.0, 0.0}) target = dirichlet_l_value(d->chi, s);
  }
  t.columns = {"x", "product_re", "product_im", "target_re", "target_im"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cplx v = std::exp(logp.values[i]);
    t.add_row({xs[i], v.real(), v.imag(), target.real(), target.imag()});
  }
  return t;
}

// Itemized truncated explicit formula at x (config "x", default xmax) for
// the zero counts 1, 10, 100, ... available in the table and the requested
// height T.
inline Table cmd_explicit(const ExperimentConfig& c, const RunOptions& o = {}) {
  if (c.family != Family::dirichlet) {
    throw UnsupportedError("explicit formula is only implemented for the dirichlet family");
  }
  if (!c.zeros_path) throw ValidationError("explicit needs 'zeros_path' in the config");
  const LFunctionSpec spec = build_spec(c, o.tau_cache, o.threads);
  const ZeroTable zeros = load_zero_table(*c.zeros_path);
  const cplx s = o.s.value_or(cplx{0.75, 0.0});
  const double x = c.x.value_or(static_cast<double>(c.xmax));

  std::vector<double> heights;
  for (std::size_t n = 1; n <= zeros.size(); n *= 10) heights.push_back(zeros.height_for(n));
  if (o.T) {
    heights.push_back(*o.T);
  } else if (heights.empty() || heights.back() != zeros.t_max()) {
    heights.push_back(zeros.t_max());
  }
  Table t;
  t.columns = {"x", "s_re", "s_im", "T", "zeros_used", "lhs_re", "lhs_im", "central_term",
               "log_derivative", "log_derivative_error", "zero_sum", "trivial_tail",
               "trivial_bound", "rhs_re", "rhs_im", "residual"};
  for (const double T : heights) {
    const ExplicitFormulaReport r = explicit_formula_residual(spec, zeros, x, s, T);
    t.add_row({r.x, s.real(), s.imag(), r.T, static_cast<std::int64_t>(r.zeros_used),
               r.lhs.real(), r.lhs.imag(), r.central_term.real(), r.log_derivative.real(),
               r.log_derivative_error, r.zero_term.real(), r.trivial.value.real(),
               r.trivial.geometric_bound, r.rhs.real(), r.rhs.imag(), r.residual});
  }
  return t;
}

// x, pi_a, pi_b, difference with π_s(x; q, a) = Σ_{p<=x, p≡a} p^{-s}.
inline Table cmd_race(const ExperimentConfig& c, const RunOptions& o = {}) {
  const auto xs = c.grid();
  const RaceParams& r = c.race;
  const auto diff = race_difference(r.q, r.a, r.b, r.s, xs, o.threads);
  const auto counts = sweep_primes<2>(
      xs,
      [&](std::uint64_t p, std::array<cplx, 2>& out) {
        const std::uint64_t res = p % r.q;
        if (res == r.a % r.q) out[0] = prime_weight(p, r.s);
        if (res == r.b % r.q) out[1] = prime_weight(p, r.s);
      },
      {o.threads});
  Table t;
  t.columns = {"x", "pi_a", "pi_b", "difference"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    t.add_row({xs[i], counts[i][0].real(), counts[i][1].real(), diff[i]});
  }
  return t;
}

// x, product = ∏ N_p/p, log_x_pow_r, normalized = product / (log x)^r,
// predicted_C, rank. ∏ N_p/p is (log x)^r divided by the scaled central
// Euler product, so the predicted C is the reciprocal of that product's
// predicted constant.
inline Table cmd_goldfeld(const ExperimentConfig& c, const RunOptions& o = {}) {
  if (c.family != Family::elliptic) throw ValidationError("goldfeld needs the elliptic family");
  const LFunctionSpec spec = build_spec(c, o.tau_cache, o.threads);
  const auto xs = c.grid();
  const SampledSeries g = sample(spec, SeriesKind::goldfeld, xs, {{0.5, 0.0}, o.threads});
  double predicted = detail::kNaN;
  if (const auto central = detail::central_value_for(c, spec)) {
    try {
      predicted = 1.0 / predicted_central_constant(spec, *central);
    } catch (const DomainError&) {
    }
  }
  Table t;
  t.columns = {"x", "product", "log_x_pow_r", "normalized", "predicted_C", "rank"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lr = xs[i] > 1.0 ? std::pow(std::log(xs[i]), c.m) : detail::kNaN;
    const double p = g.values[i].real();
    t.add_row({xs[i], p, lr, p / lr, predicted, static_cast<std::int64_t>(c.m)});
  }
  return t;
}

// x, psi, and |ψ| over the three growth normalizers (NaN below x = 3).
inline Table cmd_psi(const ExperimentConfig& c, const RunOptions& o = {}) {
  const LFunctionSpec spec = build_spec(c, o.tau_cache, o.threads);
  const auto xs = c.grid();
  const SampledSeries p = sample(spec, SeriesKind::psi, xs, {{0.5, 0.0}, o.threads});
  Table t;
  t.columns = {"x", "psi", "ratio_sqrt_loglog_sq", "ratio_sqrt_log_sq", "ratio_sqrt_log"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double a = std::abs(p.values[i]);
    auto ratio = [&](GrowthLaw law) { return x >= 3.0 ? a / growth_normalizer(law, x) : detail::kNaN; };
    t.add_row({x, p.values[i].real(), ratio(GrowthLaw::sqrt_loglog_sq),
               ratio(GrowthLaw::sqrt_log_sq), ratio(GrowthLaw::sqrt_log)});
  }
  return t;
}

// Least-squares fits against log log x for the bias and second-moment
// series, next to their predicted slopes R/2 - m and -R.
inline Table cmd_fit(const ExperimentConfig& c, const RunOptions& o = {}) {
  const LFunctionSpec spec = build_spec(c, o.tau_cache, o.threads);
  const auto xs = c.grid();
  const std::array<SeriesKind, 2> kinds{SeriesKind::bias, SeriesKind::second_moment};
  const auto series = sample(spec, kinds, xs, {{0.5, 0.0}, o.threads});
  const double predicted[2] = {0.5 * c.R - c.m, static_cast<double>(-c.R)};
  Table t;
  t.columns = {"series", "slope", "intercept", "rms_residual", "n_samples", "predicted_slope"};
  for (std::size_t k = 0; k < 2; ++k) {
    const SampledSeries w = detail::fit_window(series[k]);
    if (w.size() < 2) throw InsufficientDataError("fit needs at least two grid points with x >= 3");
    const FitReport f = loglog_fit(w);
    t.add_row({series[k].label, f.slope, f.intercept, f.rms_residual,
               static_cast<std::int64_t>(f.n_samples), predicted[k]});
  }
  return t;
}

inline Table run_command(const std::string& command, const ExperimentConfig& c,
                         const RunOptions& o = {}) {
  if (command == "bias") return cmd_bias(c, o);
  if (command == "product") return cmd_product(c, o);
  if (command == "explicit") return cmd_explicit(c, o);
  if (command == "race") return cmd_race(c, o);
  if (command == "goldfeld") return cmd_goldfeld(c, o);
  if (command == "psi") return cmd_psi(c, o);
  if (command == "fit") return cmd_fit(c, o);
  throw ValidationError("unknown command '" + command + "'");
}

}  // namespace centerbias
