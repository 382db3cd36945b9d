#pragma once

// Sums and products over primes p <= x for an L-function spec.
//
// Every prime-indexed accumulation goes through sweep_primes(): [1, X] is cut
// into fixed-width blocks, each block keeps its own compensated partial sum,
// and block sums are folded in ascending order. A value at x is the fold of
// all blocks below x plus a snapshot of the block containing x. Because the
// block grid never depends on the thread count or on the other sample
// points, a sampled series is bit-identical to single-x evaluations and to
// runs with any number of threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "centerbias/coeffs.hpp"
#include "centerbias/error.hpp"
#include "centerbias/primes.hpp"
#include "centerbias/summation.hpp"

namespace centerbias {

inline constexpr std::uint64_t kAccumulationBlock = std::uint64_t{1} << 16;

struct SampledSeries {
  std::vector<double> xs;
  std::vector<cplx> values;
  std::string label;

  std::size_t size() const noexcept { return xs.size(); }

  std::vector<double> real_values() const {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [](cplx v) { return v.real(); });
    return out;
  }

  void validate() const {
    if (xs.size() != values.size()) throw ValidationError("series length mismatch");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (!(xs[i] > xs[i - 1])) throw ValidationError("series xs must be strictly increasing");
    }
  }
};

// x = 2^k for k = 4.. while 2^k <= xmax, then xmax itself. xmax < 16 gives
// the single point {xmax}.
inline std::vector<double> dyadic_grid(double xmax) {
  std::vector<double> xs;
  for (int k = 4; std::ldexp(1.0, k) <= xmax; ++k) xs.push_back(std::ldexp(1.0, k));
  if (xs.empty() || xs.back() < xmax) xs.push_back(xmax);
  return xs;
}

// n points, geometrically spaced from xmin to xmax inclusive.
inline std::vector<double> log_spaced_grid(double xmin, double xmax, std::size_t n) {
  if (n == 0) return {};
  if (n == 1 || xmax <= xmin) return {xmax};
  std::vector<double> xs(n);
  const double a = std::log(xmin), b = std::log(xmax);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  xs.front() = xmin;
  xs.back() = xmax;
  return xs;
}

struct SweepOptions {
  unsigned threads = 1;
};

inline std::uint64_t prime_floor(double x) {
  if (!(x >= 2.0)) return 1;
  return static_cast<std::uint64_t>(std::floor(x));
}

// For each x in `xs` (ascending), the ordered compensated sum over primes
// p <= x of the K channels written by term(p, out).
template <std::size_t K, typename TermFn>
std::vector<std::array<cplx, K>> sweep_primes(std::span<const double> xs, TermFn&& term,
                                              const SweepOptions& opts = {}) {
  using Acc = std::array<CompensatedSum<cplx>, K>;
  std::vector<std::array<cplx, K>> out(xs.size());
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] < xs[i - 1]) throw ValidationError("sample grid must be ascending");
  }
  if (xs.empty()) return out;
  const std::uint64_t limit = prime_floor(xs.back());
  if (limit < 2) return out;
  check_sieve_limit(limit);

  const std::uint64_t width = kAccumulationBlock;
  const std::size_t blocks = static_cast<std::size_t>((limit + width - 1) / width);
  std::vector<std::size_t> first_point(blocks + 1, xs.size());
  {
    std::size_t i = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::uint64_t hi = std::min(limit, (b + 1) * width);
      first_point[b] = i;
      while (i < xs.size() && prime_floor(xs[i]) <= hi) ++i;
    }
    first_point[blocks] = i;
  }

  const SegmentedSieve sieve(limit);
  std::vector<Acc> block_total(blocks);
  std::vector<Acc> snapshot(xs.size());
  for_each_block(limit, width, opts.threads, [&](std::size_t b, std::uint64_t lo, std::uint64_t hi) {
    Acc acc{};
    std::array<cplx, K> t{};
    std::size_t next = first_point[b];
    const std::size_t stop = first_point[b + 1];
    sieve.for_each_in(lo, hi, [&](std::uint64_t p) {
      while (next < stop && prime_floor(xs[next]) < p) snapshot[next++] = acc;
      t.fill(cplx{});
      term(p, t);
      for (std::size_t c = 0; c < K; ++c) acc[c].add(t[c]);
    });
    while (next < stop) snapshot[next++] = acc;
    block_total[b] = acc;
  });

  Acc running{};
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t i = first_point[b]; i < first_point[b + 1]; ++i) {
      Acc at = running;
      for (std::size_t c = 0; c < K; ++c) {
        at[c].merge(snapshot[i][c]);
        out[i][c] = at[c].value();
      }
    }
    for (std::size_t c = 0; c < K; ++c) running[c].merge(block_total[b][c]);
  }
  return out;
}

// p^{-s} for real s; s = 1/2 and s = 0 take exact shortcuts so that race
// counts and bias sums share term values bit for bit.
inline double prime_weight(std::uint64_t p, double s) {
  if (s == 0.0) return 1.0;
  if (s == 0.5) return 1.0 / std::sqrt(static_cast<double>(p));
  return std::pow(static_cast<double>(p), -s);
}

inline cplx prime_weight(std::uint64_t p, cplx s) {
  if (s.imag() == 0.0) return prime_weight(p, s.real());
  return std::exp(-s * std::log(static_cast<double>(p)));
}

// -log(1 - z) on the principal branch, accurate for small |z|.
inline cplx neg_log1m(cplx z, std::uint64_t p) {
  const double re = 1.0 - z.real();
  if (std::abs(cplx{re, -z.imag()}) < 1e-300) throw SingularFactorError(p);
  const double mod2m1 = -2.0 * z.real() + std::norm(z);  // |1 - z|^2 - 1
  return {-0.5 * std::log1p(mod2m1), -std::atan2(-z.imag(), re)};
}

enum class SeriesKind {
  log_product,      // Σ_p Σ_j -log(1 - α_{j,p} p^{-s})
  central_product,  // (log x)^m exp(log_product at s = 1/2)
  bias,             // Σ_p a(p)/√p
  second_moment,    // Σ_p a(p^2)/p
  tail,             // Σ_p Σ_{k>=3} a(p^k)/(k p^{k/2})
  psi,              // Σ_{p^k <= x} log p · a(p^k)
  u_half,           // Σ_{√x < p <= x} a(p^2)/(2p)
  goldfeld,         // ∏_p N_p/p, elliptic sources only
};

inline std::string to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::log_product: return "log_product";
    case SeriesKind::central_product: return "central_product";
    case SeriesKind::bias: return "bias";
    case SeriesKind::second_moment: return "second_moment";
    case SeriesKind::tail: return "tail";
    case SeriesKind::psi: return "psi";
    case SeriesKind::u_half: return "u_half";
    case SeriesKind::goldfeld: return "goldfeld";
  }
  return "unknown";
}

struct SeriesOptions {
  cplx s{0.5, 0.0};  // evaluation point for log_product
  unsigned threads = 1;
};

namespace detail {

enum Channel : std::size_t { kLog = 0, kBias, kSecond, kTail, kPsi, kGoldfeld, kChannels };

// k-th powers of α p^{-1/2} for k >= 3 contribute below 1e-18 once
// p^{k/2} > 1e18.
inline unsigned tail_max_k(std::uint64_t p) {
  return static_cast<unsigned>(std::floor(36.0 * std::log(10.0) / std::log(static_cast<double>(p))));
}

inline cplx tail_term(const LocalFactor& f, double w) {
  const unsigned kmax = tail_max_k(f.p());
  CompensatedSum<cplx> acc;
  for (const cplx alpha : f) {
    const cplx z = alpha * w;
    if (z == cplx{}) continue;
    cplx zk = z * z;
    for (unsigned k = 3; k <= kmax; ++k) {
      zk *= z;
      acc.add(zk / static_cast<double>(k));
    }
  }
  return acc.value();
}

inline cplx maybe_real(const LFunctionSpec& spec, cplx v) {
  return spec.source.self_dual() ? cplx{v.real(), 0.0} : v;
}

// ψ contributions from p^k <= x with k >= 2, ordered by p^k.
inline cplx psi_higher_powers(const LFunctionSpec& spec, double x) {
  const std::uint64_t n = prime_floor(x);
  if (n < 4) return {};
  std::vector<std::pair<std::uint64_t, cplx>> terms;
  for (const std::uint64_t p : sieve_primes(isqrt(n))) {
    const LocalFactor f = spec.local_factor(p);
    const double lp = std::log(static_cast<double>(p));
    std::uint64_t v = p;
    for (unsigned k = 2; v <= n / p; ++k) {
      v *= p;
      terms.emplace_back(v, lp * f.power_sum(k));
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  CompensatedSum<cplx> acc;
  for (const auto& [v, t] : terms) acc.add(t);
  return maybe_real(spec, acc.value());
}

// Direct ascending sum over the primes in (√x, x].
inline cplx u_half_at(const LFunctionSpec& spec, double x) {
  const std::uint64_t hi = prime_floor(x);
  if (hi < 2) return {};
  const auto lo = static_cast<std::uint64_t>(std::floor(std::sqrt(x))) + 1;
  CompensatedSum<cplx> acc;
  SegmentedSieve(hi).for_each_in(lo, hi, [&](std::uint64_t p) {
    acc.add(spec.local_factor(p).power_sum(2) / (2.0 * static_cast<double>(p)));
  });
  return maybe_real(spec, acc.value());
}

}  // namespace detail

// Evaluates several series on one grid with a single prime sweep.
inline std::vector<SampledSeries> sample(const LFunctionSpec& spec, std::span<const SeriesKind> kinds,
                                         std::span<const double> xs, const SeriesOptions& opts = {}) {
  using namespace detail;
  bool need[kChannels] = {};
  for (const SeriesKind k : kinds) {
    switch (k) {
      case SeriesKind::log_product: need[kLog] = true; break;
      case SeriesKind::central_product: need[kLog] = true; break;
      case SeriesKind::bias: need[kBias] = true; break;
      case SeriesKind::second_moment: need[kSecond] = true; break;
      case SeriesKind::tail: need[kTail] = true; break;
      case SeriesKind::psi: need[kPsi] = true; break;
      case SeriesKind::u_half: break;
      case SeriesKind::goldfeld: need[kGoldfeld] = true; break;
    }
  }
  const bool has_central = std::find(kinds.begin(), kinds.end(), SeriesKind::central_product) != kinds.end();
  const bool has_log = std::find(kinds.begin(), kinds.end(), SeriesKind::log_product) != kinds.end();
  if (has_central && has_log && opts.s != cplx{0.5, 0.0}) {
    throw DomainError("central_product and log_product at s != 1/2 need separate sweeps");
  }
  const cplx s = has_central ? cplx{0.5, 0.0} : opts.s;
  const EllipticSource* elliptic = spec.source.get_if<EllipticSource>();
  if (need[kGoldfeld] && !elliptic) throw DomainError("goldfeld product needs an elliptic source");
  if (need[kGoldfeld] || need[kLog] || need[kBias] || need[kSecond] || need[kTail] || need[kPsi]) {
    if (!xs.empty() && prime_floor(xs.back()) > spec.source.cutoff()) {
      throw CutoffError(prime_floor(xs.back()), spec.source.cutoff());
    }
  }

  auto term = [&](std::uint64_t p, std::array<cplx, kChannels>& out) {
    const LocalFactor f = spec.local_factor(p);
    const double w = prime_weight(p, 0.5);
    if (need[kLog]) {
      const cplx ps = prime_weight(p, s);
      cplx t{};
      for (const cplx alpha : f) t += neg_log1m(alpha * ps, p);
      out[kLog] = t;
    }
    if (need[kBias] || need[kPsi]) {
      const cplx a = f.power_sum(1);
      if (need[kBias]) out[kBias] = a * w;
      if (need[kPsi]) out[kPsi] = a * std::log(static_cast<double>(p));
    }
    if (need[kSecond]) out[kSecond] = f.power_sum(2) / static_cast<double>(p);
    if (need[kTail]) out[kTail] = tail_term(f, w);
    if (need[kGoldfeld]) {
      const auto np = elliptic->np(p);
      const double pd = static_cast<double>(p);
      out[kGoldfeld] = std::log1p((static_cast<double>(np) - pd) / pd);
    }
  };
  const SweepOptions sweep{opts.threads};
  std::vector<std::array<cplx, kChannels>> sums;
  if (need[kLog] || need[kBias] || need[kSecond] || need[kTail] || need[kPsi] || need[kGoldfeld]) {
    sums = sweep_primes<kChannels>(xs, term, sweep);
  } else {
    sums.resize(xs.size());
  }

  std::vector<SampledSeries> out;
  for (const SeriesKind kind : kinds) {
    SampledSeries series{{xs.begin(), xs.end()}, std::vector<cplx>(xs.size()), to_string(kind)};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto& v = sums[i];
      const double x = xs[i];
      cplx value;
      switch (kind) {
        case SeriesKind::log_product: value = v[kLog]; break;
        case SeriesKind::central_product: {
          value = std::exp(v[kLog]);
          if (spec.m != 0) value *= std::pow(std::log(x), spec.m);
          value = maybe_real(spec, value);
          break;
        }
        case SeriesKind::bias: value = maybe_real(spec, v[kBias]); break;
        case SeriesKind::second_moment: value = maybe_real(spec, v[kSecond]); break;
        case SeriesKind::tail: value = maybe_real(spec, v[kTail]); break;
        case SeriesKind::psi: value = maybe_real(spec, v[kPsi]) + psi_higher_powers(spec, x); break;
        case SeriesKind::u_half: value = u_half_at(spec, x); break;
        case SeriesKind::goldfeld: value = std::exp(v[kGoldfeld].real()); break;
      }
      series.values[i] = value;
    }
    out.push_back(std::move(series));
  }
  return out;
}

inline SampledSeries sample(const LFunctionSpec& spec, SeriesKind kind, std::span<const double> xs,
                            const SeriesOptions& opts = {}) {
  const std::array<SeriesKind, 1> kinds{kind};
  return std::move(sample(spec, kinds, xs, opts).front());
}

namespace detail {

inline cplx evaluate_at(const LFunctionSpec& spec, SeriesKind kind, double x,
                        const SeriesOptions& opts) {
  const std::array<double, 1> xs{x};
  return sample(spec, kind, xs, opts).values.front();
}

}  // namespace detail

// Σ_{p<=x} Σ_j -log(1 - α_{j,p} p^{-s}); x < 2 gives 0.
inline cplx log_partial_euler_product(const LFunctionSpec& spec, double x, cplx s,
                                      unsigned threads = 1) {
  return detail::evaluate_at(spec, SeriesKind::log_product, x, {s, threads});
}

// (log x)^m ∏_{p<=x} ∏_j (1 - α_{j,p} p^{-1/2})^{-1}.
inline cplx central_scaled_product(const LFunctionSpec& spec, double x, unsigned threads = 1) {
  return detail::evaluate_at(spec, SeriesKind::central_product, x, {{0.5, 0.0}, threads});
}

// Real parts; use sample() for complex-valued (non-self-dual) series.
inline double bias_sum(const LFunctionSpec& spec, double x, unsigned threads = 1) {
  return detail::evaluate_at(spec, SeriesKind::bias, x, {{0.5, 0.0}, threads}).real();
}

inline double second_moment_sum(const LFunctionSpec& spec, double x, unsigned threads = 1) {
  return detail::evaluate_at(spec, SeriesKind::second_moment, x, {{0.5, 0.0}, threads}).real();
}

inline double tail_sum(const LFunctionSpec& spec, double x, unsigned threads = 1) {
  return detail::evaluate_at(spec, SeriesKind::tail, x, {{0.5, 0.0}, threads}).real();
}

inline double psi(const LFunctionSpec& spec, double x, unsigned threads = 1) {
  return detail::evaluate_at(spec, SeriesKind::psi, x, {{0.5, 0.0}, threads}).real();
}

inline double u_half(const LFunctionSpec& spec, double x) {
  if (!(x >= 4.0)) throw DomainError("u_half needs x >= 4");
  return detail::u_half_at(spec, x).real();
}

// ∏_{p<=x} N_p/p with N_p = p + 1 - a_p (good p) and p - a_p (bad p).
inline double goldfeld_product(const LFunctionSpec& spec, double x, unsigned threads = 1) {
  return detail::evaluate_at(spec, SeriesKind::goldfeld, x, {{0.5, 0.0}, threads}).real();
}

// The finite product ∏_{p<=x} ∏_j (1 - α_{j,p} p^{-s})^{-1} multiplied out
// directly, in ascending p. Independent of the logarithmic route.
inline cplx direct_partial_euler_product(const LFunctionSpec& spec, double x, cplx s) {
  const std::uint64_t n = prime_floor(x);
  cplx prod = 1.0;
  if (n < 2) return prod;
  SegmentedSieve(n).for_each_in(2, n, [&](std::uint64_t p) {
    const LocalFactor f = spec.local_factor(p);
    const cplx ps = prime_weight(p, s);
    for (const cplx alpha : f) {
      const cplx d = 1.0 - alpha * ps;
      if (std::abs(d) < 1e-300) throw SingularFactorError(p);
      prod /= d;
    }
  });
  return prod;
}

// π_s(x; q, a) = Σ_{p<=x, p ≡ a (mod q)} p^{-s}.
inline double weighted_prime_count(std::uint64_t q, std::uint64_t a, double s, double x,
                                   unsigned threads = 1) {
  if (q == 0 || std::gcd(a % q, q) != 1) throw DomainError("weighted_prime_count needs gcd(a, q) = 1");
  if (s < 0) throw DomainError("weighted_prime_count needs s >= 0");
  const std::array<double, 1> xs{x};
  const auto r = sweep_primes<1>(
      xs,
      [&](std::uint64_t p, std::array<cplx, 1>& out) {
        if (p % q == a % q) out[0] = prime_weight(p, s);
      },
      {threads});
  return r[0][0].real();
}

// π_s(x; q, a) - π_s(x; q, b) summed as one signed series, sampled on xs.
// For q = 4, (a, b) = (1, 3), s = 1/2 this reproduces the χ_4 bias sum
// bit for bit.
inline std::vector<double> race_difference(std::uint64_t q, std::uint64_t a, std::uint64_t b,
                                           double s, std::span<const double> xs,
                                           unsigned threads = 1) {
  if (q == 0 || std::gcd(a % q, q) != 1 || std::gcd(b % q, q) != 1) {
    throw DomainError("race_difference needs residues coprime to q");
  }
  if (s < 0) throw DomainError("race_difference needs s >= 0");
  const auto r = sweep_primes<1>(
      xs,
      [&](std::uint64_t p, std::array<cplx, 1>& out) {
        const std::uint64_t c = p % q;
        if (c == a % q) out[0] = prime_weight(p, s);
        else if (c == b % q) out[0] = -prime_weight(p, s);
      },
      {threads});
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = r[i][0].real();
  return out;
}

}  // namespace centerbias
