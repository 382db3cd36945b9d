#pragma once

// Satake parameters α_{j,p} for the supported L-function families,
// normalized so that the critical line is Re(s) = 1/2.

#include <algorithm>
#include <array>
#include <atomic>
#include <climits>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "centerbias/elliptic.hpp"
#include "centerbias/error.hpp"
#include "centerbias/tau.hpp"

namespace centerbias {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxDegree = 8;

// Satake data at one prime. Slots past size() are zero; at ramified primes
// some of the first size() slots may be zero as well.
class LocalFactor {
 public:
  LocalFactor() = default;
  LocalFactor(std::uint64_t p, std::initializer_list<cplx> alphas) : p_(p) {
    if (alphas.size() > kMaxDegree) throw ValidationError("local factor degree too large");
    std::copy(alphas.begin(), alphas.end(), alphas_.begin());
    n_ = alphas.size();
  }
  LocalFactor(std::uint64_t p, const std::vector<cplx>& alphas) : p_(p) {
    if (alphas.size() > kMaxDegree) throw ValidationError("local factor degree too large");
    std::copy(alphas.begin(), alphas.end(), alphas_.begin());
    n_ = alphas.size();
  }

  std::uint64_t p() const noexcept { return p_; }
  std::size_t size() const noexcept { return n_; }
  cplx operator[](std::size_t j) const noexcept { return alphas_[j]; }
  const cplx* begin() const noexcept { return alphas_.data(); }
  const cplx* end() const noexcept { return alphas_.data() + n_; }

  // a_π(p^k) = α_1^k + ... + α_n^k.
  cplx power_sum(unsigned k) const noexcept {
    cplx total = 0.0;
    for (std::size_t j = 0; j < n_; ++j) total += ipow(alphas_[j], k);
    return total;
  }

  static cplx ipow(cplx z, unsigned k) noexcept {
    cplx r = 1.0;
    for (; k; k >>= 1, z *= z) {
      if (k & 1) r *= z;
    }
    return r;
  }

 private:
  std::uint64_t p_ = 0;
  std::size_t n_ = 0;
  std::array<cplx, kMaxDegree> alphas_{};
};

// Dirichlet character given by its values on (Z/q)^*. χ(n) = 0 when
// gcd(n, q) > 1.
class DirichletCharacter {
 public:
  // `values` maps each residue coprime to q to χ(residue). Throws
  // ValidationError naming a violating pair when the table is not a
  // homomorphism into roots of unity.
  DirichletCharacter(std::uint64_t modulus, const std::map<std::uint64_t, cplx>& values)
      : q_(modulus), table_(modulus, cplx{0.0}) {
    if (modulus < 1) throw ValidationError("character modulus must be >= 1");
    constexpr double tol = 1e-12;
    for (std::uint64_t a = 0; a < q_; ++a) {
      if (std::gcd(a, q_) != 1) continue;
      auto it = values.find(a);
      if (it == values.end()) {
        throw ValidationError("character table missing residue " + std::to_string(a) +
                              " mod " + std::to_string(q_));
      }
      if (std::abs(std::abs(it->second) - 1.0) > tol) {
        throw ValidationError("character value at " + std::to_string(a) +
                              " is not a root of unity");
      }
      table_[a] = it->second;
    }
    for (const auto& [a, v] : values) {
      if (a >= q_ || std::gcd(a, q_) != 1) {
        throw ValidationError("character table entry " + std::to_string(a) +
                              " is not a unit residue mod " + std::to_string(q_));
      }
    }
    if (std::abs(table_[1 % q_] - 1.0) > tol) throw ValidationError("χ(1) must equal 1");
    for (std::uint64_t a = 0; a < q_; ++a) {
      if (std::gcd(a, q_) != 1) continue;
      for (std::uint64_t b = a; b < q_; ++b) {
        if (std::gcd(b, q_) != 1) continue;
        if (std::abs(table_[a * b % q_] - table_[a] * table_[b]) > tol) {
          throw ValidationError("character table not multiplicative: χ(" + std::to_string(a) +
                                "·" + std::to_string(b) + ") != χ(" + std::to_string(a) +
                                ")χ(" + std::to_string(b) + ")");
        }
      }
    }
    real_ = std::all_of(table_.begin(), table_.end(),
                        [](cplx v) { return std::abs(v.imag()) < 1e-15; });
    principal_ = true;
    for (std::uint64_t a = 0; a < q_; ++a) {
      if (std::gcd(a, q_) == 1 && std::abs(table_[a] - 1.0) > tol) principal_ = false;
    }
  }

  static DirichletCharacter trivial() { return DirichletCharacter(1, {{0, 1.0}}); }
  static DirichletCharacter chi4() { return DirichletCharacter(4, {{1, 1.0}, {3, -1.0}}); }

  std::uint64_t modulus() const noexcept { return q_; }
  cplx operator()(std::uint64_t n) const noexcept { return table_[n % q_]; }
  bool is_real() const noexcept { return real_; }
  bool is_principal() const noexcept { return principal_; }
  // χ(-1), meaningful for any character; decides the archimedean shift.
  bool is_odd() const noexcept { return q_ > 2 && std::abs(table_[q_ - 1] + 1.0) < 1e-12; }

  DirichletCharacter conjugate() const {
    std::map<std::uint64_t, cplx> values;
    for (std::uint64_t a = 0; a < q_; ++a) {
      if (std::gcd(a, q_) == 1) values[a] = std::conj(table_[a]);
    }
    return DirichletCharacter(q_, values);
  }

 private:
  std::uint64_t q_;
  std::vector<cplx> table_;
  bool real_ = true;
  bool principal_ = true;
};

struct DirichletSource {
  DirichletCharacter chi;

  std::size_t degree() const noexcept { return 1; }
  std::uint64_t cutoff() const noexcept { return UINT64_MAX; }
  bool self_dual() const noexcept { return chi.is_real(); }
  LocalFactor local_factor(std::uint64_t p) const { return LocalFactor(p, {chi(p)}); }
};

// Δ normalized as L(s + 11/2, Δ): α = e^{±iθ_p} with τ(p) = 2 p^{11/2} cos θ_p.
struct DeltaSource {
  std::shared_ptr<const TauTable> tau;

  std::size_t degree() const noexcept { return 2; }
  std::uint64_t cutoff() const noexcept { return tau ? tau->cutoff() : 0; }
  bool self_dual() const noexcept { return true; }

  LocalFactor local_factor(std::uint64_t p) const {
    if (!tau || p > tau->cutoff()) throw CutoffError(p, cutoff());
    const long double t = static_cast<long double>((*tau)(p));
    const long double scale = 2.0L * std::pow(static_cast<long double>(p), 5.5L);
    const long double c = t / scale;
    if (std::fabs(c) > 1.0L) {
      throw ValidationError("Deligne bound violated at p=" + std::to_string(p));
    }
    const long double s = std::sqrt((1.0L - c) * (1.0L + c));
    const auto cr = static_cast<double>(c), si = static_cast<double>(s);
    return LocalFactor(p, {cplx{cr, si}, cplx{cr, -si}});
  }
};

namespace detail {

// a_p by index, filled on first use. Racing writers store the same value.
class TraceMemo {
 public:
  explicit TraceMemo(std::uint64_t cap) : slots_(cap + 1) {
    for (auto& s : slots_) s.store(kUnset, std::memory_order_relaxed);
  }

  std::int64_t get(const EllipticCurve& curve, std::uint64_t p) {
    auto& slot = slots_[p];
    const std::int32_t cached = slot.load(std::memory_order_relaxed);
    if (cached != kUnset) return cached;
    const std::int64_t a = curve.ap(p);
    slot.store(static_cast<std::int32_t>(a), std::memory_order_relaxed);
    return a;
  }

 private:
  static constexpr std::int32_t kUnset = INT32_MIN;
  std::vector<std::atomic<std::int32_t>> slots_;
};

}  // namespace detail

struct EllipticSource {
  std::shared_ptr<const EllipticCurve> curve;
  std::uint64_t cap = 100'000;  // point counting is O(p) per prime
  std::shared_ptr<detail::TraceMemo> memo = std::make_shared<detail::TraceMemo>(cap);

  std::size_t degree() const noexcept { return 2; }
  std::uint64_t cutoff() const noexcept { return cap; }
  bool self_dual() const noexcept { return true; }

  std::int64_t ap(std::uint64_t p) const {
    if (p > cap) throw CutoffError(p, cap);
    return memo->get(*curve, p);
  }

  // Nonsingular F_p points: p + 1 - a_p at good p, p - a_p at bad p.
  std::int64_t np(std::uint64_t p) const {
    const auto pi = static_cast<std::int64_t>(p);
    return curve->is_bad(p) ? pi - ap(p) : pi + 1 - ap(p);
  }

  LocalFactor local_factor(std::uint64_t p) const {
    const auto a = static_cast<double>(ap(p));
    const double root = std::sqrt(static_cast<double>(p));
    if (curve->is_bad(p)) return LocalFactor(p, {cplx{a / root, 0.0}, cplx{0.0, 0.0}});
    const double c = a / (2.0 * root);
    const double s = std::sqrt(std::max(0.0, (1.0 - c) * (1.0 + c)));
    return LocalFactor(p, {cplx{c, s}, cplx{c, -s}});
  }
};

// User-supplied Satake data for every prime up to `cutoff`.
struct CustomSource {
  std::size_t n = 1;
  std::uint64_t max_p = 0;
  std::map<std::uint64_t, LocalFactor> factors;
  bool is_self_dual = false;

  std::size_t degree() const noexcept { return n; }
  std::uint64_t cutoff() const noexcept { return max_p; }
  bool self_dual() const noexcept { return is_self_dual; }

  LocalFactor local_factor(std::uint64_t p) const {
    if (p > max_p) throw CutoffError(p, max_p);
    auto it = factors.find(p);
    if (it == factors.end()) {
      throw ValidationError("custom source has no local factor at p=" + std::to_string(p));
    }
    return it->second;
  }
};

// Type-erased handle over the four families. Cheap to copy; large tables
// are shared.
class CoefficientSource {
 public:
  using Variant = std::variant<DirichletSource, DeltaSource, EllipticSource, CustomSource>;

  CoefficientSource(DirichletSource s) : impl_(std::move(s)) {}
  CoefficientSource(DeltaSource s) : impl_(std::move(s)) {}
  CoefficientSource(EllipticSource s) : impl_(std::move(s)) {}
  CoefficientSource(CustomSource s) : impl_(std::move(s)) {}

  std::size_t degree() const {
    return std::visit([](const auto& s) { return s.degree(); }, impl_);
  }
  std::uint64_t cutoff() const {
    return std::visit([](const auto& s) { return s.cutoff(); }, impl_);
  }
  bool self_dual() const {
    return std::visit([](const auto& s) { return s.self_dual(); }, impl_);
  }
  LocalFactor local_factor(std::uint64_t p) const {
    return std::visit([p](const auto& s) { return s.local_factor(p); }, impl_);
  }

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&impl_);
  }

 private:
  Variant impl_;
};

inline CoefficientSource dirichlet_source(std::uint64_t modulus,
                                          const std::map<std::uint64_t, cplx>& values) {
  return DirichletSource{DirichletCharacter(modulus, values)};
}

inline CoefficientSource delta_source(std::shared_ptr<const TauTable> tau) {
  if (!tau || tau->cutoff() < 2) throw DomainError("Δ source needs a τ table with cutoff >= 2");
  return DeltaSource{std::move(tau)};
}

inline CoefficientSource elliptic_source(const WeierstrassModel& model, std::uint64_t conductor,
                                         std::map<std::uint64_t, int> bad_ap = {},
                                         std::uint64_t cap = 100'000) {
  return EllipticSource{
      std::make_shared<const EllipticCurve>(model, conductor, std::move(bad_ap)), cap};
}

// a_π(p^k). Self-dual sources return a real number; an imaginary part
// above 1e-12 there means corrupted Satake data.
inline cplx a_pk(const CoefficientSource& source, std::uint64_t p, unsigned k) {
  if (k < 1) throw DomainError("a_pk needs k >= 1");
  if (p > source.cutoff()) throw CutoffError(p, source.cutoff());
  const cplx v = source.local_factor(p).power_sum(k);
  if (source.self_dual()) {
    if (std::abs(v.imag()) >= 1e-12) {
      throw ValidationError("self-dual source produced non-real a(p^k) at p=" +
                            std::to_string(p));
    }
    return {v.real(), 0.0};
  }
  return v;
}

// Everything the series and L-value layers need to know about one
// L-function. m, R and mu are supplied, never computed.
struct LFunctionSpec {
  std::string name;
  CoefficientSource source;
  int m = 0;   // order of vanishing at the centre
  int R = 0;   // order of the second-moment L-function at s = 1
  int nu = 0;  // always -R
  std::vector<double> mu;  // archimedean shifts, one per degree
  std::optional<std::uint64_t> conductor;
  std::map<std::uint64_t, LocalFactor> bad_primes;

  std::size_t degree() const { return source.degree(); }

  void validate() const {
    if (nu != -R) {
      throw ValidationError("nu must equal -R (got nu=" + std::to_string(nu) +
                            ", R=" + std::to_string(R) + ")");
    }
    if (m < 0) throw ValidationError("central order m must be >= 0");
    if (!mu.empty() && mu.size() != degree()) {
      throw ValidationError("mu must list one shift per degree");
    }
    if (conductor) {
      for (const auto& [p, f] : bad_primes) {
        if (*conductor % p != 0) {
          throw ValidationError("bad prime " + std::to_string(p) +
                                " does not divide the conductor");
        }
      }
    }
  }

  // Satake data at p, preferring an explicit bad-prime override.
  LocalFactor local_factor(std::uint64_t p) const {
    if (auto it = bad_primes.find(p); it != bad_primes.end()) return it->second;
    return source.local_factor(p);
  }
};

inline LFunctionSpec make_spec(std::string name, CoefficientSource source, int m, int R,
                               std::vector<double> mu = {},
                               std::optional<std::uint64_t> conductor = std::nullopt) {
  LFunctionSpec spec{std::move(name), std::move(source), m, R, -R, std::move(mu), conductor, {}};
  spec.validate();
  return spec;
}

// Ready-made specs for the families with known (m, R).
inline LFunctionSpec chi4_spec() {
  return make_spec("chi4", DirichletSource{DirichletCharacter::chi4()}, 0, -1, {1.0}, 4);
}

inline LFunctionSpec trivial_character_spec() {
  return make_spec("trivial", DirichletSource{DirichletCharacter::trivial()}, 0, -1, {0.0}, 1);
}

inline LFunctionSpec delta_spec(std::shared_ptr<const TauTable> tau) {
  return make_spec("delta", delta_source(std::move(tau)), 0, 1, {}, 1);
}

inline WeierstrassModel curve_11a1() { return {0, -1, 1, -10, -20}; }

inline LFunctionSpec elliptic_spec(std::string name, const WeierstrassModel& model,
                                   std::uint64_t conductor, int rank,
                                   std::map<std::uint64_t, int> bad_ap = {},
                                   std::uint64_t cap = 100'000) {
  return make_spec(std::move(name), elliptic_source(model, conductor, std::move(bad_ap), cap),
                   rank, 1, {}, conductor);
}

}  // namespace centerbias
