#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "centerbias/error.hpp"
#include "centerbias/tau.hpp"

namespace centerbias {

// Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
// Minimality is the caller's responsibility.
struct WeierstrassModel {
  std::int64_t a1 = 0;
  std::int64_t a2 = 0;
  std::int64_t a3 = 0;
  std::int64_t a4 = 0;
  std::int64_t a6 = 0;

  int128 b2() const { return int128{a1} * a1 + 4 * int128{a2}; }
  int128 b4() const { return 2 * int128{a4} + int128{a1} * a3; }
  int128 b6() const { return int128{a3} * a3 + 4 * int128{a6}; }
  int128 b8() const {
    return int128{a1} * a1 * a6 + 4 * int128{a2} * a6 - int128{a1} * a3 * a4 +
           int128{a2} * a3 * a3 - int128{a4} * a4;
  }
  int128 c4() const { return b2() * b2() - 24 * b4(); }
  int128 c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
  int128 discriminant() const {
    const int128 B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
  }
};

namespace detail {

inline std::uint64_t mod_reduce(int128 v, std::uint64_t p) {
  const int128 r = v % static_cast<int128>(p);
  return static_cast<std::uint64_t>(r < 0 ? r + p : r);
}

// Legendre symbol (a/p) for odd prime p by Euler's criterion.
inline int legendre(int128 a, std::uint64_t p) {
  const std::uint64_t r = mod_reduce(a, p);
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

}  // namespace detail

// #E(F_p), projective points including the point at infinity, by direct
// enumeration of (x, y). O(p^2); used for p = 2 and as a test oracle.
inline std::int64_t count_points_naive(const WeierstrassModel& e, std::uint64_t p) {
  const auto a1 = detail::mod_reduce(e.a1, p), a2 = detail::mod_reduce(e.a2, p),
             a3 = detail::mod_reduce(e.a3, p), a4 = detail::mod_reduce(e.a4, p),
             a6 = detail::mod_reduce(e.a6, p);
  std::int64_t count = 1;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t rhs = ((((x + a2) % p) * x % p + a4) % p * x % p + a6) % p;
    for (std::uint64_t y = 0; y < p; ++y) {
      const std::uint64_t lhs = (y * y % p + a1 * x % p * y % p + a3 * y % p) % p;
      if (lhs == rhs) ++count;
    }
  }
  return count;
}

// p + 1 - #E(F_p) for an odd prime p of good reduction. Completing the square
// turns the count into -Σ_x ((4x^3 + b2 x^2 + 2 b4 x + b6) / p), evaluated
// against a table of squares mod p, so the cost is O(p) time and memory.
// The cubic is stepped through x = 0..p-1 by forward differences, which keeps
// the inner loop free of divisions.
inline std::int64_t trace_of_frobenius(const WeierstrassModel& e, std::uint64_t p) {
  if (p == 2) return 3 - count_points_naive(e, 2);
  std::vector<char> is_square(p, 0);
  for (std::uint64_t y = 1, sq = 1; y <= (p - 1) / 2; ++y) {
    is_square[sq] = 1;
    sq += 2 * y + 1;  // (y+1)^2 = y^2 + 2y + 1
    while (sq >= p) sq -= p;
  }
  const auto md = [p](int128 v) { return detail::mod_reduce(v, p); };
  // f(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 and its differences at x = 0
  std::uint64_t f = md(e.b6());
  std::uint64_t d1 = md(4 + e.b2() + 2 * e.b4());
  std::uint64_t d2 = md(24 + 2 * e.b2());
  const std::uint64_t d3 = md(24);
  auto add = [p](std::uint64_t a, std::uint64_t b) {
    const std::uint64_t r = a + b;
    return r >= p ? r - p : r;
  };
  std::int64_t sum = 0;
  for (std::uint64_t x = 0; x < p; ++x) {
    if (f != 0) sum += is_square[f] ? 1 : -1;
    f = add(f, d1);
    d1 = add(d1, d2);
    d2 = add(d2, d3);
  }
  return -sum;
}

// Coefficient data for L(E, s) normalized to the centre s = 1/2:
// good p carry e^{±iθ_p} with a_p = 2√p cos θ_p, bad p carry a_p/√p.
class EllipticCurve {
 public:
  // Bad-prime traces for p in {2, 3} cannot be decided by the implemented
  // rules and must come in `bad_ap`; larger bad primes may be overridden too.
  EllipticCurve(WeierstrassModel model, std::uint64_t conductor,
                std::map<std::uint64_t, int> bad_ap = {})
      : model_(model), conductor_(conductor) {
    if (conductor < 1) throw ValidationError("elliptic conductor must be >= 1");
    if (model.discriminant() == 0) throw ValidationError("singular Weierstrass model");
    std::uint64_t n = conductor;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
      if (n % p) continue;
      bad_primes_.push_back(p);
      while (n % p == 0) n /= p;
    }
    if (n > 1) bad_primes_.push_back(n);
    for (const auto& [p, ap] : bad_ap) {
      if (!is_bad(p)) {
        throw ValidationError("bad_ap given for p=" + std::to_string(p) +
                              " which does not divide the conductor");
      }
      if (ap < -1 || ap > 1) throw ValidationError("bad-prime a_p must be in {-1, 0, 1}");
    }
    for (const std::uint64_t p : bad_primes_) {
      if (detail::mod_reduce(model.discriminant(), p) != 0) {
        throw ValidationError("conductor prime " + std::to_string(p) +
                              " does not divide the discriminant");
      }
      if (auto it = bad_ap.find(p); it != bad_ap.end()) {
        bad_ap_[p] = it->second;
      } else if (p == 2 || p == 3) {
        throw ValidationError("a_p at bad prime " + std::to_string(p) +
                              " must be supplied in configuration");
      } else if (detail::mod_reduce(model.c4(), p) != 0) {
        bad_ap_[p] = detail::legendre(-model.c6(), p);  // multiplicative: split or not
      } else {
        bad_ap_[p] = 0;  // additive
      }
    }
  }

  const WeierstrassModel& model() const noexcept { return model_; }
  std::uint64_t conductor() const noexcept { return conductor_; }
  const std::vector<std::uint64_t>& bad_primes() const noexcept { return bad_primes_; }
  bool is_bad(std::uint64_t p) const noexcept { return conductor_ % p == 0; }

  // Integer trace a_p, with a_p = p - N_p at bad primes.
  std::int64_t ap(std::uint64_t p) const {
    if (is_bad(p)) return bad_ap_.at(p);
    if (detail::mod_reduce(model_.discriminant(), p) == 0) {
      throw ValidationError("model has bad reduction at p=" + std::to_string(p) +
                            " which does not divide the conductor");
    }
    const std::int64_t a = trace_of_frobenius(model_, p);
    if (static_cast<uint128>(a * a) > 4 * static_cast<uint128>(p)) {
      throw ValidationError("Hasse bound violated at p=" + std::to_string(p));
    }
    return a;
  }

  // N_p: nonsingular F_p points.
  std::int64_t np(std::uint64_t p) const {
    const auto a = ap(p);
    return is_bad(p) ? static_cast<std::int64_t>(p) - a : static_cast<std::int64_t>(p) + 1 - a;
  }

 private:
  WeierstrassModel model_;
  std::uint64_t conductor_;
  std::vector<std::uint64_t> bad_primes_;
  std::map<std::uint64_t, int> bad_ap_;
};

}  // namespace centerbias
