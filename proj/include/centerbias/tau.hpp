#pragma once

// Ramanujan's τ(n) for n <= N from Δ = q ∏(1 - q^n)^24.
//
// The 24th power of the pentagonal series P = ∏(1 - q^n) is expanded with
// the power-series power recurrence
//
//   n f_n = Σ_{k=1..n} ((α + 1) k - n) p_k f_{n-k},    f = P^α, f_0 = 1,
//
// which only touches the O(sqrt N) nonzero pentagonal coefficients p_k. The
// recurrence is run modulo two 62-bit primes and the results are lifted to
// signed 128-bit integers by CRT. The modulus product exceeds 2^123, which
// bounds |τ(n)| <= d(n) n^{11/2} with room to spare for n <= 2^20.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "centerbias/error.hpp"

namespace centerbias {

using int128 = __int128;
using uint128 = unsigned __int128;

inline constexpr std::uint64_t kTauMaxCutoff = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kTauDefaultCutoff = 1'000'000;

// τ(1..N) as exact integers; τ(0) is stored as 0 and never exposed.
class TauTable {
 public:
  TauTable() = default;
  explicit TauTable(std::vector<int128> values_from_one) : values_(1, 0) {
    values_.insert(values_.end(), values_from_one.begin(), values_from_one.end());
  }

  std::uint64_t cutoff() const noexcept { return values_.empty() ? 0 : values_.size() - 1; }

  int128 operator()(std::uint64_t n) const {
    if (n == 0 || n > cutoff()) throw CutoffError(n, cutoff());
    return values_[n];
  }

 private:
  std::vector<int128> values_;
};

namespace detail {

inline constexpr std::array<std::uint64_t, 2> kTauModuli = {
    4611686018427387847ULL,  // 2^62 - 57
    4611686018427387817ULL,  // 2^62 - 87
};

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<uint128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  for (a %= m; e; e >>= 1, a = mulmod(a, a, m)) {
    if (e & 1) r = mulmod(r, a, m);
  }
  return r;
}

// Nonzero coefficients of ∏(1 - q^n) up to degree n_max, ascending in degree.
struct SparseTerm {
  std::uint64_t degree;
  int sign;
};

inline std::vector<SparseTerm> pentagonal_terms(std::uint64_t n_max) {
  std::vector<SparseTerm> terms;
  for (std::uint64_t j = 1;; ++j) {
    const std::uint64_t g1 = j * (3 * j - 1) / 2;
    const std::uint64_t g2 = j * (3 * j + 1) / 2;
    if (g1 > n_max) break;
    const int sign = (j & 1) ? -1 : 1;
    terms.push_back({g1, sign});
    if (g2 <= n_max) terms.push_back({g2, sign});
  }
  return terms;  // already ascending: g1(j) < g2(j) < g1(j+1)
}

// Coefficients of P^24 modulo m, degrees 0..n_max.
inline std::vector<std::uint64_t> eta24_mod(std::uint64_t n_max, std::uint64_t m) {
  constexpr std::uint64_t kPower = 24;
  const auto terms = pentagonal_terms(n_max);
  std::vector<std::uint64_t> inv(n_max + 1, 1);
  for (std::uint64_t i = 2; i <= n_max; ++i) {
    inv[i] = m - mulmod(m / i, inv[m % i], m);
  }
  std::vector<std::uint64_t> f(n_max + 1, 0);
  f[0] = 1;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    // |coefficient| < 25 n < 2^25 and f < 2^62, so each product is below
    // 2^87 and a few thousand of them stay far below 2^128.
    uint128 pos = 0;
    uint128 neg = 0;
    for (const auto& t : terms) {
      if (t.degree > n) break;
      const auto a = static_cast<std::int64_t>((kPower + 1) * t.degree) -
                     static_cast<std::int64_t>(n);
      const std::int64_t c = a * t.sign;
      const uint128 prod = static_cast<uint128>(c < 0 ? -c : c) * f[n - t.degree];
      (c < 0 ? neg : pos) += prod;
    }
    const std::uint64_t pm = static_cast<std::uint64_t>(pos % m);
    const std::uint64_t nm = static_cast<std::uint64_t>(neg % m);
    const std::uint64_t diff = pm >= nm ? pm - nm : pm + (m - nm);
    f[n] = mulmod(diff, inv[n], m);
  }
  return f;
}

inline int128 crt_signed(std::uint64_t r1, std::uint64_t r2) {
  constexpr std::uint64_t m1 = kTauModuli[0];
  constexpr std::uint64_t m2 = kTauModuli[1];
  static const std::uint64_t m1_inv = powmod(m1 % m2, m2 - 2, m2);
  const std::uint64_t d = r2 >= r1 % m2 ? r2 - r1 % m2 : r2 + (m2 - r1 % m2);
  const std::uint64_t t = mulmod(d, m1_inv, m2);
  const uint128 x = static_cast<uint128>(t) * m1 + r1;
  const uint128 modulus = static_cast<uint128>(m1) * m2;
  if (x > modulus / 2) return -static_cast<int128>(modulus - x);
  return static_cast<int128>(x);
}

}  // namespace detail

// Builds τ(1..cutoff). The two modular channels run on separate threads
// when threads >= 2; the result does not depend on the thread count.
inline TauTable build_tau_table(std::uint64_t cutoff, unsigned threads = 2) {
  if (cutoff < 1) throw DomainError("τ cutoff must be >= 1");
  if (cutoff > kTauMaxCutoff) {
    throw CapacityError("τ cutoff " + std::to_string(cutoff) + " exceeds 2^20");
  }
  const std::uint64_t n_max = cutoff - 1;  // τ(n) is the q^{n-1} coefficient of P^24
  std::vector<std::uint64_t> r1;
  std::vector<std::uint64_t> r2;
  if (threads >= 2) {
    std::thread worker([&] { r2 = detail::eta24_mod(n_max, detail::kTauModuli[1]); });
    r1 = detail::eta24_mod(n_max, detail::kTauModuli[0]);
    worker.join();
  } else {
    r1 = detail::eta24_mod(n_max, detail::kTauModuli[0]);
    r2 = detail::eta24_mod(n_max, detail::kTauModuli[1]);
  }
  std::vector<int128> values(cutoff);
  for (std::uint64_t i = 0; i < cutoff; ++i) values[i] = detail::crt_signed(r1[i], r2[i]);
  return TauTable(std::move(values));
}

// Cache layout, all little-endian:
//   "TAUv1" | cutoff (u64) | τ(1) .. τ(N) (two's-complement i128 each)
inline constexpr char kTauMagic[5] = {'T', 'A', 'U', 'v', '1'};

namespace detail {

inline void put_le(std::ostream& out, uint128 v, int bytes) {
  char buf[16];
  for (int i = 0; i < bytes; ++i) {
    buf[i] = static_cast<char>(static_cast<unsigned char>(v & 0xff));
    v >>= 8;
  }
  out.write(buf, bytes);
}

inline uint128 get_le(const unsigned char* p, int bytes) {
  uint128 v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace detail

inline void write_tau_cache(const std::filesystem::path& path, const TauTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open τ cache for writing: " + path.string());
  out.write(kTauMagic, sizeof kTauMagic);
  detail::put_le(out, table.cutoff(), 8);
  for (std::uint64_t n = 1; n <= table.cutoff(); ++n) {
    detail::put_le(out, static_cast<uint128>(table(n)), 16);
  }
  if (!out) throw Error("failed writing τ cache: " + path.string());
}

inline TauTable read_tau_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open τ cache: " + path.string());
  char magic[5];
  unsigned char word[16];
  if (!in.read(magic, 5) || std::memcmp(magic, kTauMagic, 5) != 0) {
    throw ValidationError("not a TAUv1 cache: " + path.string());
  }
  if (!in.read(reinterpret_cast<char*>(word), 8)) {
    throw ValidationError("truncated τ cache header: " + path.string());
  }
  const auto cutoff = static_cast<std::uint64_t>(detail::get_le(word, 8));
  if (cutoff > kTauMaxCutoff) throw CapacityError("τ cache cutoff too large");
  std::vector<int128> values(cutoff);
  for (auto& v : values) {
    if (!in.read(reinterpret_cast<char*>(word), 16)) {
      throw ValidationError("truncated τ cache body: " + path.string());
    }
    v = static_cast<int128>(detail::get_le(word, 16));
  }
  return TauTable(std::move(values));
}

// Loads the cache when it covers `cutoff`, otherwise builds the table and
// rewrites the cache at `path`.
inline std::shared_ptr<const TauTable> load_or_build_tau(const std::filesystem::path& path,
                                                         std::uint64_t cutoff,
                                                         unsigned threads = 2) {
  if (std::filesystem::exists(path)) {
    auto cached = read_tau_cache(path);
    if (cached.cutoff() >= cutoff) return std::make_shared<const TauTable>(std::move(cached));
  }
  auto table = build_tau_table(cutoff, threads);
  write_tau_cache(path, table);
  return std::make_shared<const TauTable>(std::move(table));
}

}  // namespace centerbias
