#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "centerbias/error.hpp"

namespace centerbias {

// Largest sieve limit accepted. Beyond this the base-prime table and the
// output sizes stop being practical on a workstation.
inline constexpr std::uint64_t kSieveCeiling = std::uint64_t{1} << 40;

// Odd integers covered by one sieve segment. 2^18 bytes of flags fits a
// typical L2 cache.
inline constexpr std::uint64_t kDefaultSegmentBytes = std::uint64_t{1} << 18;

// Ascending primes in [lo, hi]. Immutable once built.
class PrimeRange {
 public:
  PrimeRange() = default;
  PrimeRange(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint64_t> primes)
      : lo_(lo), hi_(hi), primes_(std::move(primes)) {}

  std::uint64_t lo() const noexcept { return lo_; }
  std::uint64_t hi() const noexcept { return hi_; }
  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  std::size_t size() const noexcept { return primes_.size(); }
  bool empty() const noexcept { return primes_.empty(); }

  auto begin() const noexcept { return primes_.cbegin(); }
  auto end() const noexcept { return primes_.cend(); }
  std::uint64_t operator[](std::size_t i) const { return primes_[i]; }

 private:
  std::uint64_t lo_ = 2;
  std::uint64_t hi_ = 1;
  std::vector<std::uint64_t> primes_;
};

inline std::uint64_t isqrt(std::uint64_t n) noexcept {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline void check_sieve_limit(std::uint64_t limit) {
  if (limit > kSieveCeiling) {
    throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds ceiling 2^40");
  }
}

// Odd-only segmented sieve of Eratosthenes. Construction sieves the base
// primes up to sqrt(limit); after that every query is const and may run
// concurrently from several threads (each call owns its flag buffer).
class SegmentedSieve {
 public:
  explicit SegmentedSieve(std::uint64_t limit, std::uint64_t segment_bytes = kDefaultSegmentBytes)
      : limit_(limit), segment_bytes_(std::max<std::uint64_t>(segment_bytes, 64)) {
    check_sieve_limit(limit);
    const std::uint64_t root = isqrt(limit);
    std::vector<char> composite(root + 1, 0);
    for (std::uint64_t i = 3; i <= root; i += 2) {
      if (composite[i]) continue;
      base_.push_back(i);
      for (std::uint64_t j = i * i; j <= root; j += 2 * i) composite[j] = 1;
    }
  }

  std::uint64_t limit() const noexcept { return limit_; }

  // Calls f(p) for every prime p in [lo, min(hi, limit)], ascending.
  template <typename F>
  void for_each_in(std::uint64_t lo, std::uint64_t hi, F&& f) const {
    hi = std::min(hi, limit_);
    lo = std::max<std::uint64_t>(lo, 2);
    if (lo > hi) return;
    if (lo == 2) {
      f(std::uint64_t{2});
      lo = 3;
    }
    if ((lo & 1) == 0) ++lo;
    if (lo > hi) return;

    std::vector<char> flags(segment_bytes_);
    const std::uint64_t span = 2 * segment_bytes_;
    for (std::uint64_t seg_lo = lo; seg_lo <= hi; seg_lo += span) {
      const std::uint64_t seg_hi = std::min(hi, seg_lo + span - 1);
      const std::uint64_t count = (seg_hi - seg_lo) / 2 + 1;
      std::fill_n(flags.begin(), count, char{1});
      for (const std::uint64_t q : base_) {
        if (q * q > seg_hi) break;
        std::uint64_t start = std::max(q * q, ((seg_lo + q - 1) / q) * q);
        if ((start & 1) == 0) start += q;
        for (std::uint64_t j = (start - seg_lo) / 2; j < count; j += q) flags[j] = 0;
      }
      // 1 is not prime; it can only appear when lo == 1, which was excluded.
      for (std::uint64_t i = 0; i < count; ++i) {
        if (flags[i]) f(seg_lo + 2 * i);
      }
    }
  }

 private:
  std::uint64_t limit_;
  std::uint64_t segment_bytes_;
  std::vector<std::uint64_t> base_;  // odd primes <= sqrt(limit)
};

// All primes in [2, limit]. limit < 2 gives an empty range.
inline PrimeRange sieve_primes(std::uint64_t limit,
                               std::uint64_t segment_bytes = kDefaultSegmentBytes) {
  check_sieve_limit(limit);
  if (limit < 2) return PrimeRange(2, limit, {});
  const SegmentedSieve sieve(limit, segment_bytes);
  std::vector<std::uint64_t> out;
  if (limit > 100) {
    const double l = static_cast<double>(limit);
    out.reserve(static_cast<std::size_t>(1.26 * l / std::log(l)));
  }
  sieve.for_each_in(2, limit, [&](std::uint64_t p) { out.push_back(p); });
  return PrimeRange(2, limit, std::move(out));
}

// Pulls primes up to a limit in consecutive windows (k*chunk, (k+1)*chunk].
// Windows without primes are skipped, so next() only yields non-empty
// ranges. Memory use is one window plus the base primes.
class PrimeStream {
 public:
  PrimeStream(std::uint64_t limit, std::uint64_t chunk)
      : sieve_(limit), limit_(limit), chunk_(chunk) {
    if (chunk == 0) throw DomainError("stream chunk must be >= 1");
  }

  std::optional<PrimeRange> next() {
    while (window_lo_ < limit_) {
      const std::uint64_t lo = window_lo_ + 1;
      const std::uint64_t hi = std::min(limit_, window_lo_ + chunk_);
      window_lo_ = hi;
      std::vector<std::uint64_t> ps;
      sieve_.for_each_in(lo, hi, [&](std::uint64_t p) { ps.push_back(p); });
      if (!ps.empty()) return PrimeRange(std::max<std::uint64_t>(lo, 2), hi, std::move(ps));
    }
    return std::nullopt;
  }

 private:
  SegmentedSieve sieve_;
  std::uint64_t limit_;
  std::uint64_t chunk_;
  std::uint64_t window_lo_ = 0;
};

inline std::vector<PrimeRange> stream_primes(std::uint64_t limit, std::uint64_t chunk) {
  PrimeStream stream(limit, chunk);
  std::vector<PrimeRange> out;
  while (auto r = stream.next()) out.push_back(std::move(*r));
  return out;
}

struct PrimePower {
  std::uint64_t p;
  unsigned k;
  std::uint64_t value;  // p^k

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Every p^k <= x with k >= 1, sorted by p^k.
inline std::vector<PrimePower> prime_powers_up_to(std::uint64_t x) {
  std::vector<PrimePower> out;
  if (x < 2) return out;
  for (const std::uint64_t p : sieve_primes(x)) {
    std::uint64_t v = p;
    for (unsigned k = 1;; ++k) {
      out.push_back({p, k, v});
      if (v > x / p) break;
      v *= p;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.value < b.value; });
  return out;
}

// Splits [1, limit] into windows of fixed width and calls
// fn(index, lo, hi) once per window, possibly from several threads at once.
// Window boundaries depend only on `width`, never on `threads`, so any
// per-window result folded in index order is thread-count independent.
template <typename BlockFn>
void for_each_block(std::uint64_t limit, std::uint64_t width, unsigned threads, BlockFn&& fn) {
  if (limit < 1 || width == 0) return;
  const std::uint64_t blocks = (limit + width - 1) / width;
  auto run = [&](std::uint64_t b) {
    const std::uint64_t lo = b * width + 1;
    const std::uint64_t hi = std::min(limit, lo + width - 1);
    fn(static_cast<std::size_t>(b), lo, hi);
  };
  threads = std::max(1u, threads);
  if (threads == 1 || blocks == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        try {
          run(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = blocks;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace centerbias
