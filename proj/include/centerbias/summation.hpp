#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace centerbias {

// Neumaier's variant of Kahan summation. The running error term is kept
// separately and only folded in by value(), so the result depends on the
// order of add() calls and nothing else.
template <typename T>
class CompensatedSum;

template <>
class CompensatedSum<double> {
 public:
  constexpr CompensatedSum() = default;

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  // Folds another partial sum in. Merging is itself an ordered operation:
  // merge(a) then merge(b) differs in the last bits from the reverse.
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <>
class CompensatedSum<std::complex<double>> {
 public:
  constexpr CompensatedSum() = default;

  void add(std::complex<double> z) noexcept {
    re_.add(z.real());
    im_.add(z.imag());
  }

  void merge(const CompensatedSum& other) noexcept {
    re_.merge(other.re_);
    im_.merge(other.im_);
  }

  std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_;
  CompensatedSum<double> im_;
};

}  // namespace centerbias
