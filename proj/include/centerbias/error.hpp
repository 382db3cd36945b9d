#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace centerbias {

// Base for every error raised by the library. Callers that only need to
// report a failure can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request exceeds a hard size limit (sieve ceiling, τ table width).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Input data violates a structural requirement (non-multiplicative
// character table, inconsistent configuration, bad curve model).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A coefficient was requested beyond the range a source was built for.
class CutoffError : public Error {
 public:
  CutoffError(std::uint64_t p, std::uint64_t cutoff)
      : Error("coefficient requested at p=" + std::to_string(p) +
              " beyond source cutoff " + std::to_string(cutoff)),
        prime_(p),
        cutoff_(cutoff) {}

  std::uint64_t prime() const noexcept { return prime_; }
  std::uint64_t cutoff() const noexcept { return cutoff_; }

 private:
  std::uint64_t prime_;
  std::uint64_t cutoff_;
};

// A local Euler factor vanishes at the evaluation point.
class SingularFactorError : public Error {
 public:
  explicit SingularFactorError(std::uint64_t p)
      : Error("local factor at p=" + std::to_string(p) +
              " vanishes at the evaluation point"),
        prime_(p) {}

  std::uint64_t prime() const noexcept { return prime_; }

 private:
  std::uint64_t prime_;
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested feature is deliberately not implemented (m >= 2 derivatives,
// explicit formula for non-Dirichlet families).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A zero table does not reach the requested height.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Least-squares system has no unique solution.
class SingularFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace centerbias
