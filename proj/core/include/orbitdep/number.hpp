#pragma once

// Exact integer/rational arithmetic over Q: factorization, places,
// valuations and normalized logarithmic absolute values.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace orbitdep {

using Integer = mpz_class;
using Rational = mpq_class;

/// Raised when an operation is applied outside its mathematical domain
/// (zero valuation argument, all-zero projective coordinates, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a configured computational budget (digit cap, rho
/// iterations, orbit size) is exceeded before an answer is known.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegerLess {
  bool operator()(const Integer& a, const Integer& b) const { return cmp(a, b) < 0; }
};

inline int cmpabs(const Integer& a, const Integer& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

struct IntegerHash {
  std::size_t operator()(const Integer& v) const noexcept;
};

Rational make_rational(const Integer& num, const Integer& den);
Rational parse_rational(std::string_view text);
std::string to_string(const Integer& n);
std::string to_string(const Rational& q);

/// Natural log of |n| for n != 0, accurate for integers of any size.
double log_magnitude(const Integer& n);
double log_magnitude(const Rational& q);
/// log(a/b) for positive a, b; returns exactly 0.0 when a == b.
double log_ratio(const Integer& a, const Integer& b);

std::size_t decimal_digits(const Integer& n);

/// A place of Q: the archimedean absolute value or a p-adic one.
class Place {
 public:
  static Place archimedean() { return Place(); }
  /// Throws DomainError unless p is prime.
  static Place finite(const Integer& p);

  bool is_archimedean() const { return archimedean_; }
  const Integer& prime() const;
  std::string to_string() const;

  friend bool operator==(const Place& a, const Place& b) {
    return a.archimedean_ == b.archimedean_ && (a.archimedean_ || a.prime_ == b.prime_);
  }
  // The archimedean place sorts first, then primes ascending.
  friend bool operator<(const Place& a, const Place& b) {
    if (a.archimedean_ != b.archimedean_) return a.archimedean_;
    return !a.archimedean_ && a.prime_ < b.prime_;
  }

 private:
  Place() = default;
  bool archimedean_ = true;
  Integer prime_ = 0;
};

struct PrimePower {
  Integer prime;
  long exponent = 0;

  friend bool operator==(const PrimePower& a, const PrimePower& b) {
    return a.prime == b.prime && a.exponent == b.exponent;
  }
};

struct Factorization {
  int sign = 1;
  std::vector<PrimePower> factors;  // primes strictly increasing

  Integer value() const;
};

struct FactorOptions {
  unsigned long trial_bound = 1'000'000;
  std::size_t digit_cap = 5000;
  /// Pollard-Brent iterations allowed per composite cofactor.
  std::uint64_t rho_iterations = 50'000'000;
};

bool is_prime(const Integer& n);

/// Complete factorization of a nonzero integer.  Throws DomainError for 0
/// and BudgetError when the digit cap or rho budget is exceeded.
Factorization factor(const Integer& n, const FactorOptions& options = {});

/// p-adic valuation of a nonzero integer / rational.
long valuation(const Integer& p, const Integer& n);
long valuation(const Integer& p, const Rational& q);

/// Removes every factor p from n (in place) and returns the multiplicity.
long remove_factor(Integer& n, const Integer& p);

/// log |q|_v with |p|_p = 1/p.  Throws DomainError for q == 0.
double log_abs(const Place& v, const Rational& q);

/// Primes up to `bound`, computed once per bound and cached.
const std::vector<unsigned long>& small_primes(unsigned long bound);

}  // namespace orbitdep
