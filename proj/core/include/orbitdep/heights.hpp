#pragma once

// Weil heights and local heights on P^N with respect to hypersurface
// divisors, normalized so that on canonical coordinates
//
//   lambda_p(D, P)   = v_p(F(a)) log p
//   lambda_inf(D, P) = d log max|a_i| - log |F(a)|
//
// and the sum over all places equals deg(D) h(P) with no error term.

#include "orbitdep/number.hpp"
#include "orbitdep/polynomial.hpp"
#include "orbitdep/projective.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace orbitdep {

/// Effective divisor D = (F = 0) with F primitive.  A nonprimitive form is
/// divided by its content, which leaves the divisor unchanged.
class Divisor {
 public:
  explicit Divisor(HomogeneousForm form);
  /// D = (X_{i_1} ... X_{i_k} = 0) on P^N.
  static Divisor coordinate_product(std::size_t dimension, std::span<const std::size_t> indices);

  std::size_t dimension() const { return form_.num_vars() - 1; }
  unsigned degree() const { return form_.degree(); }
  const HomogeneousForm& form() const { return form_; }

  /// True when D is a sum of distinct coordinate hyperplanes.
  bool is_coordinate_subdivisor() const;
  std::vector<std::size_t> coordinate_indices() const;

  Integer evaluate(const ProjectivePoint& p) const;
  bool contains(const ProjectivePoint& p) const { return evaluate(p) == 0; }

 private:
  HomogeneousForm form_;
};

/// Finite set of places of Q; the archimedean place is always a member.
class PlaceSet {
 public:
  PlaceSet() = default;
  explicit PlaceSet(std::span<const Integer> primes);

  void insert(const Integer& prime);
  bool contains(const Place& v) const;
  bool contains_prime(const Integer& p) const { return primes_.count(p) != 0; }
  const std::set<Integer, IntegerLess>& primes() const { return primes_; }
  bool is_subset_of(const PlaceSet& other) const;
  std::string to_string() const;

 private:
  std::set<Integer, IntegerLess> primes_;
};

/// A real number of the form log(arch) + sum_p e_p log p with arch a
/// positive rational and integer e_p, so identities between heights can be
/// checked exactly; total() is only for reporting.
class HeightValue {
 public:
  HeightValue() = default;
  explicit HeightValue(Rational arch_argument, std::map<Integer, long, IntegerLess> finite = {});

  const Rational& arch_argument() const { return arch_; }
  const std::map<Integer, long, IntegerLess>& finite() const { return finite_; }

  double arch() const;
  double finite_nats() const;
  double total() const { return arch() + finite_nats(); }

  HeightValue scaled(long k) const;
  HeightValue operator+(const HeightValue& other) const;

  /// exp of the value as an exact rational.
  Rational exp_value() const;
  bool exactly_equals(const HeightValue& other) const { return exp_value() == other.exp_value(); }

 private:
  Rational arch_ = 1;
  std::map<Integer, long, IntegerLess> finite_;
};

/// h(P) = log max|a_i| on canonical coordinates.
HeightValue weil_height(const ProjectivePoint& p);

/// lambda_v(D, P).  Throws DomainError if F(P) = 0.
double local_height(const Place& v, const Divisor& d, const ProjectivePoint& p);

/// Local heights at every place at once.  `arch_argument` is
/// max|a|^d / |F(a)| and `finite` factors |F(a)|, so that
/// arch_argument * value(finite) == max|a|^d holds exactly.
struct LocalHeightDecomposition {
  Integer form_value;
  Rational arch_argument;
  Factorization finite;

  double arch() const;
  double finite_nats() const;
  double total() const { return arch() + finite_nats(); }
  /// Exact check that the local heights add up to deg(D) h(P).
  bool sums_to_divisor_height(const Divisor& d, const ProjectivePoint& p) const;
};

LocalHeightDecomposition all_local_heights(const Divisor& d, const ProjectivePoint& p,
                                           const FactorOptions& options = {});

/// h(D, P) := deg(D) h(P).
HeightValue divisor_height(const Divisor& d, const ProjectivePoint& p);

struct OutsideSum {
  /// |F(a)| with every prime of S removed; the sum is log of this integer.
  Integer s_free_part;
  double nats = 0.0;
};

/// sum over places v outside S of lambda_v(D, P).
OutsideSum sum_outside_S(const Divisor& d, const PlaceSet& s, const ProjectivePoint& p);

struct QuasiIntegralResult {
  bool quasi_integral = false;
  /// outside_sum - eps * height; negative exactly when quasi-integral.
  double margin = 0.0;
  double outside_sum = 0.0;
  double height = 0.0;
  double ratio = 0.0;
};

/// Tests sum_{v not in S} lambda_v(D, P) < eps h(D, P).  Throws DomainError
/// if P lies on D or h(D, P) = 0.
QuasiIntegralResult quasi_integral_test(const Divisor& d, const PlaceSet& s, const ProjectivePoint& p,
                                        double eps);

}  // namespace orbitdep
