#pragma once

// Sparse homogeneous integer polynomials in X_0, ..., X_N.

#include "orbitdep/number.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace orbitdep {

struct Monomial {
  std::vector<unsigned> exps;
  Integer coef;

  unsigned degree() const;
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps == b.exps && a.coef == b.coef; }
};

class HomogeneousForm {
 public:
  /// Like terms are merged and zero terms dropped.  Throws DomainError if
  /// the monomials do not share a total degree or have the wrong arity.
  /// `degree` fixes the degree of the zero form and is checked otherwise.
  HomogeneousForm(std::size_t num_vars, std::vector<Monomial> monomials,
                  std::optional<unsigned> degree = std::nullopt);

  static HomogeneousForm variable(std::size_t num_vars, std::size_t index);
  static HomogeneousForm monomial(std::vector<unsigned> exps, Integer coef = 1);
  static HomogeneousForm linear(std::span<const Integer> coefs);

  std::size_t num_vars() const { return num_vars_; }
  unsigned degree() const { return degree_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  bool is_zero() const { return monomials_.empty(); }

  Integer evaluate(std::span<const Integer> point) const;
  /// Evaluation with coordinates and coefficients reduced modulo p.
  std::uint64_t evaluate_mod(std::span<const std::uint64_t> point, std::uint64_t p) const;

  Integer content() const;
  Integer max_abs_coef() const;

  HomogeneousForm operator*(const HomogeneousForm& other) const;
  /// Coefficients of X_0^{d-k} X_1^k for k = 0..d; binary forms only.
  std::vector<Integer> binary_coefficients() const;

  std::string to_string() const;

  friend bool operator==(const HomogeneousForm& a, const HomogeneousForm& b) {
    return a.num_vars_ == b.num_vars_ && a.degree_ == b.degree_ && a.monomials_ == b.monomials_;
  }

 private:
  std::size_t num_vars_;
  unsigned degree_ = 0;
  std::vector<Monomial> monomials_;  // sorted by exponent tuple, descending
};

/// Resultant of two binary forms via the Sylvester determinant; zero iff the
/// forms share a zero on P^1 over an algebraic closure.
Integer binary_resultant(const HomogeneousForm& f, const HomogeneousForm& g);

/// Determinant by fraction-free (Bareiss) elimination.
Integer determinant(std::vector<std::vector<Integer>> m);

}  // namespace orbitdep
