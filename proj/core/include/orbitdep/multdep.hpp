#pragma once

// Multiplicative dependence Q1^r = u * Q2^s with u in a finitely generated
// subgroup Gamma of the torus, decided on the integer lattice of exponent
// relations.

#include "orbitdep/lattice.hpp"
#include "orbitdep/projective.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace orbitdep {

/// Subgroup of G_m^N(Q) generated by finitely many torus points.
class GroupGamma {
 public:
  explicit GroupGamma(std::size_t dimension, std::vector<TorusPoint> generators = {});
  static GroupGamma trivial(std::size_t dimension) { return GroupGamma(dimension); }

  std::size_t dimension() const { return dimension_; }
  std::size_t rank() const { return generators_.size(); }
  const std::vector<TorusPoint>& generators() const { return generators_; }

  /// prod_j g_j^{e_j}
  TorusPoint element(const IntVector& exponents) const;
  /// Primes dividing a numerator or denominator of some generator coordinate.
  std::vector<Integer> support_primes() const;

 private:
  std::size_t dimension_;
  std::vector<TorusPoint> generators_;
};

/// Prime-exponent encoding of a torus point.  Coordinate indices are
/// 1-based, matching (a_1, ..., a_N).
struct ExponentVector {
  std::vector<bool> signs;  // true where the coordinate is negative
  std::map<std::pair<std::size_t, Integer>, long, std::less<>> exponents;

  friend bool operator==(const ExponentVector& a, const ExponentVector& b) {
    return a.signs == b.signs && a.exponents == b.exponents;
  }
};

ExponentVector encode(const TorusPoint& t, const FactorOptions& options = {});
TorusPoint decode(const ExponentVector& v);

/// Pairwise coprime integers > 1 such that every input is, up to sign, a
/// product of their powers.  Zero entries are rejected.
std::vector<Integer> coprime_base(const std::vector<Integer>& values);

/// Basis of {x in Z^m : prod_j w_j^{x_j} = 1} (signs included), LLL-reduced.
std::vector<IntVector> relation_lattice(const std::vector<TorusPoint>& w);

struct DependenceRelation {
  Integer r;
  Integer s;
  IntVector gamma_exponents;
  TorusPoint u;
};

enum class DependenceStatus { found, none, none_within_bound };
std::string to_string(DependenceStatus status);

struct DependenceConstraint {
  /// |s / r| <= ratio_bound
  std::optional<Rational> ratio_bound;
  std::optional<Integer> max_abs_r;
  std::optional<Integer> max_abs_s;
  /// Only witnesses with every |e_j| <= max_abs_e are admissible.
  std::optional<Integer> max_abs_e;
  /// Candidate (r, s) pairs examined before giving up with none_within_bound.
  std::uint64_t search_limit = 2'000'000;
};

struct DependenceResult {
  DependenceStatus status = DependenceStatus::none;
  std::optional<DependenceRelation> relation;
  /// Basis of the sign-admissible relation lattice in (r, s, e) coordinates.
  std::vector<IntVector> lattice;
  /// Rank of the projection of the lattice to the (r, s) plane.
  std::size_t image_rank = 0;
};

/// Minimal witness ordering: |r|+|s|, then |r|, then sum |e_j|, then e
/// lexicographically, then positive s first; r > 0.  The witness is primitive in the
/// relation lattice.
DependenceResult solve_dependence(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                                  const DependenceConstraint& constraint = {});

/// Key used to order witnesses; exposed so oracles can share it.
bool witness_less(const DependenceRelation& a, const DependenceRelation& b);

bool verify_relation(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                     const DependenceRelation& rel);

/// Exponents e with t = prod g_j^{e_j} (minimal sum |e_j|), if t is in Gamma.
std::optional<IntVector> gamma_membership(const TorusPoint& t, const GroupGamma& gamma);

/// Hash table of all prod g_j^{e_j} with |e_j| <= max_exp.
class GammaTable {
 public:
  GammaTable(const GroupGamma& gamma, long max_exp);
  /// All exponent vectors in range representing t, in (sum |e|, lex) order.
  std::vector<std::vector<long>> lookup(const TorusPoint& t) const;
  long max_exp() const { return max_exp_; }

 private:
  long max_exp_;
  std::unordered_multimap<std::size_t, std::pair<TorusPoint, std::vector<long>>> table_;
};

struct BruteForceOptions {
  long max_exp = 6;           // bound on |r| and |s|
  long gamma_max_exp = -1;    // bound on |e_j|; negative means max_exp
  std::optional<Rational> ratio_bound;
};

/// Exhaustive search over 0 < r <= max_exp, 0 < |s| <= max_exp and the
/// Gamma exponent box, verified exactly.
std::optional<DependenceRelation> brute_force_dependence(const TorusPoint& q1, const TorusPoint& q2,
                                                         const GroupGamma& gamma,
                                                         const BruteForceOptions& options = {});
std::optional<DependenceRelation> brute_force_dependence(const TorusPoint& q1, const TorusPoint& q2,
                                                         const GroupGamma& gamma, const GammaTable& table,
                                                         const BruteForceOptions& options);

/// Componentwise relation Q1^{r_vec} = u * Q2^{s_vec}.
struct VectorRelation {
  IntVector r;
  IntVector s;
  IntVector gamma_exponents;
  TorusPoint u;
};

struct VectorConstraint {
  long bound = 10;  // max |r_i|, |s_i| searched
  /// Ratio filter: max over listed torus indices i (1-based) of
  /// |s_i / r_i| <= ratio_bound.
  std::optional<Rational> ratio_bound;
  std::vector<std::size_t> divisor_indices;
  std::uint64_t node_limit = 5'000'000;
};

struct VectorDependenceResult {
  DependenceStatus status = DependenceStatus::none;
  std::optional<VectorRelation> relation;
};

VectorDependenceResult solve_vector_dependence(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                                               const VectorConstraint& constraint = {});

bool verify_vector_relation(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                            const VectorRelation& rel);

}  // namespace orbitdep
