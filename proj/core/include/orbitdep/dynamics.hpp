#pragma once

// Endomorphisms of P^N, semigroup words, orbit enumeration and
// degree-normalized (canonical) height estimates.

#include "orbitdep/heights.hpp"
#include "orbitdep/polynomial.hpp"
#include "orbitdep/projective.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orbitdep {

/// Raised when every coordinate form vanishes at the point being mapped.
class IndeterminacyError : public DomainError {
 public:
  IndeterminacyError(const std::string& what, std::size_t stage) : DomainError(what), stage_(stage) {}
  /// Number of letters applied successfully before the failure.
  std::size_t stage() const { return stage_; }

 private:
  std::size_t stage_;
};

/// [F_0 : ... : F_N] with homogeneous integer forms of a common degree >= 2.
class Endomorphism {
 public:
  explicit Endomorphism(std::vector<HomogeneousForm> forms, std::string label = {});

  std::size_t dimension() const { return forms_.size() - 1; }
  unsigned degree() const { return degree_; }
  const std::vector<HomogeneousForm>& forms() const { return forms_; }
  const std::string& label() const { return label_; }

  /// log(max_i #monomials(F_i) * max |coefficient|): h(phi(Q)) never
  /// exceeds d h(Q) plus this.
  double height_growth_constant() const;

  friend bool operator==(const Endomorphism& a, const Endomorphism& b) { return a.forms_ == b.forms_; }

 private:
  std::vector<HomogeneousForm> forms_;
  unsigned degree_;
  std::string label_;
};

using GeneratorList = std::vector<Endomorphism>;

/// normalize(F_0(a), ..., F_N(a)); throws IndeterminacyError at base points.
ProjectivePoint evaluate(const Endomorphism& phi, const ProjectivePoint& p);

struct MorphismCheck {
  /// Exact certificate: nonzero resultant (N = 1 only).
  bool verified = false;
  std::optional<Integer> resultant;
  /// Small primes p for which the forms share a zero over F_p.
  std::vector<unsigned> primes_with_common_zero;
  /// Common zeros modulo every tested prime; a rational base point would
  /// produce exactly this pattern.
  bool likely_non_morphism = false;
};

/// Resultant test for N = 1; exhaustive F_p search (p <= 17) for N <= 3.
MorphismCheck check_morphism(const Endomorphism& phi);

/// A semigroup element phi_{i_m} o ... o phi_{i_1}.  Letters are stored in
/// written order, so letters().back() is applied first.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::size_t> letters) : letters_(std::move(letters)) {}

  static Word identity() { return Word(); }

  const std::vector<std::size_t>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }

  /// phi_g o this
  Word then(std::size_t g) const;
  /// this o inner
  Word compose(const Word& inner) const;

  /// Product of generator degrees; identity has degree 1.  Throws
  /// BudgetError on 64-bit overflow.
  std::uint64_t degree(const GeneratorList& gens) const;
  void validate(const GeneratorList& gens) const;

  std::string to_string(const GeneratorList& gens) const;

  friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }
  friend bool operator<(const Word& a, const Word& b) {
    if (a.letters_.size() != b.letters_.size()) return a.letters_.size() < b.letters_.size();
    return a.letters_ < b.letters_;
  }

 private:
  std::vector<std::size_t> letters_;
};

/// Applies the letters right to left, pointwise.
ProjectivePoint evaluate_word(const Word& w, const GeneratorList& gens, const ProjectivePoint& p);

struct OrbitBudget {
  /// Words of larger degree are outside the scan (not an exhaustion).
  std::uint64_t max_degree = 64;
  double max_height_nats = std::numeric_limits<double>::infinity();
  std::size_t max_points = 100'000;
  std::size_t max_digits = 5000;
  std::size_t max_words = 1'000'000;
};

struct OrbitRecord {
  Word word;                 // first word reaching the point
  std::vector<Word> words;   // every word reaching it, discovery order
  ProjectivePoint point;
  HeightValue height;
  std::ptrdiff_t parent = -1;  // record index of the point word.tail() reached
  std::uint64_t degree = 1;    // degree of `word`
};

struct Orbit {
  std::vector<OrbitRecord> records;
  /// (record index, word) for every word, in breadth-first order.
  std::vector<std::pair<std::size_t, Word>> word_stream;
  bool budget_exhausted = false;
  std::vector<std::string> warnings;
};

/// Breadth-first orbit: level by word length, generator index ascending
/// within a level.  Deterministic for a fixed input.
Orbit orbit_enumerate(const GeneratorList& gens, const ProjectivePoint& seed, const OrbitBudget& budget);

/// gamma = preperiod followed by period repeated forever, in application
/// order (gamma_1 first).
struct InfiniteWord {
  std::vector<std::size_t> preperiod;
  std::vector<std::size_t> period;

  std::size_t at(std::size_t stage) const;  // generator of gamma_{stage+1}
  /// gamma = w o w o ... for a finite word w.
  static InfiniteWord repeating(const Word& w);
};

struct CanonicalHeightOptions {
  double tolerance = 1e-6;
  std::size_t min_stages = 1;
  std::size_t max_stages = 64;
  std::size_t max_digits = 200'000;
  /// Prior per-generator defect estimates (e.g. from estimate_constants);
  /// the defects observed along the trajectory are always folded in.
  std::vector<double> defects;
  /// Run exactly max_stages stages and report the last one, regardless of
  /// the tolerance.
  bool fixed_stages = false;
};

struct CanonicalHeightEstimate {
  double value = 0.0;
  double error_bound = 0.0;
  std::size_t stage = 0;
  /// h(gamma_k o ... o gamma_1 (P)) / deg, for every computed stage k.
  std::vector<double> normalized;
  /// Tail bound C * sum_{j >= k} 1/deg_j for every computed stage k.
  std::vector<double> tail_bounds;
  std::vector<double> defects;
  /// False when every generator of the word has an a-priori defect bound;
  /// certified_bound then holds the tail bound built from those.
  bool empirical = true;
  std::optional<double> certified_bound;
  std::vector<double> certified_tail_bounds;
};

CanonicalHeightEstimate canonical_height_estimate(const InfiniteWord& gamma, const GeneratorList& gens,
                                                  const ProjectivePoint& p,
                                                  const CanonicalHeightOptions& options = {});

/// Bound on |h(phi(Q))/deg(phi) - h(Q)| over all Q: zero for power maps,
/// a resultant bound for morphisms of P^1, none otherwise.
std::optional<double> a_priori_defect(const Endomorphism& phi);

/// |h(phi(Q))/deg(phi) - h(Q)|, with exact zero when h(phi(Q)) = d h(Q).
double height_defect(const Endomorphism& phi, const ProjectivePoint& q);

struct EmpiricalConstants {
  std::vector<double> defects;  // sup over the sample, per generator
  double c1_hat = 0.0;          // max defect / (1 - 1/min degree)
  double c5_hat = 0.0;          // sup |h(phi_i^n Q)/d_i^n - h(Q)|
  std::size_t sample_size = 0;
  static constexpr const char* label = "empirical lower bound";
};

struct ConstantsOptions {
  std::size_t c5_stages = 6;
  std::size_t c5_max_digits = 2000;
};

EmpiricalConstants estimate_constants(const GeneratorList& gens, const std::vector<ProjectivePoint>& sample,
                                      const ConstantsOptions& options = {});

/// Deterministic 64-bit generator with a platform-independent bounded draw.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform integer in [lo, hi].
  long uniform(long lo, long hi);

 private:
  std::uint64_t state_;
};

/// Every subset of N+1 linear forms in N+1 variables has nonzero determinant.
bool in_general_position(const std::vector<std::vector<Integer>>& linear_forms);

struct ExampleMaps {
  Endomorphism phi1;
  Endomorphism phi2;
  std::vector<std::vector<Integer>> linear1;  // L_1..L_d
  std::vector<std::vector<Integer>> linear2;  // M_1..M_d
  std::size_t attempts = 0;
};

struct ExampleMapOptions {
  long form_coef_bound = 2;
  long linear_coef_bound = 3;
  std::size_t max_attempts = 1000;
};

/// phi_1 = [F_0 : ... : F_{N-1} : L_1 ... L_d] and
/// phi_2 = [G_0 : ... : G_{N-1} : M_1 ... M_d] with random small forms and
/// linear forms in general position.  Requires d > N + 1.
ExampleMaps make_example_maps(std::size_t n, unsigned d, std::uint64_t seed, const ExampleMapOptions& options = {});

/// Random endomorphism with coefficients in [-bound, bound]; for N = 1 the
/// result is certified a morphism by its resultant.
Endomorphism random_morphism(std::size_t n, unsigned d, long coef_bound, SplitMix64& rng, std::string label = {});

}  // namespace orbitdep
