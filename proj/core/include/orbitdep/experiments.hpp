#pragma once

// Scenario-driven scans over semigroup orbits: multiplicative dependence
// with free or fixed exponents, quasi-integrality of orbit points, and
// per-hit ledgers of the height inequalities.

#include "orbitdep/dynamics.hpp"
#include "orbitdep/heights.hpp"
#include "orbitdep/multdep.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace orbitdep {

/// Generators built by make_example_maps instead of listed explicitly.
struct ExampleSpec {
  std::size_t dimension = 1;
  unsigned degree = 3;
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  std::size_t dimension = 1;
  GeneratorList generators;
  std::optional<ExampleSpec> example;  // provenance only; generators already built
  std::optional<Divisor> divisor;
  PlaceSet places;
  std::vector<TorusPoint> gamma;
  Rational c = Rational(1, 2);
  double epsilon = 0.75;
  /// Fixed exponents for scan-t2.
  std::optional<Integer> r;
  std::optional<Integer> s;
  /// scan-t2 restricted to a single generator: pairs (f^n, f^m), n > m.
  bool corollary = false;
  std::vector<ProjectivePoint> seeds;
  /// Seeds of height <= seed_height_bound (nats) are enumerated when set.
  std::optional<double> seed_height_bound;
  OrbitBudget budget;
  std::uint64_t random_seed = 0;
  std::uint64_t solver_search_limit = 2'000'000;
  /// Attach an inequality-chain ledger to every hit.
  bool chains = false;
  /// Hyp-scan comparison height: "divisor" uses h(D, .) with a strict
  /// inequality; "ample" uses h(.) with <=.
  std::string hyp_variant = "divisor";

  GroupGamma group() const { return GroupGamma(dimension, gamma); }
  /// Throws DomainError describing the first invalid field.
  void validate() const;
};

/// Largest H with log H <= bound (up to 1e-12 slack).
Integer max_coordinate_for_height(double bound_nats);

/// Canonical points of P^N with max |a_i| <= exp(bound), sorted by
/// ProjectivePoint ordering (coordinates compared as 0, 1, -1, 2, -2, ...).
std::vector<ProjectivePoint> enumerate_rational_points(std::size_t n, double bound_nats);
std::vector<ProjectivePoint> enumerate_points_up_to(std::size_t n, const Integer& max_coordinate);

/// Seeds of the scenario: explicit list followed by enumerated points,
/// duplicates dropped.
std::vector<ProjectivePoint> scenario_seeds(const ScenarioConfig& config);

/// S extended by every prime dividing a Gamma generator coordinate.
PlaceSet effective_places(const ScenarioConfig& config);

struct ChainStep {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool tight = false;
  bool empirical = false;
  std::string note;
};

struct ChainLedger {
  std::vector<ChainStep> steps;
  /// eps deg(phi) - |s/r| deg(psi) (scan-t1) or eps deg(phi) - |s/r|
  /// (scan-t2), multiplied by deg D.
  double coefficient = 0.0;
  bool available = true;
  std::string note;
};

struct DependenceHit {
  ProjectivePoint seed = ProjectivePoint::from_ints({1, 1});
  Word phi;
  Word psi;
  std::uint64_t deg_phi = 1;
  std::uint64_t deg_psi = 1;
  ProjectivePoint phi_point = seed;  // phi(P), or phi(psi(P)) with fixed r, s
  ProjectivePoint psi_point = seed;  // psi(P)
  DependenceRelation relation;
  Rational ratio;  // |s / r|
  double height_nats = 0.0;
  double outside_sum = 0.0;
  std::optional<double> integrality_ratio;
  bool verified = false;
  std::optional<ChainLedger> chain;
};

struct HypPoint {
  ProjectivePoint seed = ProjectivePoint::from_ints({1, 1});
  Word word;
  std::uint64_t degree = 1;
  ProjectivePoint point = seed;
  double height_nats = 0.0;
  double outside_sum = 0.0;
  double comparison_height = 0.0;
  double integrality_ratio = 0.0;
  bool flagged = false;
};

struct VanishingPattern {
  std::string pattern;  // e.g. "X1=0", or "none"
  std::size_t count = 0;
};

/// Empirical description of where flagged points concentrate.
struct CandidateSet {
  std::vector<VanishingPattern> patterns;
  std::optional<unsigned> interpolation_degree;
  std::vector<HomogeneousForm> forms;  // vanish on every flagged point
};

struct ScanSummary {
  std::size_t seeds_total = 0;
  std::size_t seeds_scanned = 0;
  std::size_t seeds_skipped = 0;
  std::size_t orbit_points = 0;
  std::size_t pairs_examined = 0;
  std::size_t pairs_excluded = 0;  // image on |D| or with a zero coordinate
  std::size_t solver_calls = 0;
  std::size_t inconclusive = 0;
  std::size_t hits = 0;
  std::size_t distinct_seeds = 0;
  std::size_t distinct_points = 0;
  std::size_t flagged = 0;
  std::optional<double> min_integrality_ratio;
};

struct ScanReport {
  std::string kind;  // "scan-t1", "scan-t2", "hyp-scan"
  ScenarioConfig config;
  PlaceSet places;   // effective S
  std::vector<DependenceHit> hits;
  std::vector<HypPoint> hyp_points;  // flagged points (hyp-scan)
  CandidateSet candidates;
  ScanSummary summary;
  EmpiricalConstants constants;
  bool budget_exhausted = false;
  std::vector<std::string> notes;
};

ScanReport scan_theorem1(const ScenarioConfig& config);
ScanReport scan_theorem2(const ScenarioConfig& config);
ScanReport hyp_scan(const ScenarioConfig& config);

/// Evaluates the height inequality chain behind scan-t1 or scan-t2
/// (selected by `kind`) for one hit.
ChainLedger verify_inequality_chain(const ScenarioConfig& config, const std::string& kind, const DependenceHit& hit,
                                    const EmpiricalConstants& constants);

/// Candidate exceptional-set description for a list of points.
CandidateSet describe_candidates(const std::vector<ProjectivePoint>& points, std::size_t dimension);

/// Recomputes every hit of a report from its seed and words and checks the
/// relation exactly; returns a description of the first failure, if any.
std::optional<std::string> replay_verify(const ScanReport& report);

}  // namespace orbitdep
