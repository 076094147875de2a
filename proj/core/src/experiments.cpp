#include "orbitdep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_set>

namespace orbitdep {

namespace {

bool coordinate_divisor(const ScenarioConfig& config) {
  return config.divisor && config.divisor->is_coordinate_subdivisor();
}

void require_theorem_divisor(const ScenarioConfig& config) {
  if (!coordinate_divisor(config)) {
    throw DomainError("divisor: theorem scans need a nontrivial subdivisor of (X_0 ... X_N = 0)");
  }
}

double divisor_height_nats(const Divisor& d, const ProjectivePoint& p) { return divisor_height(d, p).total(); }

/// Every point of the orbit that can enter a torus relation.
bool admissible(const Divisor& d, const ProjectivePoint& p) { return !p.has_zero_coordinate() && !d.contains(p); }

std::string seed_skip_reason(const ScenarioConfig& config, const ProjectivePoint& seed) {
  if (config.divisor && config.divisor->contains(seed)) return "on |D|";
  if (seed.has_zero_coordinate()) return "zero coordinate";
  return {};
}

EmpiricalConstants constants_for(const ScenarioConfig& config, const std::vector<ProjectivePoint>& seeds) {
  if (seeds.empty()) return {};
  return estimate_constants(config.generators, seeds);
}

std::vector<std::uint64_t> stream_degrees(const Orbit& orbit, const GeneratorList& gens) {
  std::vector<std::uint64_t> out;
  out.reserve(orbit.word_stream.size());
  for (const auto& [rec, w] : orbit.word_stream) out.push_back(w.degree(gens));
  return out;
}

void absorb_orbit_notes(ScanReport& report, const ProjectivePoint& seed, const Orbit& orbit) {
  if (orbit.budget_exhausted) report.budget_exhausted = true;
  for (const auto& w : orbit.warnings) report.notes.push_back("seed " + seed.to_string() + ": " + w);
}

void finish_summary(ScanReport& report) {
  std::set<ProjectivePoint> seeds, points;
  for (const auto& h : report.hits) {
    seeds.insert(h.seed);
    points.insert(h.phi_point);
  }
  report.summary.hits = report.hits.size();
  report.summary.distinct_seeds = seeds.size();
  report.summary.distinct_points = points.size();
}

DependenceHit make_hit(const ScenarioConfig& config, const PlaceSet& places, const ProjectivePoint& seed,
                       const Word& phi, const Word& psi, std::uint64_t deg_phi, std::uint64_t deg_psi,
                       const ProjectivePoint& phi_point, const ProjectivePoint& psi_point, DependenceRelation rel) {
  DependenceHit hit;
  hit.seed = seed;
  hit.phi = phi;
  hit.psi = psi;
  hit.deg_phi = deg_phi;
  hit.deg_psi = deg_psi;
  hit.phi_point = phi_point;
  hit.psi_point = psi_point;
  hit.ratio = abs(Rational(rel.s, rel.r));
  hit.relation = std::move(rel);
  hit.height_nats = weil_height(phi_point).total();
  hit.outside_sum = sum_outside_S(*config.divisor, places, phi_point).nats;
  const double hd = divisor_height_nats(*config.divisor, phi_point);
  if (hd > 0) hit.integrality_ratio = hit.outside_sum / hd;
  return hit;
}

ChainStep step(std::string name, double lhs, double rhs, bool empirical, std::string note = {}) {
  ChainStep s;
  s.name = std::move(name);
  s.lhs = lhs;
  s.rhs = rhs;
  const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  s.holds = lhs <= rhs + 1e-9 * scale;
  s.tight = std::fabs(rhs - lhs) <= 1e-9 * scale;
  s.empirical = empirical;
  s.note = std::move(note);
  return s;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (dimension == 0) throw DomainError("dimension: must be positive");
  if (generators.empty()) throw DomainError("generators: at least one endomorphism is required");
  for (const auto& g : generators) {
    if (g.dimension() != dimension) throw DomainError("generators: dimension differs from scenario dimension");
  }
  if (divisor && divisor->dimension() != dimension) throw DomainError("divisor: dimension differs");
  for (const auto& g : gamma) {
    if (g.dimension() != dimension) throw DomainError("gamma: generator dimension differs");
  }
  if (c < 0 || c >= 1) throw DomainError("c: must lie in [0, 1)");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("epsilon: must lie in [0, 1)");
  if ((r && *r == 0) || (s && *s == 0)) throw DomainError("r, s: must be nonzero");
  if (seed_height_bound && !(*seed_height_bound >= 0.0)) throw DomainError("seed_height_bound: must be >= 0");
  for (const auto& p : seeds) {
    if (p.dimension() != dimension) throw DomainError("seeds: point " + p.to_string() + " has wrong dimension");
  }
  if (budget.max_degree == 0 || budget.max_points == 0 || budget.max_digits == 0 || budget.max_words == 0 ||
      !(budget.max_height_nats > 0)) {
    throw DomainError("budget: all budgets must be positive");
  }
  if (hyp_variant != "divisor" && hyp_variant != "ample") throw DomainError("hyp_variant: expected divisor or ample");
}

Integer max_coordinate_for_height(double bound_nats) {
  if (!(bound_nats >= 0.0)) throw DomainError("height bound must be nonnegative");
  if (bound_nats > 40.0) throw DomainError("height bound too large to enumerate");
  long h = static_cast<long>(std::floor(std::exp(bound_nats)));
  while (std::log(static_cast<double>(h + 1)) <= bound_nats + 1e-12) ++h;
  while (h > 1 && std::log(static_cast<double>(h)) > bound_nats + 1e-12) --h;
  return Integer(std::max(h, 1L));
}

std::vector<ProjectivePoint> enumerate_points_up_to(std::size_t n, const Integer& max_coordinate) {
  if (n == 0) throw DomainError("dimension must be positive");
  if (max_coordinate < 1) throw DomainError("max coordinate must be >= 1");
  if (!max_coordinate.fits_slong_p()) throw DomainError("max coordinate too large");
  const long h = max_coordinate.get_si();
  const double count = std::pow(2.0 * static_cast<double>(h) + 1.0, static_cast<double>(n + 1));
  if (count > 5e7) throw BudgetError("point enumeration would visit more than 5e7 tuples");
  std::vector<ProjectivePoint> out;
  std::vector<long> a(n + 1, -h);
  std::vector<Integer> coords(n + 1);
  for (;;) {
    // Canonical: first nonzero positive, gcd 1.
    auto first = std::find_if(a.begin(), a.end(), [](long x) { return x != 0; });
    if (first != a.end() && *first > 0) {
      long g = 0;
      for (long x : a) g = std::gcd(g, std::labs(x));
      if (g == 1) {
        for (std::size_t i = 0; i <= n; ++i) coords[i] = a[i];
        out.push_back(ProjectivePoint::normalize(std::span<const Integer>(coords)));
      }
    }
    std::size_t i = 0;
    while (i <= n && a[i] == h) {
      a[i] = -h;
      ++i;
    }
    if (i > n) break;
    ++a[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ProjectivePoint> enumerate_rational_points(std::size_t n, double bound_nats) {
  return enumerate_points_up_to(n, max_coordinate_for_height(bound_nats));
}

std::vector<ProjectivePoint> scenario_seeds(const ScenarioConfig& config) {
  std::vector<ProjectivePoint> out;
  std::unordered_set<ProjectivePoint, ProjectivePointHash> seen;
  for (const auto& p : config.seeds) {
    if (seen.insert(p).second) out.push_back(p);
  }
  if (config.seed_height_bound) {
    for (auto& p : enumerate_rational_points(config.dimension, *config.seed_height_bound)) {
      if (seen.insert(p).second) out.push_back(std::move(p));
    }
  }
  return out;
}

PlaceSet effective_places(const ScenarioConfig& config) {
  PlaceSet s = config.places;
  for (const auto& p : config.group().support_primes()) s.insert(p);
  return s;
}

ScanReport scan_theorem1(const ScenarioConfig& config) {
  config.validate();
  require_theorem_divisor(config);
  const Divisor& d = *config.divisor;
  const GroupGamma gamma = config.group();
  ScanReport report;
  report.kind = "scan-t1";
  report.config = config;
  report.places = effective_places(config);
  if (!config.places.primes().empty() || !report.places.primes().empty()) {
    if (report.places.primes() != config.places.primes()) {
      report.notes.push_back("S extended by the primes of the Gamma generators to " + report.places.to_string());
    }
  }
  const auto seeds = scenario_seeds(config);
  report.summary.seeds_total = seeds.size();
  report.constants = constants_for(config, seeds);

  for (const auto& seed : seeds) {
    if (auto why = seed_skip_reason(config, seed); !why.empty()) {
      ++report.summary.seeds_skipped;
      report.notes.push_back("seed " + seed.to_string() + " skipped: " + why);
      continue;
    }
    ++report.summary.seeds_scanned;
    const Orbit orbit = orbit_enumerate(config.generators, seed, config.budget);
    absorb_orbit_notes(report, seed, orbit);
    report.summary.orbit_points += orbit.records.size();

    std::vector<bool> ok(orbit.records.size());
    std::vector<std::optional<TorusPoint>> torus(orbit.records.size());
    for (std::size_t i = 0; i < orbit.records.size(); ++i) {
      ok[i] = admissible(d, orbit.records[i].point);
      if (ok[i]) torus[i] = torus_coords(orbit.records[i].point);
    }
    const auto degrees = stream_degrees(orbit, config.generators);
    std::map<std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>, DependenceResult> cache;

    for (std::size_t a = 0; a < orbit.word_stream.size(); ++a) {
      const auto& [pi, phi] = orbit.word_stream[a];
      if (phi.is_identity()) continue;
      for (std::size_t b = 0; b < orbit.word_stream.size(); ++b) {
        const auto& [qi, psi] = orbit.word_stream[b];
        ++report.summary.pairs_examined;
        if (!ok[pi] || !ok[qi]) {
          ++report.summary.pairs_excluded;
          continue;
        }
        const auto key = std::make_tuple(pi, qi, degrees[a], degrees[b]);
        auto it = cache.find(key);
        if (it == cache.end()) {
          DependenceConstraint constraint;
          constraint.ratio_bound = config.c * Rational(Integer(degrees[a]), Integer(degrees[b]));
          constraint.search_limit = config.solver_search_limit;
          ++report.summary.solver_calls;
          it = cache.emplace(key, solve_dependence(*torus[pi], *torus[qi], gamma, constraint)).first;
          if (it->second.status == DependenceStatus::none_within_bound) ++report.summary.inconclusive;
        }
        const auto& result = it->second;
        if (result.status != DependenceStatus::found) continue;
        DependenceHit hit = make_hit(config, report.places, seed, phi, psi, degrees[a], degrees[b],
                                     orbit.records[pi].point, orbit.records[qi].point, *result.relation);
        hit.verified = verify_relation(*torus[pi], *torus[qi], gamma, hit.relation);
        if (!hit.verified) {
          report.notes.push_back("dropped unverifiable relation at seed " + seed.to_string());
          continue;
        }
        report.hits.push_back(std::move(hit));
      }
    }
  }
  if (config.chains) {
    for (auto& h : report.hits) h.chain = verify_inequality_chain(config, report.kind, h, report.constants);
  }
  finish_summary(report);
  return report;
}

ScanReport scan_theorem2(const ScenarioConfig& config) {
  config.validate();
  require_theorem_divisor(config);
  if (!config.r || !config.s) throw DomainError("r, s: scan-t2 needs fixed nonzero r and s");
  if (config.corollary && config.generators.size() != 1) {
    throw DomainError("corollary: the corollary mode needs exactly one generator");
  }
  const Divisor& d = *config.divisor;
  const GroupGamma gamma = config.group();
  const Integer r = *config.r, s = *config.s;
  const Rational rho = abs(Rational(s, r));
  ScanReport report;
  report.kind = "scan-t2";
  report.config = config;
  report.places = effective_places(config);
  if (report.places.primes() != config.places.primes()) {
    report.notes.push_back("S extended by the primes of the Gamma generators to " + report.places.to_string());
  }
  const auto seeds = scenario_seeds(config);
  report.summary.seeds_total = seeds.size();
  report.constants = constants_for(config, seeds);

  for (const auto& seed : seeds) {
    if (auto why = seed_skip_reason(config, seed); !why.empty()) {
      ++report.summary.seeds_skipped;
      report.notes.push_back("seed " + seed.to_string() + " skipped: " + why);
      continue;
    }
    ++report.summary.seeds_scanned;
    const Orbit orbit = orbit_enumerate(config.generators, seed, config.budget);
    absorb_orbit_notes(report, seed, orbit);
    report.summary.orbit_points += orbit.records.size();

    std::map<Word, std::size_t> record_of;
    for (const auto& [rec, w] : orbit.word_stream) record_of.emplace(w, rec);
    const auto degrees = stream_degrees(orbit, config.generators);
    std::vector<bool> ok(orbit.records.size());
    for (std::size_t i = 0; i < orbit.records.size(); ++i) ok[i] = admissible(d, orbit.records[i].point);
    std::map<std::pair<std::size_t, std::size_t>, std::optional<IntVector>> cache;

    for (std::size_t b = 0; b < orbit.word_stream.size(); ++b) {
      const auto& [qi, psi] = orbit.word_stream[b];
      for (std::size_t a = 0; a < orbit.word_stream.size(); ++a) {
        const auto& phi = orbit.word_stream[a].second;
        if (phi.is_identity()) continue;
        auto found = record_of.find(phi.compose(psi));
        if (found == record_of.end()) continue;  // outside the degree budget
        const std::size_t oi = found->second;
        ++report.summary.pairs_examined;
        if (!ok[oi] || !ok[qi]) {
          ++report.summary.pairs_excluded;
          continue;
        }
        if (rho > config.c * Integer(degrees[a])) continue;
        auto key = std::make_pair(oi, qi);
        auto it = cache.find(key);
        if (it == cache.end()) {
          ++report.summary.solver_calls;
          const TorusPoint t = torus_coords(orbit.records[oi].point).pow(r) * torus_coords(orbit.records[qi].point).pow(-s);
          it = cache.emplace(key, gamma_membership(t, gamma)).first;
        }
        if (!it->second) continue;
        DependenceRelation rel{r, s, *it->second, gamma.element(*it->second)};
        DependenceHit hit = make_hit(config, report.places, seed, phi, psi, degrees[a], degrees[b],
                                     orbit.records[oi].point, orbit.records[qi].point, std::move(rel));
        hit.verified = verify_relation(torus_coords(hit.phi_point), torus_coords(hit.psi_point), gamma, hit.relation);
        if (!hit.verified) {
          report.notes.push_back("dropped unverifiable relation at seed " + seed.to_string());
          continue;
        }
        report.hits.push_back(std::move(hit));
      }
    }
  }
  if (config.chains) {
    for (auto& h : report.hits) h.chain = verify_inequality_chain(config, report.kind, h, report.constants);
  }
  finish_summary(report);
  return report;
}

ScanReport hyp_scan(const ScenarioConfig& config) {
  config.validate();
  if (!config.divisor) throw DomainError("divisor: hyp-scan needs a divisor");
  const Divisor& d = *config.divisor;
  const bool ample = config.hyp_variant == "ample";
  ScanReport report;
  report.kind = "hyp-scan";
  report.config = config;
  report.places = effective_places(config);
  if (report.places.primes() != config.places.primes()) {
    report.notes.push_back("S extended by the primes of the Gamma generators to " + report.places.to_string());
  }
  const auto seeds = scenario_seeds(config);
  report.summary.seeds_total = seeds.size();
  report.constants = constants_for(config, seeds);
  std::vector<ProjectivePoint> flagged_points;

  for (const auto& seed : seeds) {
    ++report.summary.seeds_scanned;
    const Orbit orbit = orbit_enumerate(config.generators, seed, config.budget);
    absorb_orbit_notes(report, seed, orbit);
    report.summary.orbit_points += orbit.records.size();
    for (const auto& rec : orbit.records) {
      // Hyp concerns phi(P) with phi != id.
      auto w = std::find_if(rec.words.begin(), rec.words.end(), [](const Word& x) { return !x.is_identity(); });
      if (w == rec.words.end()) continue;
      ++report.summary.pairs_examined;
      if (d.contains(rec.point)) {
        ++report.summary.pairs_excluded;
        continue;
      }
      HypPoint hp;
      hp.seed = seed;
      hp.word = *w;
      hp.degree = w->degree(config.generators);
      hp.point = rec.point;
      hp.height_nats = rec.height.total();
      hp.comparison_height = ample ? hp.height_nats : divisor_height_nats(d, rec.point);
      if (hp.comparison_height == 0.0) {
        ++report.summary.pairs_excluded;
        report.notes.push_back("height-zero point " + rec.point.to_string() + " (seed " + seed.to_string() +
                               ") skipped");
        continue;
      }
      hp.outside_sum = sum_outside_S(d, report.places, rec.point).nats;
      hp.integrality_ratio = hp.outside_sum / hp.comparison_height;
      hp.flagged = ample ? hp.outside_sum <= config.epsilon * hp.comparison_height
                         : hp.outside_sum < config.epsilon * hp.comparison_height;
      if (!report.summary.min_integrality_ratio || hp.integrality_ratio < *report.summary.min_integrality_ratio) {
        report.summary.min_integrality_ratio = hp.integrality_ratio;
      }
      if (hp.flagged) {
        flagged_points.push_back(hp.point);
        report.hyp_points.push_back(std::move(hp));
      }
    }
  }
  report.summary.flagged = report.hyp_points.size();
  report.candidates = describe_candidates(flagged_points, config.dimension);
  return report;
}

CandidateSet describe_candidates(const std::vector<ProjectivePoint>& points, std::size_t dimension) {
  CandidateSet out;
  std::map<std::string, std::size_t> patterns;
  std::vector<ProjectivePoint> distinct;
  std::unordered_set<ProjectivePoint, ProjectivePointHash> seen;
  for (const auto& p : points) {
    if (!seen.insert(p).second) continue;
    distinct.push_back(p);
    std::string pat;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] != 0) continue;
      if (!pat.empty()) pat += ",";
      pat += "X" + std::to_string(i) + "=0";
    }
    ++patterns[pat.empty() ? "none" : pat];
  }
  for (const auto& [pat, n] : patterns) out.patterns.push_back({pat, n});
  const std::size_t vars = dimension + 1;
  for (unsigned deg = 1; deg <= 2; ++deg) {
    // All exponent vectors of total degree deg.
    std::vector<std::vector<unsigned>> exps;
    std::vector<unsigned> e(vars, 0);
    auto gen = [&](auto&& self, std::size_t i, unsigned left) -> void {
      if (i + 1 == vars) {
        e[i] = left;
        exps.push_back(e);
        return;
      }
      for (unsigned k = left + 1; k-- > 0;) {
        e[i] = k;
        self(self, i + 1, left - k);
      }
    };
    gen(gen, 0, deg);
    // Fewer points than monomials always admit a vanishing form.
    if (distinct.size() < exps.size()) continue;
    IntMatrix m(distinct.size(), exps.size());
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      for (std::size_t j = 0; j < exps.size(); ++j) {
        Integer v = 1;
        for (std::size_t k = 0; k < vars; ++k) {
          for (unsigned t = 0; t < exps[j][k]; ++t) v *= distinct[i][k];
        }
        m(i, j) = v;
      }
    }
    const auto kernel = integer_kernel(m);
    if (kernel.empty()) continue;
    out.interpolation_degree = deg;
    for (const auto& vec : kernel) {
      std::vector<Monomial> terms;
      for (std::size_t j = 0; j < exps.size(); ++j) {
        if (vec[j] != 0) terms.push_back({exps[j], vec[j]});
      }
      out.forms.emplace_back(vars, std::move(terms), deg);
    }
    break;
  }
  return out;
}

ChainLedger verify_inequality_chain(const ScenarioConfig& config, const std::string& kind, const DependenceHit& hit,
                                    const EmpiricalConstants& constants) {
  ChainLedger ledger;
  if (!config.divisor) {
    ledger.available = false;
    ledger.note = "no divisor";
    return ledger;
  }
  const Divisor& d = *config.divisor;
  const PlaceSet places = effective_places(config);
  const double eps = config.epsilon;
  const double delta = d.degree();
  const double rho = hit.ratio.get_d();
  const double dphi = static_cast<double>(hit.deg_phi);
  const double dpsi = static_cast<double>(hit.deg_psi);
  const double c2 = 0.0, c4 = 0.0;  // exact with primitive F on projective space

  const double h_phi = weil_height(hit.phi_point).total();
  const double h_psi = weil_height(hit.psi_point).total();
  const double hd_phi = divisor_height_nats(d, hit.phi_point);
  const double hd_psi = divisor_height_nats(d, hit.psi_point);
  const double out_phi = sum_outside_S(d, places, hit.phi_point).nats;
  const double out_psi = sum_outside_S(d, places, hit.psi_point).nats;
  const std::string c3_note = "C3 = 0 here; slack is |s/r| times the S-part of the local heights";

  if (kind == "scan-t1") {
    const double h_p = weil_height(hit.seed).total();
    const double c1 = constants.c1_hat;
    ledger.steps.push_back(step("height lower bound", eps * (delta * (dphi * h_p - dphi * c1) - c2),
                                eps * (delta * h_phi - c2), true, "uses C1_hat"));
    ledger.steps.push_back(step("divisor height of phi(P)", eps * (delta * h_phi - c2), eps * hd_phi, false));
    ledger.steps.push_back(step("quasi-integrality hypothesis", eps * hd_phi, out_phi, false,
                                "fails exactly when phi(P) is quasi-integral"));
    ledger.steps.push_back(step("relation transfer (u in Gamma)", out_phi, rho * out_psi, false));
    ledger.steps.push_back(step("outside-S bound", rho * out_psi, rho * hd_psi, false, c3_note));
    ledger.steps.push_back(step("divisor height of psi(P)", rho * hd_psi, rho * (delta * h_psi + c4), false));
    ledger.steps.push_back(step("height upper bound", rho * (delta * h_psi + c4),
                                rho * (delta * (dpsi * h_p + dpsi * c1) + c4), true, "uses C1_hat"));
    ledger.coefficient = delta * (eps * dphi - rho * dpsi);
    ledger.steps.push_back(step("final height inequality", ledger.coefficient * h_p,
                                eps * (delta * dphi * c1 + c2) + rho * (delta * dpsi * c1 + c4), true));
    return ledger;
  }

  // scan-t2: Q = psi(P), gamma = phi o phi o ...
  const double c5 = constants.c5_hat;
  CanonicalHeightOptions opts;
  opts.tolerance = 1e-3;
  opts.max_stages = 24;
  opts.max_digits = 20000;
  double hat_q = 0.0, hat_phi_q = 0.0, err = 0.0;
  try {
    const InfiniteWord gamma = InfiniteWord::repeating(hit.phi);
    const auto eq = canonical_height_estimate(gamma, config.generators, hit.psi_point, opts);
    const auto ephi = canonical_height_estimate(gamma, config.generators, hit.phi_point, opts);
    hat_q = eq.value;
    hat_phi_q = ephi.value;
    err = dphi * eq.error_bound + ephi.error_bound;
  } catch (const std::exception& e) {
    ledger.available = false;
    ledger.note = std::string("canonical height unavailable: ") + e.what();
    return ledger;
  }
  ledger.steps.push_back(step("canonical scaling", std::fabs(dphi * hat_q - hat_phi_q), err, true,
                              "|deg(phi) h_gamma(Q) - h_gamma(phi(Q))| within combined error bounds"));
  ledger.steps.push_back(step("canonical lower bound", eps * (delta * (hat_phi_q - c5) - c2), eps * (delta * h_phi - c2),
                              true, "uses C5_hat"));
  ledger.steps.push_back(step("divisor height of phi(Q)", eps * (delta * h_phi - c2), eps * hd_phi, false));
  ledger.steps.push_back(step("quasi-integrality hypothesis", eps * hd_phi, out_phi, false,
                              "fails exactly when phi(Q) is quasi-integral"));
  ledger.steps.push_back(step("relation transfer (u in Gamma)", out_phi, rho * out_psi, false));
  ledger.steps.push_back(step("outside-S bound", rho * out_psi, rho * hd_psi, false, c3_note));
  ledger.steps.push_back(step("divisor height of Q", rho * hd_psi, rho * (delta * h_psi + c4), false));
  ledger.steps.push_back(step("canonical upper bound", rho * (delta * h_psi + c4), rho * (delta * (hat_q + c5) + c4),
                              true, "uses C5_hat"));
  ledger.coefficient = delta * (eps * dphi - rho);
  ledger.steps.push_back(step("final canonical height inequality", ledger.coefficient * hat_q,
                              eps * (delta * c5 + c2) + rho * (delta * c5 + c4), true));
  return ledger;
}

std::optional<std::string> replay_verify(const ScanReport& report) {
  const auto& config = report.config;
  const GroupGamma gamma = config.group();
  for (std::size_t i = 0; i < report.hits.size(); ++i) {
    const auto& hit = report.hits[i];
    const std::string where = "hit " + std::to_string(i) + ": ";
    try {
      if (hit.phi.degree(config.generators) != hit.deg_phi || hit.psi.degree(config.generators) != hit.deg_psi) {
        return where + "degree mismatch";
      }
      const ProjectivePoint psi_point = evaluate_word(hit.psi, config.generators, hit.seed);
      const ProjectivePoint phi_point = report.kind == "scan-t2" ? evaluate_word(hit.phi, config.generators, psi_point)
                                                                 : evaluate_word(hit.phi, config.generators, hit.seed);
      if (!(psi_point == hit.psi_point) || !(phi_point == hit.phi_point)) return where + "orbit points differ";
      if (!config.divisor || config.divisor->contains(phi_point) || config.divisor->contains(psi_point)) {
        return where + "image on the divisor";
      }
      if (!verify_relation(torus_coords(phi_point), torus_coords(psi_point), gamma, hit.relation)) {
        return where + "relation does not hold";
      }
      const Rational rho = abs(Rational(hit.relation.s, hit.relation.r));
      if (report.kind == "scan-t2") {
        if (hit.relation.r != *config.r || hit.relation.s != *config.s) return where + "r, s differ from config";
        if (rho > config.c * Integer(hit.deg_phi)) return where + "ratio condition violated";
      } else if (rho * Integer(hit.deg_psi) > config.c * Integer(hit.deg_phi)) {
        return where + "ratio condition violated";
      }
    } catch (const std::exception& e) {
      return where + e.what();
    }
  }
  for (std::size_t i = 0; i < report.hyp_points.size(); ++i) {
    const auto& hp = report.hyp_points[i];
    const std::string where = "flagged point " + std::to_string(i) + ": ";
    try {
      if (!(evaluate_word(hp.word, config.generators, hp.seed) == hp.point)) return where + "orbit point differs";
      const double out = sum_outside_S(*config.divisor, report.places, hp.point).nats;
      const double h =
          config.hyp_variant == "ample" ? weil_height(hp.point).total() : divisor_height_nats(*config.divisor, hp.point);
      const bool flagged = config.hyp_variant == "ample" ? out <= config.epsilon * h : out < config.epsilon * h;
      if (!flagged) return where + "not quasi-integral on replay";
    } catch (const std::exception& e) {
      return where + e.what();
    }
  }
  return std::nullopt;
}

}  // namespace orbitdep
