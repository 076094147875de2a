// One PASS/FAIL line per acceptance criterion.  Exit status is the number
// of failed criteria (capped at 1).

#include "oracles.hpp"

#include "orbitdep/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

using namespace orbitdep;

namespace {

constexpr double kHeightResidue = 1e-9;
constexpr double kRatioTolerance = 1e-12;
constexpr double kCanonicalGap = 1e-3;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string data_path(const std::string& name) { return std::string(ORBITDEP_TEST_DATA) + "/" + name; }

Endomorphism power_map(unsigned d) {
  return Endomorphism({HomogeneousForm(2, {{{d, 0}, Integer(1)}}), HomogeneousForm(2, {{{0, d}, Integer(1)}})}, "f");
}

Divisor coords(std::size_t n, std::vector<std::size_t> idx) { return Divisor::coordinate_product(n, idx); }

HomogeneousForm random_form(SplitMix64& rng, std::size_t vars, unsigned deg) {
  std::vector<Monomial> terms;
  const int count = static_cast<int>(rng.uniform(1, 4));
  for (int t = 0; t < count; ++t) {
    std::vector<unsigned> e(vars, 0);
    unsigned left = deg;
    for (std::size_t i = 0; i + 1 < vars; ++i) {
      const auto k = static_cast<unsigned>(rng.uniform(0, left));
      e[i] = k;
      left -= k;
    }
    e[vars - 1] = left;
    terms.push_back({e, Integer(rng.uniform(-9, 9) | 1)});
  }
  return HomogeneousForm(vars, terms);
}

// Exact finite part: prod p^e == |F(a)| with every p prime and e = v_p(F(a)).
bool finite_part_exact(const LocalHeightDecomposition& dec, std::string& why) {
  Integer prod = 1;
  for (const auto& pp : dec.finite.factors) {
    if (mpz_probab_prime_p(pp.prime.get_mpz_t(), 30) == 0) {
      why = "non-prime factor " + to_string(pp.prime);
      return false;
    }
    Integer rest = abs(dec.form_value);
    long v = 0;
    while (mpz_divisible_p(rest.get_mpz_t(), pp.prime.get_mpz_t())) {
      rest /= pp.prime;
      ++v;
    }
    if (v != pp.exponent) {
      why = "wrong exponent at " + to_string(pp.prime);
      return false;
    }
    Integer t;
    mpz_pow_ui(t.get_mpz_t(), pp.prime.get_mpz_t(), static_cast<unsigned long>(pp.exponent));
    prod *= t;
  }
  if (prod != abs(dec.form_value)) {
    why = "factorization does not multiply back";
    return false;
  }
  return true;
}

Outcome criterion1() {
  Outcome out;
  SplitMix64 rng(20240101);
  std::vector<Divisor> divisors;
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i <= n; ++i) all.push_back(i);
    divisors.push_back(coords(n, all));
    divisors.push_back(coords(n, {0}));
    divisors.push_back(coords(n, {n}));
  }
  while (divisors.size() < 20) {
    const auto n = static_cast<std::size_t>(rng.uniform(1, 3));
    divisors.emplace_back(random_form(rng, n + 1, static_cast<unsigned>(rng.uniform(1, 4))));
  }
  std::size_t checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Divisor& d = divisors[static_cast<std::size_t>(i) % divisors.size()];
    const std::size_t n = d.dimension();
    std::vector<Integer> c;
    for (std::size_t k = 0; k <= n; ++k) c.emplace_back(rng.uniform(-1'000'000, 1'000'000));
    if (std::all_of(c.begin(), c.end(), [](const Integer& x) { return x == 0; })) c[0] = 1;
    const auto p = ProjectivePoint::normalize(std::span<const Integer>(c));
    if (d.contains(p)) continue;
    ++checked;
    const auto dec = all_local_heights(d, p);
    std::string why;
    if (!finite_part_exact(dec, why)) {
      out.fail(p.to_string() + ": " + why);
      continue;
    }
    // arch_argument * |F(a)| == max|a|^deg exactly.
    Integer md;
    mpz_pow_ui(md.get_mpz_t(), p.max_abs().get_mpz_t(), d.degree());
    if (dec.arch_argument * Rational(abs(dec.form_value)) != Rational(md)) out.fail(p.to_string() + ": arch mismatch");
    if (!dec.sums_to_divisor_height(d, p)) out.fail(p.to_string() + ": exact sum differs");
    double total = local_height(Place::archimedean(), d, p);
    for (const auto& pp : dec.finite.factors) total += local_height(Place::finite(pp.prime), d, p);
    const double residue = std::fabs(total - d.degree() * weil_height(p).total());
    if (residue >= kHeightResidue) out.fail(p.to_string() + ": archimedean residue " + std::to_string(residue));
  }
  if (checked < 990) out.fail("too few points off the divisors");
  if (out.ok) out.detail = std::to_string(checked) + " points, 20 divisors";
  return out;
}

Outcome criterion2() {
  Outcome out;
  SplitMix64 rng(7);
  for (int i = 0; i < 10'000; ++i) {
    Rational q(Integer(rng.uniform(-1'000'000'000'000L, 1'000'000'000'000L)),
               Integer(rng.uniform(1, 1'000'000'000'000L)));
    if (q == 0) q = 1;
    q.canonicalize();
    // Exact: the exponent vector over all places sums to zero, i.e.
    // |q| * prod_p |q|_p == 1 with |q|_p = p^{-v_p(q)}.
    const auto num = factor(q.get_num());
    const auto den = factor(q.get_den());
    std::map<Integer, long, IntegerLess> v;
    for (const auto& pp : num.factors) v[pp.prime] += pp.exponent;
    for (const auto& pp : den.factors) v[pp.prime] -= pp.exponent;
    Rational product = abs(q);
    double logs = log_abs(Place::archimedean(), q);
    for (const auto& [p, e] : v) {
      if (valuation(p, q) != e) out.fail("valuation mismatch for " + to_string(q));
      product *= rational_pow(Rational(p), Integer(-e));
      logs += log_abs(Place::finite(p), q);
    }
    if (product != 1) out.fail("product formula fails for " + to_string(q));
    if (std::fabs(logs) > kHeightResidue) out.fail("log sum " + std::to_string(logs) + " for " + to_string(q));
  }
  if (out.ok) out.detail = "10000 rationals";
  return out;
}

IntMatrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols, long bound) {
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  }
  return m;
}

Outcome criterion3() {
  Outcome out;
  SplitMix64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const auto rows = static_cast<std::size_t>(rng.uniform(1, 20));
    const auto cols = static_cast<std::size_t>(rng.uniform(1, 20));
    IntMatrix m = random_matrix(rng, rows, cols, 50);
    if (t % 4 == 0) {
      // rank-deficient case
      const auto r = static_cast<std::size_t>(rng.uniform(1, 3));
      m = random_matrix(rng, rows, r, 7) * random_matrix(rng, r, cols, 7);
    }
    const auto snf = smith_normal_form(m);
    if (!(snf.u * m * snf.v == snf.s)) out.fail("U M V != S");
    if (abs(snf.u.determinant()) != 1 || abs(snf.v.determinant()) != 1) out.fail("not unimodular");
    const auto inv = snf.invariant_factors();
    for (std::size_t k = 1; k < inv.size(); ++k) {
      if (!mpz_divisible_p(inv[k].get_mpz_t(), inv[k - 1].get_mpz_t())) out.fail("divisibility chain broken");
    }
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (i != j && snf.s(i, j) != 0) out.fail("S not diagonal");
      }
    }
    for (const auto& x : integer_kernel(m)) {
      for (const auto& y : m * x) {
        if (y != 0) out.fail("kernel vector not in kernel");
      }
    }
  }
  for (int t = 0; t < 200; ++t) {
    const auto rows = static_cast<std::size_t>(rng.uniform(1, 6));
    const auto cols = static_cast<std::size_t>(rng.uniform(1, 6));
    const IntMatrix m = random_matrix(rng, rows, cols, 20);
    std::vector<std::vector<mpz_class>> raw(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) raw[i][j] = m(i, j);
    }
    const auto expected = oracle::invariant_factors_by_minors(raw);
    const auto inv = smith_normal_form(m).invariant_factors();
    if (inv.size() != expected.size() || !std::equal(inv.begin(), inv.end(), expected.begin())) {
      out.fail("invariant factors differ from gcd-of-minors oracle");
    }
  }
  if (out.ok) out.detail = "500 SNF cases, 200 minor-oracle cases";
  return out;
}

TorusPoint random_torus(SplitMix64& rng, std::size_t dim) {
  static const long primes[] = {2, 3, 5, 7, 11, 13};
  std::vector<Rational> c;
  for (std::size_t i = 0; i < dim; ++i) {
    Rational q = rng.uniform(0, 3) == 0 ? -1 : 1;
    const int factors = static_cast<int>(rng.uniform(0, 2));
    for (int k = 0; k < factors; ++k) q *= rational_pow(Rational(primes[rng.uniform(0, 5)]), Integer(rng.uniform(-3, 3)));
    c.push_back(q);
  }
  return TorusPoint(c);
}

Outcome criterion4() {
  Outcome out;
  SplitMix64 rng(4);
  std::size_t with_relation = 0;
  for (int t = 0; t < 200; ++t) {
    const auto dim = static_cast<std::size_t>(rng.uniform(1, 3));
    std::vector<TorusPoint> gens;
    const long k = rng.uniform(0, 2);
    for (long j = 0; j < k; ++j) gens.push_back(random_torus(rng, dim));
    const GroupGamma gamma(dim, gens);
    const TorusPoint q2 = random_torus(rng, dim);
    TorusPoint q1 = random_torus(rng, dim);
    if (rng.uniform(0, 1)) {
      IntVector e;
      for (long j = 0; j < k; ++j) e.emplace_back(rng.uniform(-2, 2));
      q1 = gamma.element(e) * q2.pow(Integer(rng.uniform(-3, 3) | 1));
    }
    DependenceConstraint c;
    c.max_abs_r = c.max_abs_s = c.max_abs_e = Integer(6);
    const auto res = solve_dependence(q1, q2, gamma, c);
    const auto oracle = brute_force_dependence(q1, q2, gamma, BruteForceOptions{6, 6, std::nullopt});
    if (res.status == DependenceStatus::none_within_bound) out.fail("solver inconclusive");
    if ((res.status == DependenceStatus::found) != oracle.has_value()) {
      out.fail("existence differs for " + q1.to_string() + ", " + q2.to_string());
    }
    if (res.relation) {
      ++with_relation;
      if (!verify_relation(q1, q2, gamma, *res.relation)) out.fail("witness fails verify_relation");
    }
    if (oracle && !verify_relation(q1, q2, gamma, *oracle)) out.fail("oracle witness fails verify_relation");
  }
  if (out.ok) out.detail = "200 instances, " + std::to_string(with_relation) + " with relations";
  return out;
}

ScenarioConfig squaring_config(std::vector<ProjectivePoint> seeds, std::vector<std::size_t> divisor) {
  ScenarioConfig cfg;
  cfg.generators = {power_map(2)};
  cfg.divisor = coords(1, std::move(divisor));
  cfg.seeds = std::move(seeds);
  return cfg;
}

Outcome criterion5() {
  Outcome out;
  const GeneratorList gens = {power_map(2)};
  std::vector<ProjectivePoint> levels = {ProjectivePoint::from_ints({1, 2})};
  for (int n = 1; n <= 6; ++n) levels.push_back(evaluate(gens[0], levels.back()));
  const auto trivial = GroupGamma::trivial(1);
  for (int n = 1; n <= 6; ++n) {
    for (int m = 0; m < n; ++m) {
      const auto res = solve_dependence(torus_coords(levels[n]), torus_coords(levels[m]), trivial);
      const Integer expected_s = Integer(1) << (n - m);
      if (!res.relation || res.relation->r != 1 || res.relation->s != expected_s ||
          res.relation->u != TorusPoint::identity(1)) {
        out.fail("level pair (" + std::to_string(n) + ", " + std::to_string(m) + ")");
      }
    }
  }
  auto cfg = squaring_config({ProjectivePoint::from_ints({1, 2})}, {0, 1});
  cfg.budget.max_degree = 64;
  for (const Rational& c : {Rational(0), Rational(1, 10), Rational(1, 2), Rational(9, 10), Rational(99, 100),
                            Rational(999, 1000)}) {
    cfg.c = c;
    const auto report = scan_theorem1(cfg);
    if (!report.hits.empty()) out.fail("hits at c = " + to_string(c));
  }
  if (out.ok) out.detail = "21 level pairs, 6 values of c";
  return out;
}

Outcome criterion6() {
  Outcome out;
  auto cfg = squaring_config({ProjectivePoint::from_ints({2, 3})}, {0});
  cfg.budget.max_degree = 1024;
  cfg.epsilon = 0.7;
  const auto report = hyp_scan(cfg);
  std::set<std::uint64_t> degrees;
  for (const auto& p : report.hyp_points) {
    const auto n = static_cast<unsigned>(std::lround(std::log2(static_cast<double>(p.degree))));
    const double exact = std::ldexp(std::log(2.0), static_cast<int>(n)) / std::ldexp(std::log(3.0), static_cast<int>(n));
    if (std::fabs(p.integrality_ratio - exact) >= kRatioTolerance) out.fail("ratio off at level " + std::to_string(n));
    degrees.insert(p.degree);
  }
  // Level 0 is the seed itself, which the scan does not list.
  const auto q = quasi_integral_test(*cfg.divisor, PlaceSet(), ProjectivePoint::from_ints({2, 3}), 0.7);
  if (std::fabs(q.ratio - std::log(2.0) / std::log(3.0)) >= kRatioTolerance) out.fail("ratio off at level 0");
  if (degrees.size() != 10 || *degrees.rbegin() != 1024) out.fail("expected levels 1..10");
  if (out.ok) out.detail = "levels 0..10";
  return out;
}

Outcome criterion7() {
  Outcome out;
  const GeneratorList sq = {power_map(2)};
  const auto pts = enumerate_points_up_to(1, Integer(12));
  for (const auto& p : pts) {
    const auto est = canonical_height_estimate(InfiniteWord::repeating(Word({0})), sq, p);
    if (est.value != weil_height(p).total() || est.error_bound != 0.0) out.fail("squaring estimate not exact at " + p.to_string());
  }
  SplitMix64 rng(77);
  const GeneratorList gens = {random_morphism(1, 2, 3, rng, "g0"), random_morphism(1, 2, 3, rng, "g1")};
  const auto word = InfiniteWord::repeating(Word({1, 0}));
  double worst = 0.0;
  int seeds = 0;
  for (std::size_t i = 0; seeds < 20 && i < pts.size(); ++i) {
    CanonicalHeightOptions o;
    o.fixed_stages = true;
    o.max_stages = 15;
    o.max_digits = 400'000;
    CanonicalHeightEstimate est;
    try {
      est = canonical_height_estimate(word, gens, pts[i], o);
    } catch (const IndeterminacyError&) {
      continue;
    }
    ++seeds;
    const double gap = std::fabs(est.normalized[10] - est.normalized[15]);
    worst = std::max(worst, gap);
    if (!(gap < kCanonicalGap)) out.fail("gap " + std::to_string(gap) + " at " + pts[i].to_string());
    if (!(est.tail_bounds[10] >= gap)) out.fail("empirical bound below gap at " + pts[i].to_string());
    if (est.certified_tail_bounds.size() <= 10 || !(est.certified_tail_bounds[10] >= gap)) {
      out.fail("certified bound missing or below gap at " + pts[i].to_string());
    }
  }
  if (seeds < 20) out.fail("fewer than 20 seeds");
  if (out.ok) {
    std::ostringstream s;
    s << "20 seeds, max gap " << worst;
    out.detail = s.str();
  }
  return out;
}

// Scan replica: same seeds, words and exclusions, with brute force in place
// of the lattice solver.
std::set<std::tuple<std::string, std::vector<std::size_t>, std::vector<std::size_t>>> oracle_hits(
    const ScenarioConfig& cfg, long max_exp) {
  std::set<std::tuple<std::string, std::vector<std::size_t>, std::vector<std::size_t>>> out;
  const GroupGamma gamma = cfg.group();
  const GammaTable table(gamma, max_exp);
  const Divisor& d = *cfg.divisor;
  for (const auto& seed : scenario_seeds(cfg)) {
    if (seed.has_zero_coordinate() || d.contains(seed)) continue;
    const auto orbit = orbit_enumerate(cfg.generators, seed, cfg.budget);
    for (const auto& [pi, phi] : orbit.word_stream) {
      if (phi.is_identity()) continue;
      const auto& qphi = orbit.records[pi].point;
      if (qphi.has_zero_coordinate() || d.contains(qphi)) continue;
      for (const auto& [qi, psi] : orbit.word_stream) {
        const auto& qpsi = orbit.records[qi].point;
        if (qpsi.has_zero_coordinate() || d.contains(qpsi)) continue;
        BruteForceOptions o;
        o.max_exp = max_exp;
        o.ratio_bound = cfg.c * Rational(phi.degree(cfg.generators)) / Rational(psi.degree(cfg.generators));
        if (brute_force_dependence(torus_coords(qphi), torus_coords(qpsi), gamma, table, o)) {
          out.emplace(seed.to_string(), phi.letters(), psi.letters());
        }
      }
    }
  }
  return out;
}

Outcome criterion8() {
  Outcome out;
  const auto loaded = load_config(data_path("ex46.json"));
  const auto& cfg = loaded.scenario;
  const auto maps = make_example_maps(1, 8, cfg.example->seed);
  if (!in_general_position(maps.linear1) || !in_general_position(maps.linear2)) out.fail("linear forms not in general position");
  if (!(maps.phi1 == cfg.generators[0]) || !(maps.phi2 == cfg.generators[1])) out.fail("config maps differ from make_example_maps");
  if (!check_morphism(maps.phi1).verified || !check_morphism(maps.phi2).verified) out.fail("example maps not certified morphisms");

  const auto report = scan_theorem1(cfg);
  if (report.budget_exhausted) out.fail("budget exhausted");
  const auto replayed = report_from_json(Json::parse(report_json_text(report)));
  if (const auto err = replay_verify(replayed)) out.fail("replay: " + *err);

  std::set<std::tuple<std::string, std::vector<std::size_t>, std::vector<std::size_t>>> scan;
  for (const auto& h : report.hits) scan.emplace(h.seed.to_string(), h.phi.letters(), h.psi.letters());
  const auto oracle = oracle_hits(cfg, 12);
  if (scan != oracle) {
    out.fail("hit sets differ: scan " + std::to_string(scan.size()) + ", oracle " + std::to_string(oracle.size()));
  }
  if (out.ok) {
    out.detail = std::to_string(report.summary.seeds_scanned) + " seeds, " + std::to_string(report.summary.pairs_examined) +
                 " pairs, " + std::to_string(report.hits.size()) + " hits";
  }
  return out;
}

Outcome criterion9() {
  Outcome out;
  const std::pair<const char*, std::function<ScanReport(const ScenarioConfig&)>> runs[] = {
      {"ex46.json", scan_theorem1},
      {"squaring_t2.json", scan_theorem2},
      {"squaring_hyp.json", hyp_scan},
  };
  for (const auto& [file, scan] : runs) {
    const auto cfg = load_config(data_path(file)).scenario;
    if (report_json_text(scan(cfg)) != report_json_text(scan(cfg))) out.fail(std::string(file) + ": reports differ");
  }
  if (out.ok) out.detail = "scan-t1, scan-t2, hyp-scan";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {1, "exact height decomposition", 30, criterion1},
      {2, "product formula", 5, criterion2},
      {3, "Smith normal form and kernel", 60, criterion3},
      {4, "dependence solver oracle equivalence", 60, criterion4},
      {5, "power-map relation structure", 10, criterion5},
      {6, "hyp-scan constant ratio", 5, criterion6},
      {7, "canonical height estimator", 30, criterion7},
      {8, "example maps end to end", 300, criterion8},
      {9, "determinism", 300, criterion9},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.limit_seconds) o.fail("runtime " + std::to_string(secs) + " s over limit");
    std::printf("%s %d %s (%.2f s, limit %.0f s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_seconds,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  return failed ? 1 : 0;
}
