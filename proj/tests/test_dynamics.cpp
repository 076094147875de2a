#include "oracles.hpp"

#include "orbitdep/dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

using namespace orbitdep;

namespace {

ProjectivePoint pt(std::initializer_list<long> c) { return ProjectivePoint::from_ints(c); }

HomogeneousForm mono(std::vector<unsigned> e, long c = 1) { return HomogeneousForm::monomial(std::move(e), Integer(c)); }

Endomorphism squaring() { return Endomorphism({mono({2, 0}), mono({0, 2})}, "f"); }
Endomorphism swap_squaring() { return Endomorphism({mono({0, 2}), mono({2, 0})}, "g"); }

/// Oracle orbit: every word up to the degree bound, evaluated one letter at
/// a time, grouped by point.
std::map<ProjectivePoint, std::set<std::vector<std::size_t>>> all_words(const GeneratorList& gens,
                                                                          const ProjectivePoint& seed,
                                                                          std::uint64_t max_degree) {
  std::map<ProjectivePoint, std::set<std::vector<std::size_t>>> out;
  std::vector<std::pair<std::vector<std::size_t>, std::pair<ProjectivePoint, std::uint64_t>>> frontier = {
      {{}, {seed, 1}}};
  while (!frontier.empty()) {
    std::vector<std::pair<std::vector<std::size_t>, std::pair<ProjectivePoint, std::uint64_t>>> next;
    for (const auto& [w, pd] : frontier) {
      out[pd.first].insert(w);
      for (std::size_t g = 0; g < gens.size(); ++g) {
        const std::uint64_t d = pd.second * gens[g].degree();
        if (d > max_degree) continue;
        std::vector<std::size_t> w2 = {g};
        w2.insert(w2.end(), w.begin(), w.end());
        next.push_back({w2, {evaluate(gens[g], pd.first), d}});
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate examples") {
  CHECK(evaluate(squaring(), pt({1, 2})) == pt({1, 4}));
  const Endomorphism phi({HomogeneousForm(2, {{{2, 0}, Integer(1)}, {{0, 2}, Integer(1)}}), mono({1, 1})});
  CHECK(evaluate(phi, pt({1, 1})) == pt({2, 1}));
  const Endomorphism bad({mono({1, 1}), mono({0, 2})});
  CHECK_THROWS_AS(evaluate(bad, pt({1, 0})), IndeterminacyError);
}

TEST_CASE("endomorphism validation") {
  CHECK_THROWS_AS(Endomorphism({mono({1, 0}), mono({0, 1})}), DomainError);         // degree 1
  CHECK_THROWS_AS(Endomorphism({mono({2, 0}), mono({0, 3})}), DomainError);         // mixed degrees
  CHECK_THROWS_AS(Endomorphism({mono({2, 0}), mono({0, 2, 0})}), DomainError);      // arity
}

TEST_CASE("evaluate_word examples") {
  const GeneratorList one = {squaring()};
  CHECK(evaluate_word(Word({0, 0}), one, pt({1, 2})) == pt({1, 16}));
  CHECK(evaluate_word(Word(), one, pt({3, 5})) == pt({3, 5}));
  const GeneratorList two = {squaring(), swap_squaring()};
  CHECK(evaluate_word(Word({1, 0}), two, pt({1, 2})) == pt({16, 1}));
  const GeneratorList bad = {Endomorphism({mono({1, 1}), mono({0, 2})}), squaring()};
  // [1:0] -> squaring -> [1:0], then the bad map is indeterminate at stage 1.
  try {
    evaluate_word(Word({0, 1}), bad, pt({1, 0}));
    FAIL("expected indeterminacy");
  } catch (const IndeterminacyError& e) {
    CHECK(e.stage() == 1);
  }
}

TEST_CASE("word degree is multiplicative") {
  const GeneratorList gens = {squaring(), Endomorphism({mono({3, 0}), mono({0, 3})})};
  SplitMix64 rng(2);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::size_t> a, b;
    for (long k = rng.uniform(0, 5); k > 0; --k) a.push_back(static_cast<std::size_t>(rng.uniform(0, 1)));
    for (long k = rng.uniform(0, 5); k > 0; --k) b.push_back(static_cast<std::size_t>(rng.uniform(0, 1)));
    const Word wa(a), wb(b);
    CHECK(wa.compose(wb).degree(gens) == wa.degree(gens) * wb.degree(gens));
  }
  CHECK(Word().degree(gens) == 1);
  CHECK_THROWS_AS(Word(std::vector<std::size_t>(70, 0)).degree(gens), BudgetError);
  CHECK_THROWS_AS(Word({2}).degree(gens), DomainError);
}

TEST_CASE("orbit of the squaring map") {
  OrbitBudget b;
  b.max_degree = 8;
  const auto orbit = orbit_enumerate({squaring()}, pt({1, 2}), b);
  REQUIRE(orbit.records.size() == 4);
  CHECK(orbit.records[0].point == pt({1, 2}));
  CHECK(orbit.records[1].point == pt({1, 4}));
  CHECK(orbit.records[2].point == pt({1, 16}));
  CHECK(orbit.records[3].point == pt({1, 256}));
  CHECK_FALSE(orbit.budget_exhausted);

  const auto fixed = orbit_enumerate({squaring()}, pt({1, 1}), b);
  REQUIRE(fixed.records.size() == 1);
  CHECK(fixed.records[0].words.size() == 4);
}

TEST_CASE("orbit matches exhaustive word expansion") {
  const GeneratorList gens = {squaring(), swap_squaring()};
  OrbitBudget b;
  b.max_degree = 4;
  const auto orbit = orbit_enumerate(gens, pt({1, 2}), b);
  const auto expected = all_words(gens, pt({1, 2}), 4);
  CHECK(orbit.word_stream.size() == 7);
  REQUIRE(orbit.records.size() == expected.size());
  CHECK(orbit.records.size() == 5);
  for (const auto& rec : orbit.records) {
    auto it = expected.find(rec.point);
    REQUIRE(it != expected.end());
    std::set<std::vector<std::size_t>> got;
    for (const auto& w : rec.words) got.insert(w.letters());
    CHECK(got == it->second);
    CHECK(evaluate_word(rec.word, gens, pt({1, 2})) == rec.point);
  }
  // Breadth-first: word lengths never decrease along the stream.
  for (std::size_t i = 1; i < orbit.word_stream.size(); ++i) {
    CHECK(orbit.word_stream[i - 1].second.length() <= orbit.word_stream[i].second.length());
  }
}

TEST_CASE("orbit against the oracle on random quadratic maps") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const GeneratorList gens = {random_morphism(1, 2, 3, rng), random_morphism(1, 2, 3, rng)};
    const auto seed = pt({rng.uniform(1, 5), rng.uniform(-5, 5)});
    OrbitBudget b;
    b.max_degree = 16;
    const auto orbit = orbit_enumerate(gens, seed, b);
    const auto expected = all_words(gens, seed, 16);
    REQUIRE(orbit.records.size() == expected.size());
    std::size_t words = 0;
    for (const auto& rec : orbit.records) {
      words += rec.words.size();
      CHECK(expected.count(rec.point) == 1);
      CHECK(rec.height.exactly_equals(weil_height(rec.point)));
    }
    CHECK(words == 31);
    CHECK(orbit_enumerate(gens, seed, b).word_stream == orbit.word_stream);
  }
}

TEST_CASE("orbit budgets") {
  OrbitBudget b;
  b.max_degree = 1024;
  b.max_points = 3;
  auto orbit = orbit_enumerate({squaring()}, pt({1, 2}), b);
  CHECK(orbit.budget_exhausted);
  CHECK(orbit.records.size() == 3);

  b.max_points = 100;
  b.max_digits = 10;
  orbit = orbit_enumerate({squaring()}, pt({1, 2}), b);
  CHECK(orbit.budget_exhausted);
  for (const auto& r : orbit.records) CHECK(r.point.max_digits() <= 10);

  b.max_digits = 5000;
  b.max_height_nats = 10.0;
  orbit = orbit_enumerate({squaring()}, pt({1, 2}), b);
  for (const auto& r : orbit.records) CHECK(r.height.total() <= 10.0);
}

TEST_CASE("indeterminate points are skipped with a warning") {
  const GeneratorList gens = {Endomorphism({mono({1, 1}), mono({0, 2})}), squaring()};
  OrbitBudget b;
  b.max_degree = 4;
  const auto orbit = orbit_enumerate(gens, pt({1, 0}), b);
  CHECK_FALSE(orbit.warnings.empty());
  CHECK(orbit.records.size() == 1);
}

TEST_CASE("height upper bound h(phi(Q)) <= d h(Q) + log(#monomials max|coef|)") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto phi = random_morphism(2, 3, 4, rng);
    for (int i = 0; i < 20; ++i) {
      const auto q = pt({rng.uniform(1, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)});
      ProjectivePoint image = q;
      try {
        image = evaluate(phi, q);
      } catch (const IndeterminacyError&) {
        continue;
      }
      const double lhs = weil_height(image).total();
      const double rhs = phi.degree() * weil_height(q).total() + phi.height_growth_constant();
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("morphism checks") {
  CHECK(check_morphism(squaring()).verified);
  const auto bad = check_morphism(Endomorphism({mono({1, 1}), mono({0, 2})}));
  CHECK_FALSE(bad.verified);
  CHECK(bad.resultant == Integer(0));
  const auto three = check_morphism(Endomorphism({mono({2, 0, 0}), mono({0, 2, 0}), mono({0, 0, 2})}));
  CHECK_FALSE(three.likely_non_morphism);
  const auto base = check_morphism(Endomorphism({mono({1, 1, 0}), mono({0, 1, 1}), mono({0, 2, 0})}));
  CHECK(base.likely_non_morphism);  // [1:0:0] is a common zero
}

TEST_CASE("canonical height of the squaring map is exact") {
  const GeneratorList gens = {squaring()};
  const auto gamma = InfiniteWord::repeating(Word({0}));
  const auto est = canonical_height_estimate(gamma, gens, pt({1, 2}));
  CHECK(est.value == std::log(2.0));
  CHECK(est.error_bound == 0.0);
  for (double v : est.normalized) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const auto zero = canonical_height_estimate(gamma, gens, pt({1, 1}));
  CHECK(zero.value == 0.0);
}

TEST_CASE("canonical height scaling along a periodic word") {
  SplitMix64 rng(40);
  const GeneratorList gens = {random_morphism(1, 2, 3, rng), random_morphism(1, 2, 3, rng)};
  const Word w({1, 0});
  const auto gamma = InfiniteWord::repeating(w);
  CanonicalHeightOptions opts;
  opts.tolerance = 1e-3;
  opts.max_stages = 40;
  for (int i = 0; i < 5; ++i) {
    const auto p = pt({rng.uniform(1, 10), rng.uniform(-10, 10)});
    const auto a = canonical_height_estimate(gamma, gens, p, opts);
    const auto b = canonical_height_estimate(gamma, gens, evaluate_word(w, gens, p), opts);
    REQUIRE(a.certified_bound);
    REQUIRE(b.certified_bound);
    CHECK_FALSE(a.empirical);
    CHECK(std::fabs(b.value - static_cast<double>(w.degree(gens)) * a.value) <=
          *b.certified_bound + static_cast<double>(w.degree(gens)) * *a.certified_bound + 1e-12);
  }
}

TEST_CASE("a-priori defect bounds dominate observed defects") {
  CHECK(a_priori_defect(squaring()) == 0.0);
  SplitMix64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const auto phi = random_morphism(1, static_cast<unsigned>(rng.uniform(2, 4)), 4, rng);
    const auto bound = a_priori_defect(phi);
    REQUIRE(bound);
    for (long a = -12; a <= 12; ++a) {
      for (long b = 1; b <= 12; ++b) {
        if (std::gcd(a, b) != 1) continue;
        CHECK(height_defect(phi, pt({b, a})) <= *bound + 1e-12);
      }
    }
  }
  const auto bad = Endomorphism({mono({2, 0}), mono({1, 1})});
  CHECK_FALSE(a_priori_defect(bad));
}

TEST_CASE("estimate_constants examples") {
  const auto c = estimate_constants({squaring()}, {pt({1, 2}), pt({3, 7})});
  CHECK(c.defects[0] == 0.0);
  CHECK(c.c1_hat == 0.0);
  CHECK(c.c5_hat == 0.0);

  const Endomorphism phi({HomogeneousForm(2, {{{2, 0}, Integer(1)}, {{0, 2}, Integer(1)}}), mono({1, 1})});
  const auto d = estimate_constants({phi}, {pt({1, 1})});
  CHECK(d.defects[0] == doctest::Approx(std::log(2.0) / 2));
  CHECK(d.c1_hat == doctest::Approx(std::log(2.0)));

  const auto e = estimate_constants({phi, squaring()}, {pt({1, 1})});
  CHECK(e.c1_hat == doctest::Approx(std::max(e.defects[0], e.defects[1]) / (1 - 0.5)));
  CHECK_THROWS_AS(estimate_constants({phi}, {}), DomainError);
  CHECK(std::string(EmpiricalConstants::label) == "empirical lower bound");
}

TEST_CASE("example maps: general position and last-form structure") {
  const auto ex = make_example_maps(1, 3, 7);
  REQUIRE(ex.linear1.size() == 3);
  for (const auto* lin : {&ex.linear1, &ex.linear2}) {
    for (const auto& s : oracle::subsets(lin->size(), 2)) {
      std::vector<std::vector<mpz_class>> m = {(*lin)[s[0]], (*lin)[s[1]]};
      CHECK(oracle::leibniz_det(m) != 0);
    }
  }
  HomogeneousForm prod = HomogeneousForm::linear(ex.linear1[0]);
  for (std::size_t i = 1; i < ex.linear1.size(); ++i) prod = prod * HomogeneousForm::linear(ex.linear1[i]);
  CHECK(ex.phi1.forms().back() == prod);
  CHECK(ex.phi1.degree() == 3);
  CHECK(check_morphism(ex.phi1).verified);
  CHECK(check_morphism(ex.phi2).verified);

  CHECK_THROWS_AS(make_example_maps(2, 2, 1), DomainError);

  const auto ex2 = make_example_maps(2, 4, 3);
  REQUIRE(ex2.linear1.size() == 4);
  for (const auto& s : oracle::subsets(4, 3)) {
    std::vector<std::vector<mpz_class>> m = {ex2.linear1[s[0]], ex2.linear1[s[1]], ex2.linear1[s[2]]};
    CHECK(oracle::leibniz_det(m) != 0);
  }
  // Deterministic under the seed.
  CHECK(make_example_maps(2, 4, 3).phi1 == ex2.phi1);
}

TEST_CASE("SplitMix64 bounded draws stay in range") {
  SplitMix64 rng(0);
  for (int i = 0; i < 10000; ++i) {
    const long x = rng.uniform(-3, 4);
    CHECK(x >= -3);
    CHECK(x <= 4);
  }
}
