#include "oracles.hpp"

#include "orbitdep/dynamics.hpp"
#include "orbitdep/heights.hpp"

#include <doctest.h>

#include <cmath>

using namespace orbitdep;

namespace {

ProjectivePoint pt(std::initializer_list<long> c) { return ProjectivePoint::from_ints(c); }

Divisor coords(std::size_t n, std::initializer_list<std::size_t> idx) {
  std::vector<std::size_t> v(idx);
  return Divisor::coordinate_product(n, v);
}

/// Naive evaluation straight from the monomial list.
Integer naive_eval(const HomogeneousForm& f, const ProjectivePoint& p) {
  Integer total = 0;
  for (const auto& m : f.monomials()) {
    Integer term = m.coef;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      for (unsigned k = 0; k < m.exps[i]; ++k) term *= p[i];
    }
    total += term;
  }
  return total;
}

HomogeneousForm random_form(SplitMix64& rng, std::size_t vars, unsigned deg) {
  std::vector<Monomial> terms;
  const int count = static_cast<int>(rng.uniform(1, 4));
  for (int t = 0; t < count; ++t) {
    std::vector<unsigned> e(vars, 0);
    unsigned left = deg;
    for (std::size_t i = 0; i + 1 < vars; ++i) {
      const unsigned k = static_cast<unsigned>(rng.uniform(0, left));
      e[i] = k;
      left -= k;
    }
    e[vars - 1] = left;
    terms.push_back({e, Integer(rng.uniform(-6, 6) | 1)});
  }
  return HomogeneousForm(vars, terms);
}

}  // namespace

TEST_CASE("weil height examples") {
  CHECK(weil_height(pt({1, 2})).total() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(weil_height(pt({3, 4, 12})).total() == doctest::Approx(std::log(12.0)).epsilon(1e-15));
  CHECK(weil_height(pt({1, 1, 1})).total() == 0.0);
  CHECK(weil_height(pt({0, 1, -1})).total() == 0.0);
}

TEST_CASE("weil height equals log of the largest coprime coordinate") {
  SplitMix64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const long a = rng.uniform(-1000, 1000), b = rng.uniform(-1000, 1000), c = rng.uniform(1, 1000);
    const auto p = pt({a, b, c});
    long g = std::gcd(std::gcd(std::labs(a), std::labs(b)), c);
    const long m = std::max({std::labs(a), std::labs(b), c}) / g;
    CHECK(weil_height(p).total() == doctest::Approx(std::log(static_cast<double>(m))).epsilon(1e-14));
    CHECK(weil_height(p).total() >= 0.0);
  }
}

TEST_CASE("local height examples") {
  const auto d = coords(1, {1});
  CHECK(local_height(Place::finite(Integer(2)), d, pt({1, 6})) == doctest::Approx(std::log(2.0)));
  CHECK(local_height(Place::archimedean(), d, pt({1, 6})) == doctest::Approx(0.0));
  CHECK(local_height(Place::finite(Integer(5)), d, pt({1, 6})) == 0.0);
  CHECK_THROWS_AS(local_height(Place::archimedean(), d, pt({1, 0})), DomainError);
}

TEST_CASE("divisor height examples") {
  CHECK(divisor_height(coords(1, {0, 1}), pt({1, 2})).total() == doctest::Approx(2 * std::log(2.0)));
  CHECK(divisor_height(coords(1, {0}), pt({1, 1})).total() == 0.0);
  CHECK(divisor_height(coords(2, {0, 1, 2}), pt({3, 4, 12})).total() == doctest::Approx(3 * std::log(12.0)));
}

TEST_CASE("sum outside S examples") {
  const Integer two[] = {Integer(2)};
  CHECK(sum_outside_S(coords(1, {1}), PlaceSet(two), pt({1, 6})).nats == doctest::Approx(std::log(3.0)));
  CHECK(sum_outside_S(coords(1, {1}), PlaceSet(), pt({1, 6})).nats == doctest::Approx(std::log(6.0)));
  CHECK(sum_outside_S(coords(1, {0, 1}), PlaceSet(), pt({2, 3})).nats == doctest::Approx(std::log(6.0)));
  CHECK(sum_outside_S(coords(1, {0, 1}), PlaceSet(), pt({2, 3})).s_free_part == 6);
}

TEST_CASE("quasi-integral test examples") {
  const auto d0 = coords(1, {0});
  const auto r = quasi_integral_test(d0, PlaceSet(), pt({4, 9}), 0.5);
  CHECK_FALSE(r.quasi_integral);
  CHECK(r.margin == doctest::Approx(2 * std::log(2.0) - 0.5 * 2 * std::log(3.0)));
  const Integer two[] = {Integer(2)};
  CHECK(quasi_integral_test(d0, PlaceSet(two), pt({4, 9}), 0.01).quasi_integral);
  CHECK_THROWS_AS(quasi_integral_test(coords(1, {1}), PlaceSet(), pt({1, 1}), 0.3), DomainError);
}

TEST_CASE("local heights add up to deg(D) h(P) on exact exponent data") {
  SplitMix64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
    std::vector<Integer> c;
    for (std::size_t i = 0; i <= n; ++i) c.emplace_back(rng.uniform(-300, 300));
    if (std::all_of(c.begin(), c.end(), [](const Integer& x) { return x == 0; })) continue;
    const auto p = ProjectivePoint::normalize(std::span<const Integer>(c));
    const auto form = random_form(rng, n + 1, static_cast<unsigned>(rng.uniform(1, 4)));
    if (form.is_zero()) continue;
    const Divisor d(form);
    const Integer fa = naive_eval(d.form(), p);
    if (fa == 0) {
      CHECK(d.contains(p));
      continue;
    }
    ++checked;
    // Oracle: strip primes from |F(a)| one at a time.
    REQUIRE(abs(fa) < Integer("1000000000000"));
    Integer rest = abs(fa);
    double finite = 0.0;
    for (unsigned long q = 2; rest > 1 && q < 1'000'000; ++q) {
      long v = 0;
      while (mpz_divisible_ui_p(rest.get_mpz_t(), q)) {
        rest /= q;
        ++v;
      }
      if (v == 0) continue;
      const double lam = local_height(Place::finite(Integer(q)), d, p);
      CHECK(lam == doctest::Approx(static_cast<double>(v) * std::log(static_cast<double>(q))));
      finite += lam;
    }
    // |F(a)| < 10^12 here, so a cofactor free of primes below 10^6 is prime.
    if (rest > 1) {
      const double lam = local_height(Place::finite(rest), d, p);
      CHECK(lam == doctest::Approx(std::log(rest.get_d())));
      finite += lam;
    }
    const auto dec = all_local_heights(d, p);
    // Exactness: arch_argument * prod p^e == max|a|^d.
    Integer m = p.max_abs(), md;
    mpz_pow_ui(md.get_mpz_t(), m.get_mpz_t(), d.degree());
    CHECK(dec.arch_argument * Rational(abs(dec.form_value)) == Rational(md));
    CHECK(dec.finite.value() == fa);
    CHECK(dec.sums_to_divisor_height(d, p));
    const double arch = local_height(Place::archimedean(), d, p);
    CHECK(std::fabs(arch + finite - d.degree() * weil_height(p).total()) < 1e-9);
  }
  CHECK(checked > 200);
}

TEST_CASE("finite local heights are nonnegative and sum_outside_S is monotone in S") {
  SplitMix64 rng(13);
  const long primes[] = {2, 3, 5, 7};
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = pt({rng.uniform(1, 500), rng.uniform(-500, 500) | 1});
    const auto d = coords(1, {0, 1});
    if (d.contains(p)) continue;
    PlaceSet small, large;
    for (long q : primes) {
      if (rng.uniform(0, 1)) small.insert(Integer(q));
    }
    large = small;
    large.insert(Integer(primes[rng.uniform(0, 3)]));
    CHECK(sum_outside_S(d, large, p).nats <= sum_outside_S(d, small, p).nats + 1e-12);
    for (long q : primes) CHECK(local_height(Place::finite(Integer(q)), d, p) >= 0.0);
  }
}

TEST_CASE("height of positive powers scales exactly") {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = pt({rng.uniform(1, 60), rng.uniform(-60, 60) | 1, rng.uniform(1, 60)});
    const long r = rng.uniform(1, 7);
    CHECK(weil_height(power(p, r)).exactly_equals(weil_height(p).scaled(r)));
  }
  // Negative powers are not multiplicative in dimension >= 2.
  const auto p = pt({1, 6, 10});
  CHECK_FALSE(weil_height(power(p, -1)).exactly_equals(weil_height(p)));
}

TEST_CASE("divisors: coordinate subdivisor detection and primitive form") {
  CHECK(coords(2, {0, 2}).is_coordinate_subdivisor());
  CHECK(coords(2, {0, 2}).coordinate_indices() == std::vector<std::size_t>{0, 2});
  HomogeneousForm f(2, {{{1, 1}, Integer(4)}});
  const Divisor d(f);
  CHECK(d.form().content() == 1);
  CHECK(d.is_coordinate_subdivisor());
  HomogeneousForm g(2, {{{2, 0}, Integer(1)}});
  CHECK_FALSE(Divisor(g).is_coordinate_subdivisor());
}
