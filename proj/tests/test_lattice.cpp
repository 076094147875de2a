#include "oracles.hpp"

#include "orbitdep/dynamics.hpp"
#include "orbitdep/lattice.hpp"

#include <doctest.h>

using namespace orbitdep;

namespace {

IntMatrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols, long bound) {
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  }
  return m;
}

/// Matrix of rank <= r as a product of random factors.
IntMatrix low_rank(SplitMix64& rng, std::size_t rows, std::size_t cols, std::size_t r, long bound) {
  return random_matrix(rng, rows, r, bound) * random_matrix(rng, r, cols, bound);
}

std::vector<std::vector<mpz_class>> rows_of(const IntMatrix& m) {
  std::vector<std::vector<mpz_class>> out(m.rows(), std::vector<mpz_class>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

bool is_zero(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

void check_snf(const IntMatrix& m) {
  const auto snf = smith_normal_form(m);
  CHECK(snf.u * m * snf.v == snf.s);
  CHECK(abs(snf.u.determinant()) == 1);
  CHECK(abs(snf.v.determinant()) == 1);
  for (std::size_t i = 0; i < snf.s.rows(); ++i) {
    for (std::size_t j = 0; j < snf.s.cols(); ++j) {
      if (i != j) CHECK(snf.s(i, j) == 0);
    }
  }
  const auto inv = snf.invariant_factors();
  CHECK(inv.size() == snf.rank);
  for (std::size_t k = 0; k < inv.size(); ++k) {
    CHECK(inv[k] > 0);
    if (k) CHECK(mpz_divisible_p(inv[k].get_mpz_t(), inv[k - 1].get_mpz_t()));
  }
  for (std::size_t k = snf.rank; k < std::min(m.rows(), m.cols()); ++k) CHECK(snf.s(k, k) == 0);
}

}  // namespace

TEST_CASE("smith normal form examples") {
  const IntMatrix m{{2, 4}, {6, 8}};
  const auto snf = smith_normal_form(m);
  CHECK(snf.invariant_factors() == IntVector{Integer(2), Integer(4)});
  CHECK(oracle::invariant_factors_by_minors(rows_of(m)) == std::vector<mpz_class>{2, 4});
  check_snf(m);

  const auto id = smith_normal_form(IntMatrix::identity(4));
  CHECK(id.invariant_factors() == IntVector(4, Integer(1)));

  const IntMatrix z{{0, 0}, {0, 0}};
  const auto zs = smith_normal_form(z);
  CHECK(zs.rank == 0);
  CHECK(zs.u == IntMatrix::identity(2));
  CHECK(zs.v == IntMatrix::identity(2));
}

TEST_CASE("smith normal form invariants on random matrices up to 20x20") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 120; ++trial) {
    const auto rows = static_cast<std::size_t>(rng.uniform(1, 20));
    const auto cols = static_cast<std::size_t>(rng.uniform(1, 20));
    const IntMatrix m = trial % 3 == 0 ? low_rank(rng, rows, cols, static_cast<std::size_t>(rng.uniform(1, 4)), 7)
                                       : random_matrix(rng, rows, cols, 50);
    check_snf(m);
  }
}

TEST_CASE("invariant factors agree with the gcd-of-minors oracle") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 80; ++trial) {
    const auto rows = static_cast<std::size_t>(rng.uniform(1, 5));
    const auto cols = static_cast<std::size_t>(rng.uniform(1, 5));
    const IntMatrix m = trial % 2 ? low_rank(rng, rows, cols, static_cast<std::size_t>(rng.uniform(1, 3)), 5)
                                  : random_matrix(rng, rows, cols, 20);
    const auto inv = smith_normal_form(m).invariant_factors();
    const auto expected = oracle::invariant_factors_by_minors(rows_of(m));
    REQUIRE(inv.size() == expected.size());
    for (std::size_t k = 0; k < inv.size(); ++k) CHECK(inv[k] == expected[k]);
  }
}

TEST_CASE("integer kernel examples") {
  const auto k1 = integer_kernel(IntMatrix{{1, 2}});
  REQUIRE(k1.size() == 1);
  CHECK((k1[0] == IntVector{Integer(2), Integer(-1)} || k1[0] == IntVector{Integer(-2), Integer(1)}));
  CHECK(integer_kernel(IntMatrix{{1, 0}, {0, 1}}).empty());
  const IntMatrix ones{{1, 1, 1}};
  const auto k3 = integer_kernel(ones);
  CHECK(k3.size() == 2);
  for (const auto& v : k3) CHECK(is_zero(ones * v));
}

TEST_CASE("integer kernel is sound, saturated and complete on small vectors") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rows = static_cast<std::size_t>(rng.uniform(1, 3));
    const auto cols = static_cast<std::size_t>(rng.uniform(2, 4));
    const IntMatrix m = trial % 2 ? low_rank(rng, rows, cols, 1, 4) : random_matrix(rng, rows, cols, 6);
    const auto basis = integer_kernel(m);
    const auto rank = smith_normal_form(m).rank;
    CHECK(basis.size() == cols - rank);
    for (const auto& v : basis) CHECK(is_zero(m * v));
    if (basis.empty()) continue;
    const IntMatrix b = IntMatrix::from_columns(basis, cols);
    // Saturation: the basis matrix has all invariant factors equal to 1.
    for (const auto& f : smith_normal_form(b).invariant_factors()) CHECK(f == 1);
    // Completeness: every small null vector is an integer combination.
    if (cols > 3) continue;
    std::vector<long> x(cols, -4);
    for (;;) {
      IntVector v(x.begin(), x.end());
      if (is_zero(m * v)) CHECK(solve_integer(b, v).has_value());
      std::size_t i = 0;
      while (i < cols && x[i] == 4) x[i++] = -4;
      if (i == cols) break;
      ++x[i];
    }
  }
}

TEST_CASE("solve_integer finds exact solutions or reports none") {
  const IntMatrix a{{2, 0}, {0, 3}};
  CHECK(solve_integer(a, IntVector{Integer(4), Integer(9)}) == IntVector{Integer(2), Integer(3)});
  CHECK_FALSE(solve_integer(a, IntVector{Integer(1), Integer(0)}).has_value());
  SplitMix64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const IntMatrix m = random_matrix(rng, 3, 4, 9);
    IntVector x;
    for (int k = 0; k < 4; ++k) x.emplace_back(rng.uniform(-5, 5));
    const auto sol = solve_integer(m, m * x);
    REQUIRE(sol.has_value());
    CHECK(m * *sol == m * x);
  }
}

TEST_CASE("column echelon spans the column lattice") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const IntMatrix m = trial % 2 ? low_rank(rng, 3, 5, 2, 5) : random_matrix(rng, 3, 4, 8);
    const auto cols = column_echelon(m);
    CHECK(cols.size() == smith_normal_form(m).rank);
    const IntMatrix e = IntMatrix::from_columns(cols, m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j) CHECK(solve_integer(e, m.column(j)).has_value());
    for (const auto& c : cols) CHECK(solve_integer(m, c).has_value());
    // Lower echelon with positive pivots.
    std::size_t last = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::size_t lead = 0;
      while (cols[k][lead] == 0) ++lead;
      CHECK(cols[k][lead] > 0);
      if (k) CHECK(lead > last);
      last = lead;
    }
  }
}

TEST_CASE("LLL keeps the lattice and satisfies the Lovasz condition") {
  SplitMix64 rng(50);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(2, 5));
    std::vector<IntVector> basis;
    for (std::size_t i = 0; i < n; ++i) {
      IntVector v;
      for (std::size_t j = 0; j < n + 1; ++j) v.emplace_back(rng.uniform(-100, 100));
      basis.push_back(v);
    }
    auto reduced = basis;
    lll_reduce(reduced);
    REQUIRE(reduced.size() == basis.size());
    const IntMatrix b = IntMatrix::from_columns(basis, n + 1);
    const IntMatrix r = IntMatrix::from_columns(reduced, n + 1);
    for (const auto& v : reduced) CHECK(solve_integer(b, v).has_value());
    for (const auto& v : basis) CHECK(solve_integer(r, v).has_value());
    // Gram-Schmidt over the rationals for the Lovasz check.
    std::vector<std::vector<Rational>> star;
    std::vector<Rational> norms;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rational> v(reduced[i].begin(), reduced[i].end());
      for (std::size_t j = 0; j < i; ++j) {
        Rational mu = 0;
        for (std::size_t k = 0; k <= n; ++k) mu += Rational(reduced[i][k]) * star[j][k];
        mu /= norms[j];
        for (std::size_t k = 0; k <= n; ++k) v[k] -= mu * star[j][k];
        if (j + 1 == i) {
          Rational vn = 0;
          for (const auto& x : v) vn += x * x;
          CHECK(vn >= (Rational(3, 4) - mu * mu) * norms[j]);
        }
      }
      Rational nn = 0;
      for (const auto& x : v) nn += x * x;
      star.push_back(v);
      norms.push_back(nn);
    }
  }
}

TEST_CASE("determinant via matrix API") {
  CHECK(IntMatrix({{1, 2}, {3, 4}}).determinant() == -2);
  CHECK(IntMatrix::identity(5).determinant() == 1);
  CHECK(vector_content(IntVector{Integer(4), Integer(-6), Integer(0)}) == 2);
  CHECK(dot(IntVector{Integer(1), Integer(2)}, IntVector{Integer(3), Integer(-4)}) == -5);
}
