#include "orbitdep/polynomial.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace orbitdep {

unsigned Monomial::degree() const { return std::accumulate(exps.begin(), exps.end(), 0u); }

HomogeneousForm::HomogeneousForm(std::size_t num_vars, std::vector<Monomial> monomials,
                                 std::optional<unsigned> degree)
    : num_vars_(num_vars) {
  if (num_vars == 0) throw DomainError("form needs at least one variable");
  std::map<std::vector<unsigned>, Integer, std::greater<>> merged;
  for (auto& m : monomials) {
    if (m.exps.size() != num_vars) {
      throw DomainError("monomial has " + std::to_string(m.exps.size()) + " exponents, expected " +
                        std::to_string(num_vars));
    }
    merged[m.exps] += m.coef;
  }
  std::optional<unsigned> seen = degree;
  for (auto& [exps, coef] : merged) {
    if (coef == 0) continue;
    Monomial m{exps, coef};
    const unsigned d = m.degree();
    if (seen && *seen != d) throw DomainError("form is not homogeneous");
    seen = d;
    monomials_.push_back(std::move(m));
  }
  degree_ = seen.value_or(0);
}

HomogeneousForm HomogeneousForm::variable(std::size_t num_vars, std::size_t index) {
  std::vector<unsigned> exps(num_vars, 0);
  exps.at(index) = 1;
  return HomogeneousForm(num_vars, {Monomial{std::move(exps), 1}});
}

HomogeneousForm HomogeneousForm::monomial(std::vector<unsigned> exps, Integer coef) {
  const std::size_t n = exps.size();
  return HomogeneousForm(n, {Monomial{std::move(exps), std::move(coef)}});
}

HomogeneousForm HomogeneousForm::linear(std::span<const Integer> coefs) {
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < coefs.size(); ++i) {
    std::vector<unsigned> exps(coefs.size(), 0);
    exps[i] = 1;
    terms.push_back({std::move(exps), coefs[i]});
  }
  return HomogeneousForm(coefs.size(), std::move(terms), 1u);
}

Integer HomogeneousForm::evaluate(std::span<const Integer> point) const {
  if (point.size() != num_vars_) throw DomainError("evaluate: point has wrong number of coordinates");
  // powers[i][k] = a_i^k
  std::vector<std::vector<Integer>> powers(num_vars_);
  for (std::size_t i = 0; i < num_vars_; ++i) {
    powers[i].reserve(degree_ + 1);
    powers[i].emplace_back(1);
    for (unsigned k = 1; k <= degree_; ++k) powers[i].push_back(powers[i].back() * point[i]);
  }
  Integer total = 0, term;
  for (const auto& m : monomials_) {
    term = m.coef;
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (m.exps[i]) term *= powers[i][m.exps[i]];
    }
    total += term;
  }
  return total;
}

std::uint64_t HomogeneousForm::evaluate_mod(std::span<const std::uint64_t> point, std::uint64_t p) const {
  __extension__ using u128 = unsigned __int128;
  std::uint64_t total = 0;
  for (const auto& m : monomials_) {
    Integer c = m.coef % Integer(static_cast<unsigned long>(p));
    if (c < 0) c += static_cast<unsigned long>(p);
    std::uint64_t term = c.get_ui();
    for (std::size_t i = 0; i < num_vars_; ++i) {
      for (unsigned k = 0; k < m.exps[i]; ++k) term = static_cast<std::uint64_t>(static_cast<u128>(term) * point[i] % p);
    }
    total = (total + term) % p;
  }
  return total;
}

Integer HomogeneousForm::content() const {
  Integer g = 0;
  for (const auto& m : monomials_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m.coef.get_mpz_t());
  return g;
}

Integer HomogeneousForm::max_abs_coef() const {
  Integer best = 0;
  for (const auto& m : monomials_) {
    if (cmpabs(m.coef, best) > 0) best = abs(m.coef);
  }
  return best;
}

HomogeneousForm HomogeneousForm::operator*(const HomogeneousForm& other) const {
  if (num_vars_ != other.num_vars_) throw DomainError("form product: variable count mismatch");
  std::vector<Monomial> terms;
  terms.reserve(monomials_.size() * other.monomials_.size());
  for (const auto& a : monomials_) {
    for (const auto& b : other.monomials_) {
      std::vector<unsigned> exps(num_vars_);
      for (std::size_t i = 0; i < num_vars_; ++i) exps[i] = a.exps[i] + b.exps[i];
      terms.push_back({std::move(exps), a.coef * b.coef});
    }
  }
  return HomogeneousForm(num_vars_, std::move(terms), degree_ + other.degree_);
}

std::vector<Integer> HomogeneousForm::binary_coefficients() const {
  if (num_vars_ != 2) throw DomainError("binary_coefficients: form is not binary");
  std::vector<Integer> coefs(degree_ + 1, Integer(0));
  for (const auto& m : monomials_) coefs[m.exps[1]] = m.coef;
  return coefs;
}

std::string HomogeneousForm::to_string() const {
  if (monomials_.empty()) return "0";
  std::string out;
  for (std::size_t t = 0; t < monomials_.size(); ++t) {
    const auto& m = monomials_[t];
    Integer c = m.coef;
    if (t) {
      out += sgn(c) < 0 ? " - " : " + ";
      c = abs(c);
    } else if (sgn(c) < 0) {
      out += "-";
      c = abs(c);
    }
    std::string vars;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      if (!m.exps[i]) continue;
      if (!vars.empty()) vars += "*";
      vars += "X" + std::to_string(i);
      if (m.exps[i] > 1) vars += "^" + std::to_string(m.exps[i]);
    }
    if (vars.empty()) {
      out += c.get_str();
    } else {
      if (c != 1) out += c.get_str() + "*";
      out += vars;
    }
  }
  return out;
}

Integer determinant(std::vector<std::vector<Integer>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

Integer binary_resultant(const HomogeneousForm& f, const HomogeneousForm& g) {
  const auto a = f.binary_coefficients();
  const auto b = g.binary_coefficients();
  const std::size_t m = f.degree(), n = g.degree();
  const std::size_t size = m + n;
  if (size == 0) return 1;
  std::vector<std::vector<Integer>> syl(size, std::vector<Integer>(size, Integer(0)));
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t k = 0; k <= m; ++k) syl[row][row + k] = a[k];
  }
  for (std::size_t row = 0; row < m; ++row) {
    for (std::size_t k = 0; k <= n; ++k) syl[n + row][row + k] = b[k];
  }
  return determinant(std::move(syl));
}

}  // namespace orbitdep
