#include "orbitdep/lattice.hpp"

#include "orbitdep/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace orbitdep {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DomainError("ragged matrix literal");
    for (long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVector>& columns, std::size_t rows) {
  IntMatrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != rows) throw DomainError("column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

IntVector IntMatrix::column(std::size_t j) const {
  IntVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
  if (cols_ != other.rows_) throw DomainError("matrix product: shape mismatch");
  IntMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Integer& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

IntVector IntMatrix::operator*(const IntVector& x) const {
  if (cols_ != x.size()) throw DomainError("matrix-vector product: shape mismatch");
  IntVector out(rows_, Integer(0));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * x[j];
  }
  return out;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Integer IntMatrix::determinant() const {
  if (rows_ != cols_) throw DomainError("determinant of a non-square matrix");
  std::vector<std::vector<Integer>> m(rows_, std::vector<Integer>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) m[i][j] = (*this)(i, j);
  }
  return orbitdep::determinant(std::move(m));
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row(std::size_t dst, std::size_t src, const Integer& k) {
  if (k == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) {
    if ((*this)(src, j) != 0) (*this)(dst, j) += k * (*this)(src, j);
  }
}

void IntMatrix::add_col(std::size_t dst, std::size_t src, const Integer& k) {
  if (k == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) {
    if ((*this)(i, src) != 0) (*this)(i, dst) += k * (*this)(i, src);
  }
}

void IntMatrix::negate_row(std::size_t i) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << ',';
    os << '[';
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ',';
      os << (*this)(i, j).get_str();
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

IntVector SmithNormalForm::invariant_factors() const {
  IntVector out;
  for (std::size_t i = 0; i < rank; ++i) out.push_back(s(i, i));
  return out;
}

SmithNormalForm smith_normal_form(const IntMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  SmithNormalForm out{IntMatrix::identity(rows), m, IntMatrix::identity(cols), 0};
  IntMatrix& s = out.s;
  IntMatrix& u = out.u;
  IntMatrix& v = out.v;

  const std::size_t limit = std::min(rows, cols);
  std::size_t t = 0;
  for (; t < limit; ++t) {
    // Pivot: smallest nonzero magnitude in the trailing block.
    auto place_smallest = [&]() -> bool {
      std::size_t bi = rows, bj = cols;
      for (std::size_t i = t; i < rows; ++i) {
        for (std::size_t j = t; j < cols; ++j) {
          if (s(i, j) == 0) continue;
          if (bi == rows || cmpabs(s(i, j), s(bi, bj)) < 0) {
            bi = i;
            bj = j;
          }
        }
      }
      if (bi == rows) return false;
      s.swap_rows(t, bi);
      u.swap_rows(t, bi);
      s.swap_cols(t, bj);
      v.swap_cols(t, bj);
      return true;
    };
    if (!place_smallest()) break;

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (s(i, t) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), s(i, t).get_mpz_t(), s(t, t).get_mpz_t());
        s.add_row(i, t, -q);
        u.add_row(i, t, -q);
        if (s(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (s(t, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), s(t, j).get_mpz_t(), s(t, t).get_mpz_t());
        s.add_col(j, t, -q);
        v.add_col(j, t, -q);
        if (s(t, j) != 0) clean = false;
      }
      if (!clean) {
        // A remainder smaller than the pivot survived; move the smallest
        // entry of the pivot row/column into place and repeat.
        std::size_t bi = t, bj = t;
        for (std::size_t i = t + 1; i < rows; ++i) {
          if (s(i, t) != 0 && cmpabs(s(i, t), s(bi, bj)) < 0) {
            bi = i;
            bj = t;
          }
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (s(t, j) != 0 && cmpabs(s(t, j), s(bi, bj)) < 0) {
            bi = t;
            bj = j;
          }
        }
        s.swap_rows(t, bi);
        u.swap_rows(t, bi);
        s.swap_cols(t, bj);
        v.swap_cols(t, bj);
        continue;
      }
      // Divisibility: every trailing entry must be a multiple of the pivot.
      bool fixed = false;
      for (std::size_t i = t + 1; i < rows && !fixed; ++i) {
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (!mpz_divisible_p(s(i, j).get_mpz_t(), s(t, t).get_mpz_t())) {
            s.add_row(t, i, 1);
            u.add_row(t, i, 1);
            fixed = true;
            break;
          }
        }
      }
      if (!fixed) break;
    }
    if (sgn(s(t, t)) < 0) {
      s.negate_row(t);
      u.negate_row(t);
    }
  }
  out.rank = t;
  return out;
}

Integer dot(const IntVector& a, const IntVector& b) {
  Integer acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Integer vector_content(const IntVector& v) {
  Integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

void lll_reduce(std::vector<IntVector>& b) {
  const std::size_t n = b.size();
  if (n < 2) return;
  const Rational delta(3, 4);
  std::vector<std::vector<Rational>> mu(n, std::vector<Rational>(n));
  std::vector<Rational> bstar_norm(n);
  std::vector<std::vector<Rational>> bstar(n);

  auto gram_schmidt = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      bstar[i].assign(b[i].begin(), b[i].end());
      for (std::size_t j = 0; j < i; ++j) {
        Rational num = 0;
        for (std::size_t k = 0; k < b[i].size(); ++k) num += Rational(b[i][k]) * bstar[j][k];
        mu[i][j] = bstar_norm[j] == 0 ? Rational(0) : Rational(num / bstar_norm[j]);
        for (std::size_t k = 0; k < b[i].size(); ++k) bstar[i][k] -= mu[i][j] * bstar[j][k];
      }
      bstar_norm[i] = 0;
      for (const auto& x : bstar[i]) bstar_norm[i] += x * x;
    }
  };

  gram_schmidt();
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t j = k; j-- > 0;) {
      // Round mu to the nearest integer.
      Rational twice = mu[k][j] * 2 + 1;
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), twice.get_num().get_mpz_t(), Integer(2 * twice.get_den()).get_mpz_t());
      if (q == 0) continue;
      for (std::size_t t = 0; t < b[k].size(); ++t) b[k][t] -= q * b[j][t];
      for (std::size_t t = 0; t < j; ++t) mu[k][t] -= Rational(q) * mu[j][t];
      mu[k][j] -= Rational(q);
    }
    if (bstar_norm[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar_norm[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
}

std::vector<IntVector> integer_kernel(const IntMatrix& m) {
  const std::size_t rows = m.rows(), n = m.cols();
  if (n == 0) return {};
  // Column echelon with the unimodular column transform tracked in v:
  // m * v = [E | 0] with E of full column rank, so the trailing columns of
  // v span the kernel and the span is saturated.
  IntMatrix w = m;
  IntMatrix v = IntMatrix::identity(n);
  std::size_t next = 0;
  for (std::size_t r = 0; r < rows && next < n; ++r) {
    for (;;) {
      std::size_t best = n;
      for (std::size_t j = next; j < n; ++j) {
        if (w(r, j) != 0 && (best == n || cmpabs(w(r, j), w(r, best)) < 0)) best = j;
      }
      if (best == n) break;
      w.swap_cols(next, best);
      v.swap_cols(next, best);
      bool done = true;
      for (std::size_t j = next + 1; j < n; ++j) {
        if (w(r, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), w(r, j).get_mpz_t(), w(r, next).get_mpz_t());
        w.add_col(j, next, -q);
        v.add_col(j, next, -q);
        if (w(r, j) != 0) done = false;
      }
      if (done) break;
    }
    if (w(r, next) != 0) ++next;
  }
  std::vector<IntVector> basis;
  for (std::size_t j = next; j < n; ++j) basis.push_back(v.column(j));
  lll_reduce(basis);
  // Canonical sign: first nonzero entry positive.
  for (auto& vec : basis) {
    auto it = std::find_if(vec.begin(), vec.end(), [](const Integer& x) { return x != 0; });
    if (it != vec.end() && sgn(*it) < 0) {
      for (auto& x : vec) x = -x;
    }
  }
  return basis;
}

std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b) {
  if (b.size() != a.rows()) throw DomainError("solve_integer: right-hand side has wrong length");
  const std::size_t n = a.cols();
  if (a.rows() == 0) return IntVector(n, Integer(0));
  const auto snf = smith_normal_form(a);
  const IntVector ub = snf.u * b;
  IntVector y(n, Integer(0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (i < snf.rank) {
      if (!mpz_divisible_p(ub[i].get_mpz_t(), snf.s(i, i).get_mpz_t())) return std::nullopt;
      mpz_divexact(y[i].get_mpz_t(), ub[i].get_mpz_t(), snf.s(i, i).get_mpz_t());
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  return snf.v * y;
}

std::vector<IntVector> column_echelon(const IntMatrix& m) {
  IntMatrix w = m;
  const std::size_t rows = w.rows(), cols = w.cols();
  std::size_t next = 0;  // first column not yet holding a pivot
  std::vector<std::size_t> pivot_row;
  for (std::size_t r = 0; r < rows && next < cols; ++r) {
    // Euclid across columns next.. on row r.
    for (;;) {
      std::size_t best = cols;
      for (std::size_t j = next; j < cols; ++j) {
        if (w(r, j) != 0 && (best == cols || cmpabs(w(r, j), w(r, best)) < 0)) best = j;
      }
      if (best == cols) break;
      w.swap_cols(next, best);
      bool done = true;
      for (std::size_t j = next + 1; j < cols; ++j) {
        if (w(r, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), w(r, j).get_mpz_t(), w(r, next).get_mpz_t());
        w.add_col(j, next, -q);
        if (w(r, j) != 0) done = false;
      }
      if (done) break;
    }
    if (w(r, next) == 0) continue;
    if (sgn(w(r, next)) < 0) {
      for (std::size_t i = 0; i < rows; ++i) w(i, next) = -w(i, next);
    }
    pivot_row.push_back(r);
    ++next;
  }
  // Reduce entries left of each pivot modulo the pivot.
  for (std::size_t k = 0; k < next; ++k) {
    const std::size_t r = pivot_row[k];
    for (std::size_t j = 0; j < k; ++j) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), w(r, j).get_mpz_t(), w(r, k).get_mpz_t());
      w.add_col(j, k, -q);
    }
  }
  std::vector<IntVector> basis;
  for (std::size_t j = 0; j < next; ++j) basis.push_back(w.column(j));
  return basis;
}

}  // namespace orbitdep
