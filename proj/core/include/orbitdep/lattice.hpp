#pragma once

// Integer matrices: Smith normal form with unimodular transforms, saturated
// integer kernels, integer linear solving and LLL reduction.

#include "orbitdep/number.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace orbitdep {

using IntVector = std::vector<Integer>;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Integer(0)) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);
  static IntMatrix identity(std::size_t n);
  static IntMatrix from_columns(const std::vector<IntVector>& columns, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntVector column(std::size_t j) const;
  IntMatrix operator*(const IntMatrix& other) const;
  IntVector operator*(const IntVector& x) const;
  IntMatrix transpose() const;
  Integer determinant() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += k * row[src]
  void add_row(std::size_t dst, std::size_t src, const Integer& k);
  /// col[dst] += k * col[src]
  void add_col(std::size_t dst, std::size_t src, const Integer& k);
  void negate_row(std::size_t i);

  std::string to_string() const;

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

/// u * m * v == s, u and v unimodular, s diagonal with d_1 | d_2 | ... and
/// nonnegative diagonal.
struct SmithNormalForm {
  IntMatrix u;
  IntMatrix s;
  IntMatrix v;
  std::size_t rank = 0;

  IntVector invariant_factors() const;  // the first `rank` diagonal entries
};

SmithNormalForm smith_normal_form(const IntMatrix& m);

/// Basis of {x in Z^n : m x = 0}; saturated and LLL-reduced.  Empty when
/// the kernel is trivial.
std::vector<IntVector> integer_kernel(const IntMatrix& m);

/// Some x in Z^n with a x = b, if one exists.
std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b);

/// Lower echelon basis of the column lattice m Z^n: column k has its first
/// nonzero entry (positive) in a strictly increasing row, and entries to the
/// left of each pivot in that row are reduced modulo the pivot.
std::vector<IntVector> column_echelon(const IntMatrix& m);

/// LLL reduction (delta = 3/4 exact rational arithmetic) of linearly
/// independent vectors, in place.
void lll_reduce(std::vector<IntVector>& basis);

Integer dot(const IntVector& a, const IntVector& b);
Integer vector_content(const IntVector& v);

}  // namespace orbitdep
