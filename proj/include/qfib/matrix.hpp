#pragma once

// Small dense matrices and linear algebra over F_p.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"

namespace qfib {

/// Row-major dense matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static Matrix from_rows(std::size_t rows, std::size_t cols, std::vector<T> data) {
    if (data.size() != rows * cols) throw InputError("matrix data has wrong length");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = i + 1; j < cols_; ++j) {
        if ((*this)(i, j) != (*this)(j, i)) return false;
      }
    }
    return true;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ModMatrix = Matrix<Elem>;
using IntMatrix = Matrix<std::int64_t>;

inline ModMatrix reduce_mod(const IntMatrix& m, const PrimeField& f) {
  ModMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = f.reduce(m(i, j));
  }
  return out;
}

namespace linalg {

inline ModMatrix multiply(const ModMatrix& a, const ModMatrix& b, const PrimeField& f) {
  if (a.cols() != b.rows()) throw InputError("matrix shapes do not match for product");
  ModMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Elem aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = f.add(c(i, j), f.mul(aik, b(k, j)));
    }
  }
  return c;
}

inline ModMatrix transpose(const ModMatrix& a) {
  ModMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

/// B^T M B.
inline ModMatrix congruence(const ModMatrix& m, const ModMatrix& b, const PrimeField& f) {
  return multiply(transpose(b), multiply(m, b, f), f);
}

/// u^T M v.
inline Elem bilinear(const ModMatrix& m, const std::vector<Elem>& u, const std::vector<Elem>& v,
                     const PrimeField& f) {
  Elem total = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (u[i] == 0) continue;
    Elem row = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) row = f.add(row, f.mul(m(i, j), v[j]));
    total = f.add(total, f.mul(u[i], row));
  }
  return total;
}

inline std::vector<Elem> apply(const ModMatrix& m, const std::vector<Elem>& v,
                               const PrimeField& f) {
  std::vector<Elem> out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Elem acc = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc = f.add(acc, f.mul(m(i, j), v[j]));
    out[i] = acc;
  }
  return out;
}

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref(ModMatrix& a, const PrimeField& f) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t piv = row;
    while (piv < a.rows() && a(piv, col) == 0) ++piv;
    if (piv == a.rows()) continue;
    if (piv != row) {
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(row, j));
    }
    const Elem s = f.inv(a(row, col));
    for (std::size_t j = 0; j < a.cols(); ++j) a(row, j) = f.mul(a(row, j), s);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      const Elem factor = a(i, col);
      for (std::size_t j = 0; j < a.cols(); ++j) {
        a(i, j) = f.sub(a(i, j), f.mul(factor, a(row, j)));
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline std::size_t rank(ModMatrix a, const PrimeField& f) { return rref(a, f).size(); }

/// Basis of the right kernel {x : A x = 0}, returned as the columns of a
/// cols x (cols - rank) matrix. Free variables are set in column order.
inline ModMatrix kernel_basis(ModMatrix a, const PrimeField& f) {
  const auto pivots = rref(a, f);
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < n; ++c) {
    if (!is_pivot[c]) free_cols.push_back(c);
  }
  ModMatrix basis(n, free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const std::size_t fc = free_cols[k];
    basis(fc, k) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) basis(pivots[r], k) = f.neg(a(r, fc));
  }
  return basis;
}

/// Determinant by Gaussian elimination mod p.
inline Elem determinant(ModMatrix a, const PrimeField& f) {
  if (a.rows() != a.cols()) throw InputError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  Elem det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(c, j));
      det = f.neg(det);
    }
    det = f.mul(det, a(c, c));
    const Elem inv = f.inv(a(c, c));
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      const Elem factor = f.mul(a(r, c), inv);
      for (std::size_t j = c; j < n; ++j) a(r, j) = f.sub(a(r, j), f.mul(factor, a(c, j)));
    }
  }
  return det;
}

}  // namespace linalg
}  // namespace qfib
