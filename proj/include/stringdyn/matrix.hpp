#pragma once

#include "stringdyn/bigint.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stringdyn {

using Vec = std::vector<Int>;

// Dense row-major integer matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<long long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
      for (long long v : row) data_.emplace_back(v);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(const std::vector<Vec>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw std::invalid_argument("Matrix::from_rows: width mismatch");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Int> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Int> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vec row_vec(std::size_t i) const { return Vec(row(i).begin(), row(i).end()); }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  void append_row(std::span<const Int> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw std::invalid_argument("Matrix::append_row: width mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != 0) return false;
    return true;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Int& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("Matrix difference: shape");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("Matrix sum: shape");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }

  Matrix scaled(const Int& s) const {
    Matrix c = *this;
    for (auto& v : c.data_) v *= s;
    return c;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Int> data_;
};

// Row vector times matrix.
inline Vec vec_mul(std::span<const Int> v, const Matrix& m) {
  if (v.size() != m.rows()) throw std::invalid_argument("vec_mul: dimension mismatch");
  Vec out(m.cols());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  }
  return out;
}

// Matrix times column vector.
inline Vec mat_apply(const Matrix& m, std::span<const Int> v) {
  if (v.size() != m.cols()) throw std::invalid_argument("mat_apply: dimension mismatch");
  Vec out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (v[j] != 0) out[i] += m(i, j) * v[j];
  return out;
}

inline Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols()) throw std::invalid_argument("vstack: width mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < b.rows(); ++i) out.append_row(b.row(i));
  return out;
}

inline Matrix mat_pow(Matrix base, Int exp) {
  if (base.rows() != base.cols()) throw std::invalid_argument("mat_pow: not square");
  Matrix result = Matrix::identity(base.rows());
  while (exp > 0) {
    if ((exp & 1) != 0) result = result * base;
    exp >>= 1;
    if (exp > 0) base = base * base;
  }
  return result;
}

struct HermiteResult {
  Matrix H;               // U * M, row echelon, zero rows last
  Matrix U;               // unimodular, rows x rows
  std::size_t rank = 0;   // number of nonzero rows of H
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

namespace detail {

// rows a, b <- [[x, y], [u, v]] * (rows a, b)
inline void combine_rows(Matrix& m, std::size_t a, std::size_t b, const Int& x, const Int& y,
                         const Int& u, const Int& v) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Int ra = m(a, j), rb = m(b, j);
    m(a, j) = x * ra + y * rb;
    m(b, j) = u * ra + v * rb;
  }
}

inline void add_row_multiple(Matrix& m, std::size_t dst, std::size_t src, const Int& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) += q * m(src, j);
}

inline void negate_row(Matrix& m, std::size_t i) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = -m(i, j);
}

}  // namespace detail

// Row-style Hermite normal form: positive pivots, entries above each pivot in [0, pivot).
inline HermiteResult hermite(const Matrix& M, bool with_transform = true) {
  HermiteResult res;
  res.H = M;
  const std::size_t m = M.rows(), n = M.cols();
  if (with_transform) res.U = Matrix::identity(m);
  Matrix& H = res.H;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    for (std::size_t i = row + 1; i < m; ++i) {
      if (H(i, col) == 0) continue;
      if (H(row, col) == 0) {
        H.swap_rows(row, i);
        if (with_transform) res.U.swap_rows(row, i);
        continue;
      }
      const Int a = H(row, col), b = H(i, col);
      if (b % a == 0) {
        Int q = -(b / a);
        detail::add_row_multiple(H, i, row, q);
        if (with_transform) detail::add_row_multiple(res.U, i, row, q);
        continue;
      }
      auto e = ext_gcd(a, b);
      Int u = -(b / e.g), v = a / e.g;
      detail::combine_rows(H, row, i, e.x, e.y, u, v);
      if (with_transform) detail::combine_rows(res.U, row, i, e.x, e.y, u, v);
    }
    if (H(row, col) == 0) continue;
    if (H(row, col) < 0) {
      detail::negate_row(H, row);
      if (with_transform) detail::negate_row(res.U, row);
    }
    const Int p = H(row, col);
    for (std::size_t i = 0; i < row; ++i) {
      Int q = -div_floor(H(i, col), p);
      detail::add_row_multiple(H, i, row, q);
      if (with_transform) detail::add_row_multiple(res.U, i, row, q);
    }
    res.pivots.push_back(col);
    ++row;
  }
  res.rank = row;
  return res;
}

// Nonzero rows of the Hermite form.
inline Matrix hermite_basis(const Matrix& M) {
  auto h = hermite(M, false);
  Matrix out(0, M.cols());
  for (std::size_t i = 0; i < h.rank; ++i) out.append_row(h.H.row(i));
  return out;
}

// Basis (as rows) of {y : y * M = 0}; the basis spans a saturated lattice.
inline Matrix left_kernel(const Matrix& M) {
  auto h = hermite(M, true);
  Matrix out(0, M.rows());
  for (std::size_t i = h.rank; i < M.rows(); ++i) out.append_row(h.U.row(i));
  return out;
}

// Basis (as rows) of {x : M * x = 0}.
inline Matrix right_kernel(const Matrix& M) { return left_kernel(M.transpose()); }

// Some integer y with y * M = b, or nullopt when none exists.
inline std::optional<Vec> solve_left(const HermiteResult& h, std::span<const Int> b) {
  const Matrix& H = h.H;
  if (b.size() != H.cols()) throw std::invalid_argument("solve_left: dimension mismatch");
  Vec rest(b.begin(), b.end());
  Vec z(H.rows());
  for (std::size_t i = 0; i < h.rank; ++i) {
    const std::size_t c = h.pivots[i];
    // columns before c have been cleared by earlier pivots
    if (rest[c] % H(i, c) != 0) return std::nullopt;
    z[i] = rest[c] / H(i, c);
    if (z[i] != 0)
      for (std::size_t j = c; j < H.cols(); ++j) rest[j] -= z[i] * H(i, j);
  }
  for (const auto& v : rest)
    if (v != 0) return std::nullopt;
  return vec_mul(z, h.U);
}

inline std::optional<Vec> solve_left(const Matrix& M, std::span<const Int> b) {
  return solve_left(hermite(M, true), b);
}

struct SmithResult {
  Matrix U, S, V;  // S = U * M * V
};

// Smith normal form with s1 | s2 | ... and zeros last.
inline SmithResult smith(const Matrix& M) {
  const std::size_t m = M.rows(), n = M.cols();
  SmithResult res{Matrix::identity(m), M, Matrix::identity(n)};
  auto diagonal = [&](const Matrix& A) {
    for (std::size_t i = 0; i < A.rows(); ++i)
      for (std::size_t j = 0; j < A.cols(); ++j)
        if (i != j && A(i, j) != 0) return false;
    return true;
  };
  while (!diagonal(res.S)) {
    auto h = hermite(res.S, true);
    res.S = h.H;
    res.U = h.U * res.U;
    if (diagonal(res.S)) break;
    auto ht = hermite(res.S.transpose(), true);
    res.S = ht.H.transpose();
    res.V = res.V * ht.U.transpose();
  }
  const std::size_t d = std::min(m, n);
  for (std::size_t i = 0; i < d; ++i) {
    if (res.S(i, i) < 0) {
      res.S(i, i) = -res.S(i, i);
      detail::negate_row(res.U, i);
    }
  }
  // enforce the divisibility chain pairwise, zeros sink to the end
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const Int a = res.S(i, i), b = res.S(j, j);
      if (a == 0 && b == 0) continue;
      if (a != 0 && b % a == 0) continue;
      if (a == 0) {
        // swap positions i and j
        res.S(i, i) = b;
        res.S(j, j) = 0;
        res.U.swap_rows(i, j);
        Matrix Vt = res.V.transpose();
        Vt.swap_rows(i, j);
        res.V = Vt.transpose();
        continue;
      }
      auto e = ext_gcd(a, b);
      const Int ag = a / e.g, bg = b / e.g;
      detail::combine_rows(res.U, i, j, e.x, e.y, -bg, ag);
      Matrix Vt = res.V.transpose();
      // V <- V * [[1, -y*b/g], [1, x*a/g]] acting on columns i, j
      for (std::size_t k = 0; k < Vt.cols(); ++k) {
        Int ci = Vt(i, k), cj = Vt(j, k);
        Vt(i, k) = ci + cj;
        Vt(j, k) = -e.y * bg * ci + e.x * ag * cj;
      }
      res.V = Vt.transpose();
      res.S(i, i) = e.g;
      res.S(j, j) = ag * b;
    }
  }
  return res;
}

inline Int determinant(const Matrix& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("determinant: not square");
  const std::size_t n = M.rows();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination
  Matrix A = M;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (A(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && A(p, k) == 0) ++p;
      if (p == n) return 0;
      A.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) A(i, j) = (A(i, j) * A(k, k) - A(i, k) * A(k, j)) / prev;
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

}  // namespace stringdyn
