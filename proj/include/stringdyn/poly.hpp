#pragma once

#include "stringdyn/matrix.hpp"

#include <optional>
#include <vector>

namespace stringdyn {

// Integer polynomial, coefficients in ascending degree, no trailing zeros (zero poly is empty).
using Poly = std::vector<Int>;

inline void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int poly_degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  poly_trim(c);
  return c;
}

inline Int poly_eval(const Poly& p, const Int& x) {
  Int v = 0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

// Exact division by a monic polynomial; nullopt if the remainder is nonzero.
inline std::optional<Poly> poly_divide_exact(Poly a, const Poly& m) {
  if (m.empty() || m.back() != 1) throw std::invalid_argument("poly_divide_exact: divisor must be monic");
  poly_trim(a);
  if (a.size() < m.size()) {
    if (a.empty()) return Poly{};
    return std::nullopt;
  }
  Poly q(a.size() - m.size() + 1);
  for (std::size_t i = q.size(); i-- > 0;) {
    Int c = a[i + m.size() - 1];
    q[i] = c;
    if (c != 0)
      for (std::size_t j = 0; j < m.size(); ++j) a[i + j] -= c * m[j];
  }
  poly_trim(a);
  if (!a.empty()) return std::nullopt;
  return q;
}

// det(xI - A) by Faddeev-LeVerrier; every division is exact over Z.
inline Poly charpoly(const Matrix& A) {
  const std::size_t n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("charpoly: not square");
  Poly c(n + 1);
  c[n] = 1;
  Matrix M(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix AM = A * M;
    for (std::size_t i = 0; i < n; ++i) AM(i, i) += c[n - k + 1];
    M = std::move(AM);
    Matrix AMk = A * M;
    Int tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += AMk(i, i);
    c[n - k] = -tr / Int(k);
  }
  return c;
}

inline Matrix poly_eval_matrix(const Poly& p, const Matrix& A) {
  const std::size_t n = A.rows();
  Matrix v(n, n);
  for (std::size_t i = p.size(); i-- > 0;) {
    v = v * A;
    for (std::size_t j = 0; j < n; ++j) v(j, j) += p[i];
  }
  return v;
}

namespace detail {

// Solve a small dense rational system exactly (Gauss-Jordan); assumes a unique solution.
inline std::optional<std::vector<Rational>> solve_rational(std::vector<std::vector<Rational>> M, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && M[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(M[p], M[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || M[r][c] == 0) continue;
      Rational f = M[r][c] / M[c][c];
      for (std::size_t j = c; j < n; ++j) M[r][j] -= f * M[c][j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= M[i][i];
  return b;
}

// Some monic divisor of q of exact degree d (Kronecker), or nullopt.
inline std::optional<Poly> kronecker_factor(const Poly& q, int d) {
  if (d <= 0 || d >= poly_degree(q)) return std::nullopt;
  // pick d interpolation points where |q(a)| has few divisors
  struct Pt {
    Int a, v;
    std::size_t ndiv;
  };
  std::vector<Pt> cand;
  for (long long a = 0; cand.size() < static_cast<std::size_t>(3 * d + 6) && a < 200; ++a) {
    for (long long s : {a, -a}) {
      Int v = poly_eval(q, s);
      if (v == 0) continue;
      cand.push_back({Int(s), v, divisors(v).size()});
      if (a == 0) break;
    }
  }
  std::stable_sort(cand.begin(), cand.end(), [](const Pt& x, const Pt& y) { return x.ndiv < y.ndiv; });
  if (cand.size() < static_cast<std::size_t>(d)) return std::nullopt;
  cand.resize(static_cast<std::size_t>(d));
  std::vector<std::vector<Int>> choices;
  for (const auto& p : cand) {
    std::vector<Int> opts;
    for (const auto& dv : divisors(p.v)) {
      opts.push_back(dv);
      opts.push_back(-dv);
    }
    choices.push_back(std::move(opts));
  }
  // g(a) = a^d + sum_{i<d} g_i a^i. Rows fixed, only the right-hand side varies.
  std::vector<std::vector<Rational>> M(d, std::vector<Rational>(d));
  for (int i = 0; i < d; ++i) {
    Int pw = 1;
    for (int j = 0; j < d; ++j) {
      M[i][j] = Rational(pw);
      pw *= cand[i].a;
    }
  }
  std::vector<std::vector<Rational>> inv(d, std::vector<Rational>(d));
  for (int j = 0; j < d; ++j) {
    std::vector<Rational> e(d);
    e[j] = 1;
    auto col = solve_rational(M, e);
    if (!col) return std::nullopt;
    for (int i = 0; i < d; ++i) inv[i][j] = (*col)[i];
  }
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    std::vector<Rational> rhs(d);
    for (int i = 0; i < d; ++i) rhs[i] = Rational(choices[i][idx[i]] - pow_int(cand[i].a, static_cast<unsigned>(d)));
    std::optional<std::vector<Rational>> sol(std::in_place, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) (*sol)[i] += inv[i][j] * rhs[j];
    {
      bool integral = true;
      Poly g(d + 1);
      for (int j = 0; j < d; ++j) {
        if (denominator((*sol)[j]) != 1) {
          integral = false;
          break;
        }
        g[j] = numerator((*sol)[j]);
      }
      g[d] = 1;
      if (integral && g[0] != 0 && poly_divide_exact(q, g)) return g;
    }
    int i = 0;
    while (i < d) {
      if (++idx[i] < choices[i].size()) break;
      idx[i] = 0;
      ++i;
    }
    if (i == d) return std::nullopt;
  }
}

}  // namespace detail

// Monic irreducible factors over Z (with multiplicity) of a monic polynomial.
inline std::vector<Poly> factor_monic(Poly q) {
  poly_trim(q);
  if (q.empty() || q.back() != 1) throw std::invalid_argument("factor_monic: polynomial must be monic");
  std::vector<Poly> out;
  while (q.size() > 1 && q[0] == 0) {
    out.push_back({0, 1});
    q.erase(q.begin());
  }
  // integer roots first
  bool found = true;
  while (found && poly_degree(q) >= 1) {
    found = false;
    for (const auto& dv : divisors(q[0])) {
      for (const Int& r : {Int(dv), Int(-dv)}) {
        if (poly_eval(q, r) == 0) {
          Poly lin{-r, 1};
          q = *poly_divide_exact(q, lin);
          out.push_back(lin);
          found = true;
          break;
        }
      }
      if (found) break;
    }
  }
  for (int d = 2; 2 * d <= poly_degree(q);) {
    if (auto g = detail::kronecker_factor(q, d)) {
      q = *poly_divide_exact(q, *g);
      out.push_back(*g);
    } else {
      ++d;
    }
  }
  if (poly_degree(q) >= 1) out.push_back(q);
  return out;
}

// Product of the irreducible factors whose constant term is +-1.
inline Poly unit_constant_part(const Poly& q) {
  Poly g{1};
  Poly rest = q;
  while (rest.size() > 1 && rest[0] == 0) rest.erase(rest.begin());
  if (rest.size() >= 1 && abs_int(rest[0]) == 1) return rest;
  for (const auto& f : factor_monic(rest))
    if (abs_int(f[0]) == 1) g = poly_mul(g, f);
  return g;
}

}  // namespace stringdyn
