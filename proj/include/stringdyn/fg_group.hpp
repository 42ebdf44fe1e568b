#pragma once

#include "stringdyn/errors.hpp"
#include "stringdyn/matrix.hpp"

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace stringdyn {

// Z^r + Z/d_1 + ... + Z/d_k with d_i | d_{i+1}, all d_i >= 2.
struct FgGroup {
  std::size_t free_rank = 0;
  std::vector<Int> torsion;

  FgGroup() = default;
  FgGroup(std::size_t r, std::vector<Int> d) : free_rank(r), torsion(std::move(d)) { validate(); }

  static FgGroup free(std::size_t r) { return FgGroup(r, {}); }
  static FgGroup cyclic(const Int& n) {
    if (n == 0) return free(1);
    if (n == 1) return FgGroup();
    return FgGroup(0, {n});
  }

  void validate() const {
    for (std::size_t i = 0; i < torsion.size(); ++i) {
      if (torsion[i] < 2)
        throw ValidationError("torsion[" + std::to_string(i) + "]", "invariant factor must be >= 2");
      if (i > 0 && torsion[i] % torsion[i - 1] != 0)
        throw ValidationError("torsion[" + std::to_string(i) + "]",
                              "invariant factors must form a divisibility chain");
    }
  }

  std::size_t torsion_rank() const { return torsion.size(); }
  std::size_t dim() const { return free_rank + torsion.size(); }
  bool is_finite() const { return free_rank == 0; }
  bool is_trivial() const { return dim() == 0; }

  // Order of the group; nullopt when infinite.
  std::optional<Int> order() const {
    if (free_rank) return std::nullopt;
    return torsion_order();
  }

  Int torsion_order() const {
    Int o = 1;
    for (const auto& d : torsion) o *= d;
    return o;
  }

  Int exponent_of_torsion() const { return torsion.empty() ? Int(1) : torsion.back(); }

  // Rows d_i e_{r+i}: the relation lattice in Z^{r+k}.
  Matrix relations() const {
    Matrix m(torsion.size(), dim());
    for (std::size_t i = 0; i < torsion.size(); ++i) m(i, free_rank + i) = torsion[i];
    return m;
  }

  Vec reduce(Vec v) const {
    check_dim(v);
    for (std::size_t i = 0; i < torsion.size(); ++i) v[free_rank + i] = mod_floor(v[free_rank + i], torsion[i]);
    return v;
  }

  bool is_reduced(const Vec& v) const {
    if (v.size() != dim()) return false;
    for (std::size_t i = 0; i < torsion.size(); ++i)
      if (v[free_rank + i] < 0 || v[free_rank + i] >= torsion[i]) return false;
    return true;
  }

  void check_dim(const Vec& v) const {
    if (v.size() != dim())
      throw DimensionMismatch("element of length " + std::to_string(v.size()) + " in group of dimension " +
                              std::to_string(dim()));
  }

  Vec zero() const { return Vec(dim()); }
  Vec basis_vector(std::size_t i) const {
    Vec v(dim());
    v.at(i) = 1;
    return v;
  }

  Vec add(const Vec& a, const Vec& b) const {
    check_dim(a);
    check_dim(b);
    Vec c(dim());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return reduce(std::move(c));
  }
  Vec neg(const Vec& a) const {
    Vec c = a;
    for (auto& v : c) v = -v;
    return reduce(std::move(c));
  }
  Vec sub(const Vec& a, const Vec& b) const { return add(a, neg(b)); }
  Vec scale(const Int& s, const Vec& a) const {
    Vec c = a;
    for (auto& v : c) v *= s;
    return reduce(std::move(c));
  }
  bool is_zero(const Vec& a) const {
    for (const auto& v : reduce(a))
      if (v != 0) return false;
    return true;
  }

  // Order of an element; nullopt when infinite.
  std::optional<Int> element_order(const Vec& a) const {
    Vec x = reduce(a);
    for (std::size_t i = 0; i < free_rank; ++i)
      if (x[i] != 0) return std::nullopt;
    Int o = 1;
    for (std::size_t i = 0; i < torsion.size(); ++i) {
      const Int& t = x[free_rank + i];
      o = lcm_int(o, torsion[i] / gcd_int(t, torsion[i]));
    }
    return o;
  }

  // All elements of a finite group in lexicographic order of residues.
  std::vector<Vec> elements() const {
    if (!is_finite()) throw Error("elements: group is infinite");
    std::vector<Vec> out;
    Vec cur(dim());
    const Int total = torsion_order();
    out.reserve(static_cast<std::size_t>(to_u64(total)));
    while (true) {
      out.push_back(cur);
      std::size_t i = dim();
      while (i > 0) {
        --i;
        cur[i] += 1;
        if (cur[i] < torsion[i]) break;
        cur[i] = 0;
        if (i == 0) return out;
      }
      if (dim() == 0) return out;
    }
  }

  friend bool operator==(const FgGroup&, const FgGroup&) = default;

  std::string str() const {
    std::string s;
    if (free_rank) s = "Z^" + std::to_string(free_rank);
    for (const auto& d : torsion) s += (s.empty() ? "" : " + ") + std::string("Z/") + d.str();
    return s.empty() ? "0" : s;
  }
};

// Element view splitting free and torsion coordinates.
struct GroupElement {
  Vec free_part;
  Vec torsion_part;

  static GroupElement from_lift(const FgGroup& g, const Vec& v) {
    Vec r = g.reduce(v);
    GroupElement e;
    e.free_part.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(g.free_rank));
    e.torsion_part.assign(r.begin() + static_cast<std::ptrdiff_t>(g.free_rank), r.end());
    return e;
  }
  Vec lift() const {
    Vec v = free_part;
    v.insert(v.end(), torsion_part.begin(), torsion_part.end());
    return v;
  }
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

// phi(f, t) = (A f, C f + D t) on Z^r + T.
class Endomorphism {
 public:
  Endomorphism() = default;
  Endomorphism(FgGroup g, Matrix A, Matrix C, Matrix D) : g_(std::move(g)), A_(std::move(A)), C_(std::move(C)), D_(std::move(D)) {
    const std::size_t r = g_.free_rank, k = g_.torsion_rank();
    if (A_.rows() == 0 && A_.cols() == 0) A_ = Matrix(r, r);
    if (C_.rows() == 0 && C_.cols() == 0) C_ = Matrix(k, r);
    if (D_.rows() == 0 && D_.cols() == 0) D_ = Matrix(k, k);
    if (A_.rows() != r || A_.cols() != r) throw ValidationError("A", "expected " + std::to_string(r) + "x" + std::to_string(r));
    if (C_.rows() != k || C_.cols() != r) throw ValidationError("C", "expected " + std::to_string(k) + "x" + std::to_string(r));
    if (D_.rows() != k || D_.cols() != k) throw ValidationError("D", "expected " + std::to_string(k) + "x" + std::to_string(k));
    for (std::size_t j = 0; j < k; ++j) {
      const Int& dj = g_.torsion[j];
      for (std::size_t i = 0; i < r; ++i) C_(j, i) = mod_floor(C_(j, i), dj);
      for (std::size_t i = 0; i < k; ++i) {
        const Int& di = g_.torsion[i];
        const Int step = dj / gcd_int(di, dj);
        if (D_(j, i) % step != 0)
          throw ValidationError("D[" + std::to_string(j) + "][" + std::to_string(i) + "]",
                                "entry " + D_(j, i).str() + " is not a multiple of " + step.str() +
                                    ", so Z/" + di.str() + " -> Z/" + dj.str() + " is not well defined");
        D_(j, i) = mod_floor(D_(j, i), dj);
      }
    }
    build_lift();
  }

  // Endomorphism given by an integer matrix on Z^{r+k} that preserves the relations.
  static Endomorphism from_lift(const FgGroup& g, const Matrix& M) {
    const std::size_t r = g.free_rank, k = g.torsion_rank();
    if (M.rows() != g.dim() || M.cols() != g.dim()) throw DimensionMismatch("from_lift: shape");
    Matrix A(r, r), C(k, r), D(k, k);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) A(i, j) = M(i, j);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        Int v = M(i, r + j) * g.torsion[j];
        if (v != 0) throw ValidationError("lift", "torsion maps into free part");
      }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < r; ++j) C(i, j) = M(r + i, j);
      for (std::size_t j = 0; j < k; ++j) D(i, j) = M(r + i, r + j);
    }
    return Endomorphism(g, std::move(A), std::move(C), std::move(D));
  }

  static Endomorphism identity(const FgGroup& g) { return from_lift(g, Matrix::identity(g.dim())); }
  static Endomorphism zero(const FgGroup& g) { return from_lift(g, Matrix(g.dim(), g.dim())); }
  static Endomorphism multiplication(const FgGroup& g, const Int& m) {
    return from_lift(g, Matrix::identity(g.dim()).scaled(m));
  }

  const FgGroup& group() const { return g_; }
  const Matrix& A() const { return A_; }
  const Matrix& C() const { return C_; }
  const Matrix& D() const { return D_; }
  const Matrix& lift() const { return lift_; }

  Vec apply(const Vec& x) const {
    g_.check_dim(x);
    return g_.reduce(mat_apply(lift_, x));
  }

  // Composition (*this) o other.
  Endomorphism compose(const Endomorphism& other) const {
    if (!(g_ == other.g_)) throw AmbientMismatch("compose: different groups");
    return from_lift(g_, reduce_lift(lift_ * other.lift_));
  }

  Endomorphism power(Int n) const {
    Endomorphism result = identity(g_);
    Endomorphism base = *this;
    while (n > 0) {
      if ((n & 1) != 0) result = result.compose(base);
      n >>= 1;
      if (n > 0) base = base.compose(base);
    }
    return result;
  }

  Endomorphism plus(const Endomorphism& other) const {
    if (!(g_ == other.g_)) throw AmbientMismatch("plus: different groups");
    return from_lift(g_, reduce_lift(lift_ + other.lift_));
  }
  Endomorphism minus_identity() const {
    return from_lift(g_, reduce_lift(lift_ - Matrix::identity(g_.dim())));
  }

  bool is_identity() const { return *this == identity(g_); }

  friend bool operator==(const Endomorphism& a, const Endomorphism& b) {
    return a.g_ == b.g_ && a.A_ == b.A_ && a.C_ == b.C_ && a.D_ == b.D_;
  }

 private:
  void build_lift() {
    const std::size_t r = g_.free_rank, k = g_.torsion_rank();
    lift_ = Matrix(r + k, r + k);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) lift_(i, j) = A_(i, j);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < r; ++j) lift_(r + i, j) = C_(i, j);
      for (std::size_t j = 0; j < k; ++j) lift_(r + i, r + j) = D_(i, j);
    }
  }

  // Reduce the torsion rows of a lifted matrix so entries stay small.
  Matrix reduce_lift(Matrix M) const {
    const std::size_t r = g_.free_rank;
    for (std::size_t i = 0; i < g_.torsion_rank(); ++i)
      for (std::size_t j = 0; j < M.cols(); ++j) M(r + i, j) = mod_floor(M(r + i, j), g_.torsion[i]);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = r; j < M.cols(); ++j) M(i, j) = 0;
    return M;
  }

  FgGroup g_;
  Matrix A_, C_, D_, lift_;
};

}  // namespace stringdyn
