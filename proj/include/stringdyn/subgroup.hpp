#pragma once

#include "stringdyn/fg_group.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace stringdyn {

namespace detail {

inline std::vector<std::size_t> echelon_pivots(const Matrix& H) {
  std::vector<std::size_t> piv;
  for (std::size_t i = 0; i < H.rows(); ++i) {
    std::size_t c = 0;
    while (c < H.cols() && H(i, c) == 0) ++c;
    piv.push_back(c);
  }
  return piv;
}

// Coefficients z with z * H = b for an echelon basis H, if they exist.
inline std::optional<Vec> echelon_coords(const Matrix& H, const std::vector<std::size_t>& piv, std::span<const Int> b) {
  Vec rest(b.begin(), b.end());
  Vec z(H.rows());
  std::size_t next = 0;
  for (std::size_t c = 0; c < H.cols(); ++c) {
    if (next < H.rows() && piv[next] == c) {
      if (rest[c] % H(next, c) != 0) return std::nullopt;
      z[next] = rest[c] / H(next, c);
      if (z[next] != 0)
        for (std::size_t j = c; j < H.cols(); ++j) rest[j] -= z[next] * H(next, j);
      ++next;
    } else if (rest[c] != 0) {
      return std::nullopt;
    }
  }
  return z;
}

// Reduce v against an echelon basis so every pivot coordinate lands in [0, pivot).
inline Vec echelon_reduce(const Matrix& H, const std::vector<std::size_t>& piv, Vec v) {
  for (std::size_t i = 0; i < H.rows(); ++i) {
    const std::size_t c = piv[i];
    Int q = div_floor(v[c], H(i, c));
    if (q != 0)
      for (std::size_t j = c; j < H.cols(); ++j) v[j] -= q * H(i, j);
  }
  return v;
}

}  // namespace detail

// Subgroup of an FgGroup, stored as the Hermite basis of its full preimage in Z^{r+k}.
class Subgroup {
 public:
  Subgroup() = default;

  // Lattice generated by `rows` together with the relations of `g`.
  static Subgroup from_lattice(const FgGroup& g, const Matrix& rows) {
    if (rows.rows() && rows.cols() != g.dim()) throw DimensionMismatch("subgroup lattice width differs from ambient dimension");
    Subgroup s;
    s.ambient_ = g;
    Matrix all = rows.rows() ? vstack(rows, g.relations()) : g.relations();
    if (all.cols() != g.dim()) all = Matrix(0, g.dim());
    s.basis_ = hermite_basis(all);
    s.pivots_ = detail::echelon_pivots(s.basis_);
    return s;
  }

  static Subgroup generated(const FgGroup& g, const std::vector<Vec>& gens) {
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (gens[i].size() != g.dim())
        throw DimensionMismatch("generator " + std::to_string(i) + " has length " + std::to_string(gens[i].size()) +
                                ", ambient dimension is " + std::to_string(g.dim()));
    Subgroup s = from_lattice(g, gens.empty() ? Matrix(0, g.dim()) : Matrix::from_rows(gens, g.dim()));
    for (const auto& x : gens)
      if (!s.contains(x)) throw CertificateFailure("generator not contained in canonical subgroup");
    return s;
  }
  static Subgroup trivial(const FgGroup& g) { return from_lattice(g, Matrix(0, g.dim())); }
  static Subgroup whole(const FgGroup& g) { return from_lattice(g, Matrix::identity(g.dim())); }

  const FgGroup& ambient() const { return ambient_; }
  const Matrix& lattice() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  std::size_t lattice_rank() const { return basis_.rows(); }

  bool contains(const Vec& x) const {
    ambient_.check_dim(x);
    return detail::echelon_coords(basis_, pivots_, x).has_value();
  }
  bool contains(const Subgroup& other) const {
    check_same(other);
    for (std::size_t i = 0; i < other.basis_.rows(); ++i)
      if (!detail::echelon_coords(basis_, pivots_, other.basis_.row(i))) return false;
    return true;
  }
  bool is_trivial() const { return lattice_rank() == ambient_.torsion_rank() && *this == trivial(ambient_); }
  bool is_whole() const {
    if (lattice_rank() != ambient_.dim()) return false;
    for (std::size_t i = 0; i < basis_.rows(); ++i)
      if (basis_(i, i) != 1) return false;
    return true;
  }

  // Reduced, nonzero generators of the subgroup taken from the lattice rows.
  std::vector<Vec> generators() const {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < basis_.rows(); ++i) {
      Vec v = ambient_.reduce(basis_.row_vec(i));
      if (!ambient_.is_zero(v)) out.push_back(std::move(v));
    }
    return out;
  }

  // Canonical representative of the coset x + H.
  Vec reduce(const Vec& x) const { return ambient_.reduce(detail::echelon_reduce(basis_, pivots_, x)); }

  // [G : H], or nullopt when infinite.
  std::optional<Int> index() const {
    if (lattice_rank() != ambient_.dim()) return std::nullopt;
    Int p = 1;
    for (std::size_t i = 0; i < basis_.rows(); ++i) p *= basis_(i, i);
    return p;
  }

  // |H|, or nullopt when infinite.
  std::optional<Int> order() const {
    if (lattice_rank() != ambient_.torsion_rank()) return std::nullopt;
    Int p = 1;
    for (std::size_t i = 0; i < basis_.rows(); ++i) p *= basis_(i, pivots_[i]);
    return ambient_.torsion_order() / p;
  }

  // Rank of H as an abelian group (rank of the free quotient).
  std::size_t free_rank() const { return lattice_rank() - ambient_.torsion_rank(); }

  void check_same(const Subgroup& other) const {
    if (!(ambient_ == other.ambient_)) throw AmbientMismatch("subgroups live in different groups");
  }

  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.ambient_ == b.ambient_ && a.basis_ == b.basis_; }

 private:
  FgGroup ambient_;
  Matrix basis_;
  std::vector<std::size_t> pivots_;
};

enum class CombineOp { Sum, Intersect, Saturate };

inline Subgroup subgroup_sum(const Subgroup& a, const Subgroup& b) {
  a.check_same(b);
  return Subgroup::from_lattice(a.ambient(), vstack(a.lattice(), b.lattice()));
}

inline Subgroup subgroup_intersect(const Subgroup& a, const Subgroup& b) {
  a.check_same(b);
  const Matrix& A = a.lattice();
  Matrix K = left_kernel(vstack(A, b.lattice()));
  Matrix rows(0, A.cols());
  for (std::size_t i = 0; i < K.rows(); ++i) {
    Vec y(K.row(i).begin(), K.row(i).begin() + static_cast<std::ptrdiff_t>(A.rows()));
    rows.append_row(vec_mul(y, A));
  }
  return Subgroup::from_lattice(a.ambient(), rows);
}

inline Subgroup subgroup_saturate(const Subgroup& a) {
  const std::size_t n = a.ambient().dim();
  Matrix K = right_kernel(a.lattice().rows() ? a.lattice() : Matrix(0, n));
  if (a.lattice().rows() == 0) K = Matrix::identity(n);
  Matrix sat = K.rows() ? left_kernel(K.transpose()) : Matrix::identity(n);
  return Subgroup::from_lattice(a.ambient(), sat);
}

inline Subgroup subgroup_combine(CombineOp op, const Subgroup& a, const std::optional<Subgroup>& b = std::nullopt) {
  switch (op) {
    case CombineOp::Sum:
      if (!b) throw Error("Sum needs two subgroups");
      return subgroup_sum(a, *b);
    case CombineOp::Intersect:
      if (!b) throw Error("Intersect needs two subgroups");
      return subgroup_intersect(a, *b);
    case CombineOp::Saturate:
      return subgroup_saturate(a);
  }
  throw Error("unknown combine op");
}

// Image of a lattice under a homomorphism given by its lift M (target dim x source dim).
inline Subgroup lattice_image(const Matrix& M, const Subgroup& h, const FgGroup& target) {
  if (M.cols() != h.ambient().dim() || M.rows() != target.dim()) throw DimensionMismatch("image: shape");
  return Subgroup::from_lattice(target, h.lattice().rows() ? h.lattice() * M.transpose() : Matrix(0, target.dim()));
}

// Preimage {x : M x in h} of a subgroup of the target.
inline Subgroup lattice_preimage(const Matrix& M, const FgGroup& source, const Subgroup& h) {
  if (M.rows() != h.ambient().dim() || M.cols() != source.dim()) throw DimensionMismatch("preimage: shape");
  const std::size_t n = source.dim();
  Matrix K = left_kernel(vstack(M.transpose(), h.lattice()));
  if (M.cols() == 0) return Subgroup::trivial(source);
  Matrix rows(0, n);
  for (std::size_t i = 0; i < K.rows(); ++i) {
    Vec v(K.row(i).begin(), K.row(i).begin() + static_cast<std::ptrdiff_t>(n));
    rows.append_row(v);
  }
  if (h.lattice().rows() == 0 && M.rows() == 0) rows = Matrix::identity(n);
  return Subgroup::from_lattice(source, rows);
}

enum class TransportMode { Image, Preimage };

inline Subgroup subgroup_transport(TransportMode mode, const Endomorphism& phi, const Subgroup& h) {
  if (!(phi.group() == h.ambient())) throw AmbientMismatch("transport: subgroup not in the domain of the endomorphism");
  if (mode == TransportMode::Image) return lattice_image(phi.lift(), h, phi.group());
  return lattice_preimage(phi.lift(), phi.group(), h);
}

inline Subgroup image(const Endomorphism& phi, const Subgroup& h) { return subgroup_transport(TransportMode::Image, phi, h); }
inline Subgroup preimage(const Endomorphism& phi, const Subgroup& h) {
  return subgroup_transport(TransportMode::Preimage, phi, h);
}
inline Subgroup kernel(const Endomorphism& phi) { return preimage(phi, Subgroup::trivial(phi.group())); }
inline Subgroup image(const Endomorphism& phi) { return image(phi, Subgroup::whole(phi.group())); }

// Solves phi(x) = b inside an optional constraint subgroup; answers are canonical modulo the kernel.
class PreimageSolver {
 public:
  PreimageSolver(const Endomorphism& phi, std::optional<Subgroup> constraint = std::nullopt)
      : phi_(phi), constraint_(constraint ? *constraint : Subgroup::whole(phi.group())) {
    if (!(constraint_.ambient() == phi.group())) throw AmbientMismatch("solve_preimage: constraint in a different group");
    const FgGroup& g = phi.group();
    const Matrix& B = constraint_.lattice();
    Matrix imgs = B.rows() ? B * phi.lift().transpose() : Matrix(0, g.dim());
    system_ = hermite(vstack(imgs, g.relations()).rows() ? vstack(imgs, g.relations()) : Matrix(0, g.dim()), true);
    nb_ = B.rows();
    kernel_ = subgroup_intersect(preimage(phi, Subgroup::trivial(g)), constraint_);
  }

  std::optional<Vec> solve(const Vec& b) const {
    const FgGroup& g = phi_.group();
    g.check_dim(b);
    if (system_.H.rows() == 0) {
      if (g.is_zero(b)) return g.zero();
      return std::nullopt;
    }
    auto y = solve_left(system_, b);
    if (!y) return std::nullopt;
    Vec coeff(y->begin(), y->begin() + static_cast<std::ptrdiff_t>(nb_));
    Vec x = nb_ ? vec_mul(coeff, constraint_.lattice()) : g.zero();
    x = kernel_.reduce(x);
    if (phi_.apply(x) != g.reduce(b)) throw CertificateFailure("solve_preimage: solution failed re-check");
    return x;
  }

  const Subgroup& kernel() const { return kernel_; }
  const Subgroup& constraint() const { return constraint_; }

 private:
  Endomorphism phi_;
  Subgroup constraint_;
  HermiteResult system_;
  std::size_t nb_ = 0;
  Subgroup kernel_;
};

inline std::optional<Vec> solve_preimage(const Endomorphism& phi, const Vec& b,
                                         const std::optional<Subgroup>& constraint = std::nullopt) {
  return PreimageSolver(phi, constraint).solve(b);
}

// Subquotient L1/L2 of Z^n written in invariant-factor form.
struct Presentation {
  FgGroup group;
  Matrix generators;  // row i: lift in Z^n of the i-th generator of `group`
  Matrix to_coords;   // maps B1-coordinates c to the y-coordinates (all of them, before dropping)
  Matrix l1_basis;
  HermiteResult l1_hermite;
  std::vector<std::size_t> kept;  // y-coordinate index for each generator
  std::vector<Int> moduli;        // 0 for free coordinates

  // Coordinates in `group` of a vector of L1.
  Vec coords(std::span<const Int> x) const {
    auto c = detail::echelon_coords(l1_hermite.H, l1_hermite.pivots, x);
    if (!c) throw Error("presentation: vector not in the numerator lattice");
    Vec y = vec_mul(*c, to_coords);
    Vec out(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) out[i] = y[kept[i]];
    return group.reduce(std::move(out));
  }

  // A lift in Z^n of an element of `group`.
  Vec lift(std::span<const Int> y) const {
    if (y.size() != generators.rows()) throw DimensionMismatch("presentation lift");
    return vec_mul(y, generators);
  }

  // Induced endomorphism of a lattice map M of Z^n that preserves L1 and L2.
  Endomorphism induced(const Matrix& M) const {
    const std::size_t d = group.dim();
    Matrix lift_m(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      Vec img = mat_apply(M, generators.row(j));
      Vec c = coords(img);
      for (std::size_t i = 0; i < d; ++i) lift_m(i, j) = c[i];
    }
    return Endomorphism::from_lift(group, lift_m);
  }
};

// Presentation of L1/L2 where L2 is contained in L1 (both given by row bases in Z^n).
inline Presentation present(const Matrix& L1rows, const Matrix& L2rows, std::size_t n) {
  Presentation p;
  p.l1_hermite = hermite(L1rows.rows() ? L1rows : Matrix(0, n), false);
  Matrix B1(0, n);
  for (std::size_t i = 0; i < p.l1_hermite.rank; ++i) B1.append_row(p.l1_hermite.H.row(i));
  p.l1_hermite.H = B1;
  p.l1_hermite.pivots.resize(p.l1_hermite.rank);
  p.l1_basis = B1;
  const std::size_t m = B1.rows();
  Matrix R(0, m);
  for (std::size_t i = 0; i < L2rows.rows(); ++i) {
    auto c = detail::echelon_coords(B1, p.l1_hermite.pivots, L2rows.row(i));
    if (!c) throw Error("presentation: denominator lattice not contained in numerator");
    R.append_row(*c);
  }
  if (m == 0) {
    p.group = FgGroup();
    p.generators = Matrix(0, n);
    p.to_coords = Matrix(0, 0);
    return p;
  }
  SmithResult s = R.rows() ? smith(R) : SmithResult{Matrix(0, 0), R, Matrix::identity(m)};
  // generators are the rows of V^{-1} B1
  Matrix Vinv = hermite(s.V, true).U;
  Matrix gens_all = Vinv * B1;
  p.to_coords = s.V;
  std::vector<std::size_t> free_idx, tors_idx;
  std::vector<Int> diag(m);
  for (std::size_t i = 0; i < m; ++i) diag[i] = (i < s.S.rows()) ? s.S(i, i) : Int(0);
  for (std::size_t i = 0; i < m; ++i) {
    if (diag[i] == 1) continue;
    (diag[i] == 0 ? free_idx : tors_idx).push_back(i);
  }
  std::stable_sort(tors_idx.begin(), tors_idx.end(), [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
  std::vector<Int> torsion;
  for (auto i : free_idx) p.kept.push_back(i), p.moduli.push_back(0);
  for (auto i : tors_idx) p.kept.push_back(i), p.moduli.push_back(diag[i]), torsion.push_back(diag[i]);
  p.group = FgGroup(free_idx.size(), torsion);
  p.generators = Matrix(0, n);
  for (auto i : p.kept) p.generators.append_row(gens_all.row(i));
  return p;
}

// Presentation of a subgroup H of G as an abstract group.
inline Presentation present_subgroup(const Subgroup& h) {
  return present(h.lattice(), h.ambient().relations(), h.ambient().dim());
}

// Presentation of G / H.
inline Presentation present_quotient(const Subgroup& h) {
  const std::size_t n = h.ambient().dim();
  return present(Matrix::identity(n), h.lattice(), n);
}

struct Restriction {
  Presentation pres;
  Endomorphism endo;
};

// phi restricted to an invariant subgroup, as an endomorphism of the presented group.
inline Restriction restrict_to(const Endomorphism& phi, const Subgroup& h) {
  if (!h.contains(image(phi, h))) throw Error("restrict_to: subgroup is not invariant");
  Presentation p = present_subgroup(h);
  Endomorphism e = p.induced(phi.lift());
  return {std::move(p), std::move(e)};
}

// Map induced on G / H for an invariant H.
inline Restriction induced_quotient(const Endomorphism& phi, const Subgroup& h) {
  if (!h.contains(image(phi, h))) throw Error("induced_quotient: subgroup is not invariant");
  Presentation p = present_quotient(h);
  Endomorphism e = p.induced(phi.lift());
  return {std::move(p), std::move(e)};
}

// Direct sum G1 + G2 rewritten in invariant-factor form, with phi1 x phi2.
struct DirectSum {
  Presentation pres;  // of Z^{n1+n2} / (L0_1 + L0_2)
  Endomorphism endo;
  std::size_t n1 = 0, n2 = 0;

  // Element of the sum from a pair of elements.
  Vec embed(const Vec& x1, const Vec& x2) const {
    Vec v = x1;
    v.insert(v.end(), x2.begin(), x2.end());
    return pres.coords(v);
  }
};

inline DirectSum direct_sum(const Endomorphism& f1, const Endomorphism& f2) {
  const FgGroup &g1 = f1.group(), &g2 = f2.group();
  const std::size_t n1 = g1.dim(), n2 = g2.dim(), n = n1 + n2;
  Matrix rel(0, n);
  for (std::size_t i = 0; i < g1.torsion_rank(); ++i) {
    Vec v(n);
    v[g1.free_rank + i] = g1.torsion[i];
    rel.append_row(v);
  }
  for (std::size_t i = 0; i < g2.torsion_rank(); ++i) {
    Vec v(n);
    v[n1 + g2.free_rank + i] = g2.torsion[i];
    rel.append_row(v);
  }
  Matrix M(n, n);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) M(i, j) = f1.lift()(i, j);
  for (std::size_t i = 0; i < n2; ++i)
    for (std::size_t j = 0; j < n2; ++j) M(n1 + i, n1 + j) = f2.lift()(i, j);
  Presentation p = present(Matrix::identity(n), rel, n);
  Endomorphism e = p.induced(M);
  return {std::move(p), std::move(e), n1, n2};
}

}  // namespace stringdyn
