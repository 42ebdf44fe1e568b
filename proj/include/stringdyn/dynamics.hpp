#pragma once

#include "stringdyn/poly.hpp"
#include "stringdyn/subgroup.hpp"

#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stringdyn {

// Iteration cap for ascending/descending chains; STRINGDYN_MAX_ITER overrides it.
inline std::size_t max_iterations(const FgGroup& g) {
  if (const char* env = std::getenv("STRINGDYN_MAX_ITER")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  std::size_t base = 10 * (g.dim() + 1);
  std::size_t chain = g.free_rank + 2 * msb_len(g.torsion_order()) + 2;
  return std::max(base, chain);
}

struct HyperkernelResult {
  Subgroup subgroup;
  std::size_t index = 0;  // least n with ker(phi^n) = ker(phi^{n+1})
};

inline HyperkernelResult hyperkernel_ext(const Endomorphism& phi) {
  const std::size_t cap = max_iterations(phi.group());
  Subgroup cur = Subgroup::trivial(phi.group());
  for (std::size_t n = 0; n <= cap; ++n) {
    Subgroup next = preimage(phi, cur);
    if (next == cur) return {cur, n};
    cur = std::move(next);
  }
  throw BoundExhausted("hyperkernel: chain did not stabilize within " + std::to_string(cap) + " steps");
}

inline Subgroup hyperkernel(const Endomorphism& phi) { return hyperkernel_ext(phi).subgroup; }

namespace detail {

inline Poly cyclotomic(unsigned m) {
  Poly p(m + 1);
  p[0] = -1;
  p[m] = 1;
  for (unsigned d = 1; d < m; ++d)
    if (m % d == 0) p = *poly_divide_exact(p, cyclotomic(d));
  return p;
}

// Subgroup of G whose free coordinates lie in the saturated lattice W (rows), torsion arbitrary.
inline Subgroup free_preimage(const FgGroup& g, const Matrix& W) {
  Matrix rows(0, g.dim());
  for (std::size_t i = 0; i < W.rows(); ++i) {
    Vec v(g.dim());
    for (std::size_t j = 0; j < g.free_rank; ++j) v[j] = W(i, j);
    rows.append_row(v);
  }
  for (std::size_t i = 0; i < g.torsion_rank(); ++i) rows.append_row(g.basis_vector(g.free_rank + i));
  return Subgroup::from_lattice(g, rows);
}

// Push a subgroup of a presented group back into the ambient group.
inline Subgroup push_forward(const Presentation& p, const Subgroup& h, const FgGroup& ambient) {
  Matrix rows = h.lattice().rows() ? h.lattice() * p.generators : Matrix(0, ambient.dim());
  return Subgroup::from_lattice(ambient, rows);
}

// Pull a subgroup of the ambient (contained in the presented numerator) into presentation coordinates.
inline Subgroup pull_back(const Presentation& p, const Subgroup& h) {
  Matrix rows(0, p.group.dim());
  for (std::size_t i = 0; i < h.lattice().rows(); ++i) rows.append_row(p.coords(h.lattice().row(i)));
  return Subgroup::from_lattice(p.group, rows);
}

inline Int free_period_bound(std::size_t r) {
  Int L = 1;
  for (unsigned n = 1; r > 0 && n <= 2 * r * r + 6; ++n)
    if (euler_phi(n) <= r) L = lcm_int(L, n);
  return L;
}

// Every cycle length of an affine map on a fibre of size |T_p| divides lcm(1..|T_p|).
inline std::map<Int, unsigned> torsion_period_bound(const FgGroup& g) {
  std::map<Int, unsigned> f;
  if (g.torsion.empty()) return f;
  std::map<Int, unsigned> prime_exp;
  for (const auto& d : g.torsion)
    for (const auto& pp : factorize(d)) prime_exp[pp.prime] += pp.exponent;
  for (const auto& [p, e] : prime_exp) {
    Int size = pow_int(p, e);
    if (size > (Int(1) << 16)) throw BoundExhausted("periodic_subgroup: torsion primary part exceeds 2^16 elements");
    const unsigned n = static_cast<unsigned>(to_u64(size));
    for (unsigned q : primes_up_to(n)) {
      unsigned k = 0;
      for (unsigned long long qk = q; qk <= n; qk *= q) ++k;
      f[Int(q)] = std::max(f[Int(q)], k);
    }
  }
  return f;
}

inline Int from_factorization(const std::map<Int, unsigned>& f) {
  Int m = 1;
  for (const auto& [p, e] : f) m *= pow_int(p, e);
  return m;
}

}  // namespace detail

// Kernel of A^L - I on the free part, computed through the cyclotomic factors of the characteristic polynomial.
inline Matrix free_periodic_lattice(const Matrix& A, Int* period_out = nullptr) {
  const std::size_t r = A.rows();
  if (r == 0) {
    if (period_out) *period_out = 1;
    return Matrix(0, 0);
  }
  const Int L = detail::free_period_bound(r);
  Poly chi = charpoly(A);
  Poly g{1};
  for (unsigned m = 1; Int(m) <= L; ++m) {
    if (L % m != 0 || euler_phi(m) > r) continue;
    Poly c = detail::cyclotomic(m);
    if (poly_divide_exact(chi, c)) g = poly_mul(g, c);
  }
  Matrix W = right_kernel(poly_eval_matrix(g, A));
  // check A^L w = w for each basis vector
  for (std::size_t i = 0; i < W.rows(); ++i) {
    Vec w = W.row_vec(i);
    Vec x = w;
    for (Int j = 0; j < L; ++j) x = mat_apply(A, x);
    if (x != w) throw CertificateFailure("free periodic lattice: A^L fixes a basis vector only up to error");
  }
  if (period_out) *period_out = L;
  return W;
}

struct PeriodicData {
  Subgroup per;
  Int free_period = 1;           // L
  std::map<Int, unsigned> torsion_bound;  // factorization of M'
};

inline PeriodicData periodic_subgroup_ext(const Endomorphism& phi) {
  const FgGroup& g = phi.group();
  PeriodicData out;
  Matrix W = free_periodic_lattice(phi.A(), &out.free_period);
  Subgroup P0 = detail::free_preimage(g, W);
  Restriction rho = restrict_to(phi, P0);
  Endomorphism psi = rho.endo.power(out.free_period);
  // free block of psi is the identity on P0
  for (std::size_t i = 0; i < psi.A().rows(); ++i)
    for (std::size_t j = 0; j < psi.A().cols(); ++j)
      if (psi.A()(i, j) != (i == j ? 1 : 0)) throw CertificateFailure("periodic_subgroup: free block of phi^L is not the identity");
  out.torsion_bound = detail::torsion_period_bound(rho.pres.group);
  const Int M = detail::from_factorization(out.torsion_bound);
  Endomorphism pm = psi.power(M);
  Subgroup k1 = kernel(pm.minus_identity());
  Subgroup k2 = kernel(pm.compose(pm).minus_identity());
  if (!(k1 == k2)) throw BoundExhausted("periodic_subgroup: ker(phi^M - 1) != ker(phi^2M - 1)");
  out.per = detail::push_forward(rho.pres, k1, g);
  return out;
}

inline Subgroup periodic_subgroup(const Endomorphism& phi) { return periodic_subgroup_ext(phi).per; }

inline Subgroup quasiperiodic_subgroup(const Endomorphism& phi) {
  return subgroup_sum(periodic_subgroup(phi), hyperkernel(phi));
}

struct SurjectiveCoreResult {
  Subgroup core;
  Poly unit_part;   // g with W = ker g(A)
  std::size_t steps = 0;
};

inline SurjectiveCoreResult surjective_core_ext(const Endomorphism& phi) {
  const FgGroup& g = phi.group();
  SurjectiveCoreResult res;
  Matrix W(0, g.free_rank);
  if (g.free_rank) {
    res.unit_part = unit_constant_part(charpoly(phi.A()));
    W = right_kernel(poly_eval_matrix(res.unit_part, phi.A()));
  } else {
    res.unit_part = {1};
  }
  Subgroup cur = detail::free_preimage(g, W);
  const std::size_t cap = max_iterations(g);
  for (std::size_t n = 0; n <= cap; ++n) {
    Subgroup next = image(phi, cur);
    if (next == cur) {
      res.core = std::move(cur);
      res.steps = n;
      if (!(image(phi, res.core) == res.core)) throw CertificateFailure("surjective_core: phi(S) != S");
      return res;
    }
    if (!cur.contains(next)) throw CertificateFailure("surjective_core: image chain not decreasing");
    cur = std::move(next);
  }
  throw BoundExhausted("surjective_core: image chain did not stabilize within " + std::to_string(cap) + " steps");
}

inline Subgroup surjective_core(const Endomorphism& phi) { return surjective_core_ext(phi).core; }

struct Periodic {
  Int n;
};
struct QuasiPeriodic {
  Int n, m;
};
struct Neither {};
using Periodicity = std::variant<Periodic, QuasiPeriodic, Neither>;

inline std::string periodicity_str(const Periodicity& p) {
  if (auto* a = std::get_if<Periodic>(&p)) return "Periodic(" + a->n.str() + ")";
  if (auto* b = std::get_if<QuasiPeriodic>(&p)) return "QuasiPeriodic(" + b->n.str() + "," + b->m.str() + ")";
  return "Neither";
}

namespace detail {

// Order of an endomorphism known to be an automorphism of finite order dividing `bound` (given factored).
inline Int automorphism_order(const Endomorphism& rho, std::map<Int, unsigned> bound) {
  // short orbits first
  Endomorphism cur = rho;
  for (unsigned j = 1; j <= 4096; ++j) {
    if (cur.is_identity()) return j;
    cur = cur.compose(rho);
  }
  Int M = from_factorization(bound);
  if (!rho.power(M).is_identity()) throw CertificateFailure("automorphism_order: bound is not a multiple of the order");
  for (auto& [p, e] : bound) {
    while (e > 0) {
      Int trial = M / p;
      if (!rho.power(trial).is_identity()) break;
      M = trial;
      --e;
    }
  }
  return M;
}

}  // namespace detail

inline Periodicity classify_periodicity(const Endomorphism& phi, const Subgroup* per_hint = nullptr) {
  const FgGroup& g = phi.group();
  HyperkernelResult hk = hyperkernel_ext(phi);
  Subgroup I = Subgroup::whole(g);
  for (std::size_t i = 0; i < hk.index; ++i) I = image(phi, I);
  PeriodicData pd;
  Subgroup per = per_hint ? *per_hint : (pd = periodic_subgroup_ext(phi)).per;
  if (!per.contains(I)) return Neither{};
  Restriction rho = restrict_to(phi, I);
  std::map<Int, unsigned> bound = detail::torsion_period_bound(rho.pres.group);
  for (const auto& pp : factorize(detail::free_period_bound(rho.pres.group.free_rank)))
    bound[pp.prime] += pp.exponent;
  Int p = detail::automorphism_order(rho.endo, bound);
  if (hk.index == 0) return Periodic{p};
  return QuasiPeriodic{Int(hk.index), Int(hk.index) + p};
}

struct Certificate {
  std::string name;
  bool ok = false;
};

struct DynamicalProfile {
  Subgroup per, qper, hyperkernel, surjective_core;
  std::size_t hyperkernel_index = 0;
  Periodicity classification;
  std::vector<Certificate> certificates;

  bool all_certified() const {
    for (const auto& c : certificates)
      if (!c.ok) return false;
    return true;
  }
};

inline DynamicalProfile dynamical_profile(const Endomorphism& phi) {
  DynamicalProfile p;
  p.per = periodic_subgroup(phi);
  HyperkernelResult hk = hyperkernel_ext(phi);
  p.hyperkernel = hk.subgroup;
  p.hyperkernel_index = hk.index;
  p.qper = subgroup_sum(p.per, p.hyperkernel);
  p.surjective_core = surjective_core(phi);
  p.classification = classify_periodicity(phi, &p.per);
  p.certificates.push_back({"per_subset_qper", p.qper.contains(p.per)});
  p.certificates.push_back({"qper_eq_per_plus_hyperkernel", p.qper == subgroup_sum(p.per, p.hyperkernel)});
  p.certificates.push_back({"phi_sc_eq_sc", image(phi, p.surjective_core) == p.surjective_core});
  p.certificates.push_back({"phi_per_subset_per", p.per.contains(image(phi, p.per))});
  p.certificates.push_back({"phi_hyperkernel_subset_hyperkernel", p.hyperkernel.contains(image(phi, p.hyperkernel))});
  p.certificates.push_back({"hyperkernel_stable", preimage(phi, p.hyperkernel) == p.hyperkernel});
  return p;
}

}  // namespace stringdyn
