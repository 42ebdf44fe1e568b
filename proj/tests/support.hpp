#pragma once

// Random corpora and brute-force oracles shared by the unit tests and the acceptance binary.

#include "stringdyn/strings.hpp"

#include <random>
#include <set>

namespace testkit {

using namespace stringdyn;

using Rng = std::mt19937_64;

inline long long uniform(Rng& rng, long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng); }

// Torsion chains with factors from {2, 3, 4, 9}.
inline std::vector<Int> random_chain(Rng& rng, std::size_t max_len) {
  static const std::vector<std::vector<int>> chains = {
      {}, {2}, {3}, {4}, {9}, {2, 2}, {2, 4}, {4, 4}, {3, 3}, {3, 9}, {9, 9}, {2, 2, 4}, {3, 3, 9}};
  for (;;) {
    const auto& c = chains[static_cast<std::size_t>(uniform(rng, 0, static_cast<long long>(chains.size()) - 1))];
    if (c.size() <= max_len) return std::vector<Int>(c.begin(), c.end());
  }
}

inline FgGroup random_group(Rng& rng, std::size_t max_rank = 4) {
  const std::size_t r = static_cast<std::size_t>(uniform(rng, 0, static_cast<long long>(max_rank)));
  std::size_t room = 4 - std::min<std::size_t>(r, 4);
  return FgGroup(r, random_chain(rng, std::max<std::size_t>(room, 1)));
}

// A, C, D with entries in [-5, 5]; D entries are scaled so every block is well defined.
inline Endomorphism random_endo(const FgGroup& g, Rng& rng, long long bound = 5) {
  const std::size_t r = g.free_rank, k = g.torsion_rank();
  Matrix A(r, r), C(k, r), D(k, k);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) A(i, j) = uniform(rng, -bound, bound);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < r; ++j) C(i, j) = uniform(rng, -bound, bound);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      const Int step = g.torsion[j] / gcd_int(g.torsion[i], g.torsion[j]);
      D(j, i) = step * uniform(rng, -bound, bound);
    }
  return Endomorphism(g, A, C, D);
}

// Automorphism P: unimodular on the free part, unit scalings on the cyclic factors. Returns (P, P^-1).
inline std::pair<Endomorphism, Endomorphism> random_automorphism(const FgGroup& g, Rng& rng) {
  const std::size_t r = g.free_rank, n = g.dim();
  Matrix U = Matrix::identity(n), V = Matrix::identity(n);
  for (int step = 0; step < 6 && r >= 2; ++step) {
    std::size_t a = static_cast<std::size_t>(uniform(rng, 0, static_cast<long long>(r) - 1));
    std::size_t b = static_cast<std::size_t>(uniform(rng, 0, static_cast<long long>(r) - 2));
    if (b >= a) ++b;
    const Int q = uniform(rng, -2, 2);
    // U <- E U with E = I + q e_a e_b^T; V <- V E^-1
    for (std::size_t c = 0; c < n; ++c) U(a, c) += q * U(b, c);
    for (std::size_t c = 0; c < n; ++c) V(c, b) -= q * V(c, a);
  }
  if (r >= 1 && uniform(rng, 0, 1)) {
    for (std::size_t c = 0; c < n; ++c) U(0, c) = -U(0, c);
    for (std::size_t c = 0; c < n; ++c) V(c, 0) = -V(c, 0);
  }
  for (std::size_t i = 0; i < g.torsion_rank(); ++i) {
    const Int& d = g.torsion[i];
    std::vector<Int> units;
    for (Int u = 1; u < d; ++u)
      if (gcd_int(u, d) == 1) units.push_back(u);
    const Int u = units[static_cast<std::size_t>(uniform(rng, 0, static_cast<long long>(units.size()) - 1))];
    U(r + i, r + i) = u;
    V(r + i, r + i) = inv_mod(u, d);
  }
  return {Endomorphism::from_lift(g, U), Endomorphism::from_lift(g, V)};
}

// Subgroup spanned by the orbit of x; invariant by Cayley-Hamilton on the lift.
inline Subgroup orbit_span(const Endomorphism& phi, const Vec& x) {
  std::vector<Vec> gens{x};
  for (std::size_t i = 1; i <= phi.group().dim(); ++i) gens.push_back(phi.apply(gens.back()));
  return Subgroup::generated(phi.group(), gens);
}

inline Vec random_element(const FgGroup& g, Rng& rng, long long bound = 3) {
  Vec v(g.dim());
  for (auto& x : v) x = uniform(rng, -bound, bound);
  return g.reduce(v);
}

// ---------------------------------------------------------------- finite-group oracle

// Elements of a finite group as residue vectors, element maps computed straight from the D block.
struct FiniteOracle {
  std::vector<Int> d;
  std::vector<std::vector<long long>> elems;
  std::vector<std::size_t> f;  // index of phi(elems[i])
  std::size_t zero = 0;

  std::size_t index_of(const std::vector<long long>& v) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < d.size(); ++i) idx = idx * d[i].convert_to<std::size_t>() + static_cast<std::size_t>(v[i]);
    return idx;
  }

  explicit FiniteOracle(const Endomorphism& phi) : d(phi.group().torsion) {
    const std::size_t k = d.size();
    std::size_t total = 1;
    for (const auto& di : d) total *= di.convert_to<std::size_t>();
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<long long> v(k);
      std::size_t rest = idx;
      for (std::size_t i = k; i-- > 0;) {
        const std::size_t di = d[i].convert_to<std::size_t>();
        v[i] = static_cast<long long>(rest % di);
        rest /= di;
      }
      elems.push_back(std::move(v));
    }
    const Matrix& D = phi.D();
    for (const auto& x : elems) {
      std::vector<long long> y(k, 0);
      for (std::size_t j = 0; j < k; ++j) {
        Int s = 0;
        for (std::size_t i = 0; i < k; ++i) s += D(j, i) * x[i];
        y[j] = mod_floor(s, d[j]).convert_to<long long>();
      }
      f.push_back(index_of(y));
    }
  }

  std::size_t size() const { return elems.size(); }

  std::size_t iterate(std::size_t x, std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i) x = f[x];
    return x;
  }

  std::set<std::size_t> per() const {
    std::set<std::size_t> out;
    for (std::size_t x = 0; x < size(); ++x) {
      std::size_t y = f[x];
      for (std::size_t n = 1; n <= size(); ++n, y = f[y])
        if (y == x) {
          out.insert(x);
          break;
        }
    }
    return out;
  }

  std::set<std::size_t> hyperkernel() const {
    std::set<std::size_t> out;
    for (std::size_t x = 0; x < size(); ++x)
      if (iterate(x, size()) == zero) out.insert(x);
    return out;
  }

  // phi^n(x) = phi^m(x) for some n < m
  std::set<std::size_t> qper() const {
    std::set<std::size_t> out;
    for (std::size_t x = 0; x < size(); ++x) {
      std::vector<std::size_t> seen(size(), SIZE_MAX);
      std::size_t y = x;
      for (std::size_t n = 0; n <= size(); ++n, y = f[y]) {
        if (seen[y] != SIZE_MAX) {
          out.insert(x);
          break;
        }
        seen[y] = n;
      }
    }
    return out;
  }

  // intersection of the image chain
  std::set<std::size_t> surjective_core() const {
    std::set<std::size_t> cur;
    for (std::size_t x = 0; x < size(); ++x) cur.insert(x);
    for (;;) {
      std::set<std::size_t> next;
      for (auto x : cur) next.insert(f[x]);
      if (next == cur) return cur;
      cur = std::move(next);
    }
  }

  std::set<std::size_t> members(const Subgroup& h) const {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) {
      Vec v(elems[i].begin(), elems[i].end());
      if (h.contains(v)) out.insert(i);
    }
    return out;
  }
};

// Random invariant-factor chain with product at most max_order.
inline FgGroup random_finite_group(Rng& rng, const Int& max_order = 512) {
  for (;;) {
    const std::size_t k = static_cast<std::size_t>(uniform(rng, 1, 3));
    std::vector<Int> ds;
    Int prod = 1;
    Int last = 1;
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      Int d = i == 0 ? Int(uniform(rng, 2, 16)) : last * uniform(rng, 1, 4);
      prod *= d;
      ok = prod <= max_order;
      ds.push_back(d);
      last = d;
    }
    if (ok) return FgGroup(0, ds);
  }
}

// ---------------------------------------------------------------- verdict helpers

inline bool inf(const Verdict& v) { return v.value == VerdictValue::Infinite; }

inline bool two_valued(const VerdictTriple& t) {
  for (const Verdict* v : {&t.s, &t.ns, &t.s0})
    if (v->value == VerdictValue::Unknown) return false;
  return true;
}

inline bool same_values(const VerdictTriple& a, const VerdictTriple& b) {
  return a.s.value == b.s.value && a.ns.value == b.ns.value && a.s0.value == b.s0.value;
}

// Each law returns an empty string on success and a description on failure.
struct LawReport {
  std::vector<std::string> failures;
  std::size_t checks = 0;
  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
};

// The verdict laws exercised on one random endomorphism.
inline void check_laws(const Endomorphism& phi, Rng& rng, LawReport& rep, const std::string& tag) {
  const FgGroup& g = phi.group();
  DynamicalProfile prof = dynamical_profile(phi);
  const VerdictTriple t = string_verdicts(prof);
  rep.check(prof.all_certified(), tag + ": profile certificates");
  rep.check(two_valued(t), tag + ": dichotomy");
  rep.check(sum_law_holds(t), tag + ": sum law");
  rep.check(!inf(t.s0), tag + ": s0 on a finitely generated group");
  if (kernel(phi).is_trivial()) {
    rep.check(!inf(t.s0), tag + ": injective s0");
    rep.check(t.s.value == t.ns.value, tag + ": injective s = ns");
  }
  for (int k = 2; k <= 4; ++k)
    rep.check(same_values(string_verdicts(phi.power(k)), t), tag + ": power law k=" + std::to_string(k));
  auto [P, Pinv] = random_automorphism(g, rng);
  rep.check(P.compose(Pinv).is_identity(), tag + ": automorphism inverse");
  rep.check(same_values(string_verdicts(P.compose(phi).compose(Pinv)), t), tag + ": conjugation");
  Endomorphism psi = random_endo(random_group(rng, 2), rng);
  DirectSum ds = direct_sum(phi, psi);
  const VerdictTriple u = string_verdicts(psi), w = string_verdicts(ds.endo);
  rep.check(inf(w.s) == (inf(t.s) || inf(u.s)) && inf(w.ns) == (inf(t.ns) || inf(u.ns)) &&
                inf(w.s0) == (inf(t.s0) || inf(u.s0)),
            tag + ": product law");
  std::vector<Subgroup> hs = {orbit_span(phi, random_element(g, rng)), image(phi), kernel(phi), prof.per, prof.surjective_core};
  const bool surjective = image(phi).is_whole();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const Subgroup& H = hs[i];
    rep.check(H.contains(image(phi, H)), tag + ": invariant subgroup " + std::to_string(i));
    const VerdictTriple r = string_verdicts(restrict_to(phi, H).endo);
    rep.check((!inf(r.s) || inf(t.s)) && (!inf(r.ns) || inf(t.ns)) && (!inf(r.s0) || inf(t.s0)),
              tag + ": restriction monotonicity " + std::to_string(i));
    if (surjective) {
      const VerdictTriple q = string_verdicts(induced_quotient(phi, H).endo);
      rep.check((!inf(q.s) || inf(t.s)) && (!inf(q.ns) || inf(t.ns)), tag + ": quotient monotonicity " + std::to_string(i));
    }
  }
}

}  // namespace testkit
