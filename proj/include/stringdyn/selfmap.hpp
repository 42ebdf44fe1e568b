#pragma once

#include "stringdyn/fg_group.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stringdyn {

class WindowTooSmall : public Error {
 public:
  using Error::Error;
};

class NotFiniteToOne : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------- finite graphs

struct FunctionalGraph {
  std::size_t n = 0;
  std::vector<std::size_t> succ;

  void validate() const {
    if (succ.size() != n) throw ValidationError("succ", "expected " + std::to_string(n) + " entries");
    for (std::size_t i = 0; i < n; ++i)
      if (succ[i] >= n) throw ValidationError("succ[" + std::to_string(i) + "]", "target out of range");
  }
};

struct OrbitReport {
  std::vector<std::size_t> tail, cycle;  // per node
  std::vector<std::size_t> per, qper, sc;
  std::size_t image_steps = 0;
  unsigned string_number = 0;
};

inline OrbitReport analyze_finite(const FunctionalGraph& g) {
  g.validate();
  OrbitReport r;
  r.tail.assign(g.n, 0);
  r.cycle.assign(g.n, 0);
  // orbit walking; state 0 = new, 1 = on stack, 2 = done
  std::vector<int> state(g.n, 0);
  for (std::size_t s = 0; s < g.n; ++s) {
    if (state[s]) continue;
    std::vector<std::size_t> path;
    std::size_t x = s;
    while (state[x] == 0) {
      state[x] = 1;
      path.push_back(x);
      x = g.succ[x];
    }
    std::size_t i = path.size();
    if (state[x] == 1) {
      auto it = std::find(path.begin(), path.end(), x);
      const std::size_t start = static_cast<std::size_t>(it - path.begin());
      const std::size_t len = path.size() - start;
      for (std::size_t j = start; j < path.size(); ++j) {
        r.tail[path[j]] = 0;
        r.cycle[path[j]] = len;
        state[path[j]] = 2;
      }
      i = start;
    }
    for (std::size_t j = i; j-- > 0;) {
      const std::size_t y = path[j], z = g.succ[y];
      r.tail[y] = r.tail[z] + 1;
      r.cycle[y] = r.cycle[z];
      state[y] = 2;
    }
  }
  for (std::size_t x = 0; x < g.n; ++x) {
    r.qper.push_back(x);
    if (r.tail[x] == 0) r.per.push_back(x);
  }
  // image chain
  std::set<std::size_t> cur(r.qper.begin(), r.qper.end());
  while (true) {
    std::set<std::size_t> next;
    for (auto x : cur) next.insert(g.succ[x]);
    if (next == cur) break;
    cur = std::move(next);
    ++r.image_steps;
  }
  r.sc.assign(cur.begin(), cur.end());
  if (r.sc != r.per) throw CertificateFailure("analyze_finite: image chain limit differs from the cycle nodes");
  return r;
}

// ---------------------------------------------------------------- windowed maps

enum class Domain { N, Z };
enum class Builtin { None, Succ, PredFloor, ShiftZ };

inline std::string builtin_name(Builtin b) {
  switch (b) {
    case Builtin::None: return "none";
    case Builtin::Succ: return "succ";
    case Builtin::PredFloor: return "pred_floor";
    case Builtin::ShiftZ: return "shift_z";
  }
  return "?";
}

inline Builtin parse_builtin(const std::string& s) {
  if (s == "succ") return Builtin::Succ;
  if (s == "pred_floor") return Builtin::PredFloor;
  if (s == "shift_z") return Builtin::ShiftZ;
  throw ValidationError("builtin", "unknown built-in '" + s + "'");
}

struct AffineCase {
  long long a = 1, b = 0;
};

struct Preimages {
  std::vector<long long> finite;
  bool infinite = false;
};

struct WindowedMap {
  Domain domain = Domain::N;
  Builtin builtin = Builtin::None;
  long long mod = 1;
  std::vector<AffineCase> cases;  // indexed by residue
  long long lo = 0, hi = 0;       // inclusive window

  static WindowedMap make_builtin(Builtin b, long long lo, long long hi) {
    WindowedMap w;
    w.builtin = b;
    w.domain = b == Builtin::ShiftZ ? Domain::Z : Domain::N;
    w.lo = lo;
    w.hi = hi;
    w.validate();
    return w;
  }

  void validate() const {
    if (lo > hi) throw ValidationError("window", "lo > hi");
    if (domain == Domain::N && lo < 0) throw ValidationError("window", "window must lie in N");
    if (builtin == Builtin::ShiftZ && domain != Domain::Z) throw ValidationError("domain", "shift_z lives on Z");
    if ((builtin == Builtin::Succ || builtin == Builtin::PredFloor) && domain != Domain::N)
      throw ValidationError("domain", builtin_name(builtin) + " lives on N");
    if (builtin != Builtin::None) return;
    if (mod < 1) throw ValidationError("cases", "modulus must be positive");
    if (cases.size() != static_cast<std::size_t>(mod)) throw ValidationError("cases", "need one case per residue");
    if (domain == Domain::N)
      for (long long r = 0; r < mod; ++r) {
        const auto& c = cases[static_cast<std::size_t>(r)];
        if (c.a < 0 || c.a * r + c.b < 0)
          throw ValidationError("cases[" + std::to_string(r) + "]", "rule leaves N");
      }
  }

  bool in_domain(long long x) const { return domain == Domain::Z || x >= 0; }
  bool in_window(long long x) const { return x >= lo && x <= hi; }
  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }

  long long operator()(long long x) const {
    switch (builtin) {
      case Builtin::Succ: return x + 1;
      case Builtin::PredFloor: return std::max(x - 1, 0LL);
      case Builtin::ShiftZ: return x - 1;
      case Builtin::None: break;
    }
    long long r = ((x % mod) + mod) % mod;
    const auto& c = cases[static_cast<std::size_t>(r)];
    return c.a * x + c.b;
  }

  Preimages preimages(long long y) const {
    Preimages p;
    switch (builtin) {
      case Builtin::Succ:
        if (y >= 1) p.finite.push_back(y - 1);
        return p;
      case Builtin::PredFloor:
        if (y == 0) p.finite.push_back(0);
        p.finite.push_back(y + 1);
        return p;
      case Builtin::ShiftZ: p.finite.push_back(y + 1); return p;
      case Builtin::None: break;
    }
    for (long long r = 0; r < mod; ++r) {
      const auto& c = cases[static_cast<std::size_t>(r)];
      if (c.a == 0) {
        if (c.b == y) p.infinite = true;
        continue;
      }
      if ((y - c.b) % c.a != 0) continue;
      long long x = (y - c.b) / c.a;
      if (((x % mod) + mod) % mod == r && in_domain(x)) p.finite.push_back(x);
    }
    std::sort(p.finite.begin(), p.finite.end());
    return p;
  }

  bool finite_to_one() const {
    if (builtin != Builtin::None) return true;
    for (const auto& c : cases)
      if (c.a == 0) return false;
    return true;
  }

  // a preimage exists in the domain but outside the window
  bool escapes_backward(long long y) const {
    auto p = preimages(y);
    if (p.infinite) return true;
    for (auto x : p.finite)
      if (!in_window(x)) return true;
    return false;
  }
};

struct ChainReport {
  std::size_t bound = 0;
  std::size_t requested = 0;
  std::vector<std::vector<long long>> chains;  // x0, x1, ... (backward) or orbit order (forward)
  std::optional<std::size_t> exact;            // known value for built-ins
  bool consistent = true;
  bool budget_exhausted = false;
};

inline std::optional<std::size_t> exact_string_number(Builtin b) {
  switch (b) {
    case Builtin::Succ: return 0;
    case Builtin::PredFloor: return 1;
    case Builtin::ShiftZ: return 1;
    case Builtin::None: break;
  }
  return std::nullopt;
}

inline std::optional<std::size_t> exact_orbit_number(Builtin b) {
  switch (b) {
    case Builtin::Succ: return 1;
    case Builtin::PredFloor: return 0;
    case Builtin::ShiftZ: return 1;
    case Builtin::None: break;
  }
  return std::nullopt;
}

namespace detail {

inline void check_window(const WindowedMap& w, std::size_t N) {
  w.validate();
  if (w.size() < N + 1)
    throw WindowTooSmall("window of " + std::to_string(w.size()) + " points cannot hold chains of depth " + std::to_string(N));
  if (w.domain == Domain::N && w.lo != 0)
    throw WindowTooSmall("windows on N must start at 0 so that backward chains cannot escape below the window");
}

inline bool pack(const std::vector<std::vector<long long>>& segs, std::size_t idx, std::size_t want,
                 std::set<long long>& used, std::vector<std::size_t>& pick, std::vector<std::size_t>& best,
                 std::size_t& budget) {
  if (pick.size() > best.size()) best = pick;
  if (best.size() >= want) return true;
  if (idx == segs.size() || budget == 0) return false;
  if (pick.size() + (segs.size() - idx) <= best.size()) return false;
  --budget;
  bool ok = std::none_of(segs[idx].begin(), segs[idx].end(), [&](long long x) { return used.count(x); });
  if (ok) {
    for (auto x : segs[idx]) used.insert(x);
    pick.push_back(idx);
    if (pack(segs, idx + 1, want, used, pick, best, budget)) return true;
    pick.pop_back();
    for (auto x : segs[idx]) used.erase(x);
  }
  return pack(segs, idx + 1, want, used, pick, best, budget);
}

}  // namespace detail

// Up to k vertex-disjoint backward chains x_0 <- ... <- x_N inside the window whose top escapes it.
inline ChainReport windowed_string_bound(const WindowedMap& w, std::size_t k, std::size_t N, std::size_t node_budget = 1000000) {
  detail::check_window(w, N);
  ChainReport rep;
  rep.requested = k;
  std::vector<std::vector<long long>> segs;
  for (long long e = w.lo; e <= w.hi; ++e) {
    if (!w.escapes_backward(e)) continue;
    std::vector<long long> s{e};
    std::set<long long> seen{e};
    bool ok = true;
    for (std::size_t i = 0; i < N && ok; ++i) {
      long long y = w(s.back());
      if (!w.in_window(y) || seen.count(y)) ok = false;
      s.push_back(y);
      seen.insert(y);
    }
    if (ok) {
      std::reverse(s.begin(), s.end());
      segs.push_back(std::move(s));
    }
  }
  std::set<long long> used;
  std::vector<std::size_t> pick, best;
  std::size_t budget = node_budget;
  detail::pack(segs, 0, k, used, pick, best, budget);
  rep.budget_exhausted = budget == 0 && best.size() < k;
  rep.bound = best.size();
  for (auto i : best) rep.chains.push_back(segs[i]);
  rep.exact = exact_string_number(w.builtin);
  if (rep.exact) rep.consistent = rep.bound == std::min(k, *rep.exact);
  return rep;
}

// Up to k pairwise-disjoint forward orbits with at least N distinct terms that leave the window.
inline ChainReport infinite_orbit_bound(const WindowedMap& w, std::size_t k, std::size_t N) {
  detail::check_window(w, N);
  ChainReport rep;
  rep.requested = k;
  // escaping orbits that share a point share their exit, so distinct exits give disjoint orbits
  std::map<long long, std::vector<long long>> by_exit;
  for (long long x = w.lo; x <= w.hi; ++x) {
    std::vector<long long> orb{x};
    std::set<long long> seen{x};
    bool escaped = false;
    while (true) {
      long long y = w(orb.back());
      if (!w.in_window(y)) {
        escaped = true;
        break;
      }
      if (seen.count(y)) break;
      seen.insert(y);
      orb.push_back(y);
    }
    if (escaped && orb.size() >= N && !by_exit.count(orb.back())) by_exit.emplace(orb.back(), std::move(orb));
  }
  for (auto& [exit, orb] : by_exit) {
    if (rep.chains.size() == k) break;
    rep.chains.push_back(orb);
  }
  rep.bound = rep.chains.size();
  rep.exact = exact_orbit_number(w.builtin);
  if (rep.exact) rep.consistent = rep.bound == std::min(k, *rep.exact);
  return rep;
}

inline ChainReport infinite_orbit_bound(const FunctionalGraph& g, std::size_t k) {
  analyze_finite(g);
  ChainReport rep;
  rep.requested = k;
  rep.exact = 0;
  return rep;
}

// ---------------------------------------------------------------- generalized shifts

// sigma(x)_i = x_{lambda(i)} on (Z/K)^{[lo,hi]}; coordinates mapped outside the window read 0.
inline Endomorphism generalized_shift_materialize(const std::function<long long(long long)>& lambda, long long lo, long long hi,
                                                  const Int& K) {
  if (K < 2) throw ValidationError("K", "|K| must be at least 2");
  if (lo > hi) throw WindowTooSmall("empty window");
  const std::size_t w = static_cast<std::size_t>(hi - lo + 1);
  FgGroup g(0, std::vector<Int>(w, K));
  Matrix D(w, w);
  for (long long i = lo; i <= hi; ++i) {
    long long j = lambda(i);
    if (j >= lo && j <= hi) D(static_cast<std::size_t>(i - lo), static_cast<std::size_t>(j - lo)) = 1;
  }
  return Endomorphism(g, Matrix(0, 0), Matrix(w, 0), D);
}

inline Endomorphism generalized_shift_materialize(const WindowedMap& m, const Int& K) {
  m.validate();
  if (!m.finite_to_one()) throw NotFiniteToOne("a constant case has infinite fibres");
  return generalized_shift_materialize([&](long long i) { return m(i); }, m.lo, m.hi, K);
}

inline Endomorphism generalized_shift_materialize(const FunctionalGraph& g, const Int& K) {
  g.validate();
  if (g.n == 0) throw WindowTooSmall("empty graph");
  return generalized_shift_materialize([&](long long i) { return static_cast<long long>(g.succ[static_cast<std::size_t>(i)]); }, 0,
                                       static_cast<long long>(g.n) - 1, K);
}

enum class Shift { Right, Left, TwoSided };

inline std::string shift_name(Shift s) {
  switch (s) {
    case Shift::Right: return "right";
    case Shift::Left: return "left";
    case Shift::TwoSided: return "two_sided";
  }
  return "?";
}

// Truncated Bernoulli shifts on w coordinates, built directly from their definitions.
inline Endomorphism bernoulli_window(Shift s, const Int& K, std::size_t w) {
  if (K < 2) throw ValidationError("K", "|K| must be at least 2");
  if (w == 0) throw WindowTooSmall("empty window");
  FgGroup g(0, std::vector<Int>(w, K));
  Matrix D(w, w);
  for (std::size_t i = 0; i < w; ++i) {
    if (s == Shift::Left) {
      if (i + 1 < w) D(i, i + 1) = 1;  // (x_0, x_1, ...) -> (x_1, x_2, ...)
    } else if (i > 0) {
      D(i, i - 1) = 1;  // (x_0, x_1, ...) -> (0, x_0, ...); two-sided is the same index shift
    }
  }
  return Endomorphism(g, Matrix(0, 0), Matrix(w, 0), D);
}

}  // namespace stringdyn
