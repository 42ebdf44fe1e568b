#pragma once

#include "stringdyn/selfmap.hpp"
#include "stringdyn/subgroup.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace stringdyn {

class NotFinite : public Error {
 public:
  using Error::Error;
};

class InfiniteIndex : public Error {
 public:
  using Error::Error;
};

class AmbientInfinite : public Error {
 public:
  using Error::Error;
};

enum class LimitKind { Value, Unbounded, Undetermined };

inline std::string limit_name(LimitKind k) {
  switch (k) {
    case LimitKind::Value: return "value";
    case LimitKind::Unbounded: return "unbounded";
    case LimitKind::Undetermined: return "undetermined";
  }
  return "?";
}

inline constexpr std::size_t kStabilityWindow = 4;
inline constexpr std::size_t kMinHorizon = 8;

struct GrowthCurve {
  std::vector<Int> sizes;  // sizes[n-1] = |T_n| or |C_n|
  LimitKind limit = LimitKind::Undetermined;
  std::optional<Int> ratio;  // exact eventual ratio when limit == Value

  Int ratio_at(std::size_t n) const { return sizes[n] / sizes[n - 1]; }  // |X_{n+1}| / |X_n|, n >= 1
  double log_slope(std::size_t n) const { return std::log(sizes[n - 1].convert_to<double>()) / static_cast<double>(n); }
  double limit_log() const { return ratio ? std::log(ratio->convert_to<double>()) : 0.0; }
};

namespace detail {

inline void check_horizon(std::size_t n_max) {
  if (n_max < 2) throw ValidationError("n_max", "need at least 2 steps");
}

// Declare a limit only for an exactly constant ratio across the trailing window.
inline void detect_limit(GrowthCurve& c, bool flag_unbounded) {
  const std::size_t n = c.sizes.size();
  for (std::size_t i = 1; i < n; ++i)
    if (c.sizes[i] < c.sizes[i - 1]) throw CertificateFailure("growth curve is not monotone");
  if (n < kMinHorizon) return;
  std::vector<Int> tail;
  for (std::size_t i = n - kStabilityWindow; i < n; ++i) {
    if (c.sizes[i] % c.sizes[i - 1] != 0) return;
    tail.push_back(c.sizes[i] / c.sizes[i - 1]);
  }
  const bool rising = std::all_of(tail.begin(), tail.end(), [](const Int& r) { return r > 1; });
  if (flag_unbounded && rising) {
    c.limit = LimitKind::Unbounded;
    return;
  }
  if (std::all_of(tail.begin(), tail.end(), [&](const Int& r) { return r == tail.front(); })) {
    c.limit = LimitKind::Value;
    c.ratio = tail.front();
  }
}

}  // namespace detail

inline GrowthCurve trajectory_growth(const Endomorphism& phi, const Subgroup& F, std::size_t n_max) {
  detail::check_horizon(n_max);
  if (!(F.ambient() == phi.group())) throw AmbientMismatch("F lives in a different group");
  auto fo = F.order();
  if (!fo) throw NotFinite("trajectory_growth: F is infinite");
  GrowthCurve c;
  Subgroup T = F;
  c.sizes.push_back(*fo);
  for (std::size_t n = 2; n <= n_max; ++n) {
    T = subgroup_sum(F, image(phi, T));
    c.sizes.push_back(*T.order());
    if (c.sizes.back() > c.sizes[c.sizes.size() - 2] * *fo) throw CertificateFailure("|T_{n+1}| exceeds |T_n||F|");
  }
  detail::detect_limit(c, false);
  return c;
}

inline GrowthCurve cotrajectory_growth(const Endomorphism& phi, const Subgroup& N, std::size_t n_max) {
  detail::check_horizon(n_max);
  if (!(N.ambient() == phi.group())) throw AmbientMismatch("N lives in a different group");
  auto idx = N.index();
  if (!idx) throw InfiniteIndex("cotrajectory_growth: N has infinite index");
  GrowthCurve c;
  Subgroup Nn = N;
  c.sizes.push_back(*idx);
  for (std::size_t n = 2; n <= n_max; ++n) {
    Nn = subgroup_intersect(N, preimage(phi, Nn));
    c.sizes.push_back(*Nn.index());
  }
  detail::detect_limit(c, true);
  return c;
}

// <e_0> and the kernel of the last coordinate, the default F and N for window models.
inline Subgroup first_coordinate(const FgGroup& g) { return Subgroup::generated(g, {g.basis_vector(0)}); }

inline Subgroup last_coordinate_kernel(const FgGroup& g) {
  std::vector<Vec> gens;
  for (std::size_t i = 0; i + 1 < g.dim(); ++i) gens.push_back(g.basis_vector(i));
  return Subgroup::generated(g, gens);
}

struct EntropyEstimate {
  LimitKind status = LimitKind::Undetermined;
  Int ratio = 1;  // exp of the estimate; the estimate is log(ratio)
  std::size_t subgroups = 0;
  std::size_t detected = 0;
  double value() const { return std::log(ratio.convert_to<double>()); }
};

struct EntropyOptions {
  bool exhaustive = true;
  std::size_t n_max = kMinHorizon;
  std::size_t samples = 64;
  unsigned seed = 1;
  Int exhaustive_limit = Int(1) << 16;  // largest |G| for the exhaustive sweep
};

// Sup of detected trajectory limits at horizon n_max over cyclic subgroups (all or sampled) and G.
inline EntropyEstimate entropy_estimate(const Endomorphism& phi, const EntropyOptions& opt = {}) {
  const FgGroup& g = phi.group();
  auto order = g.order();
  if (!order) {
    if (opt.exhaustive) throw AmbientInfinite("exhaustive entropy needs a finite ambient group");
  } else if (opt.exhaustive && *order > opt.exhaustive_limit) {
    throw AmbientInfinite("exhaustive entropy sweep limited to " + opt.exhaustive_limit.str() + " elements");
  }
  std::vector<Subgroup> fs;
  if (opt.exhaustive) {
    std::set<std::vector<Int>> seen;
    for (const auto& x : g.elements()) {
      Subgroup h = Subgroup::generated(g, {x});
      std::vector<Int> key;
      const Matrix& L = h.lattice();
      for (std::size_t i = 0; i < L.rows(); ++i)
        for (std::size_t j = 0; j < L.cols(); ++j) key.push_back(L(i, j));
      if (seen.insert(key).second) fs.push_back(std::move(h));
    }
    fs.push_back(Subgroup::whole(g));
  } else {
    // torsion coordinates plus a deterministic sample
    for (std::size_t i = g.free_rank; i < g.dim(); ++i) fs.push_back(Subgroup::generated(g, {g.basis_vector(i)}));
    std::mt19937_64 rng(opt.seed);
    for (std::size_t s = 0; s < opt.samples && g.torsion_rank() > 0; ++s) {
      Vec x = g.zero();
      for (std::size_t i = g.free_rank; i < g.dim(); ++i) {
        const Int& d = g.torsion[i - g.free_rank];
        x[i] = Int(rng() % d.convert_to<unsigned long long>());
      }
      fs.push_back(Subgroup::generated(g, {x}));
    }
  }
  EntropyEstimate e;
  for (const auto& F : fs) {
    if (!F.order()) continue;
    ++e.subgroups;
    auto c = trajectory_growth(phi, F, opt.n_max);
    if (c.limit != LimitKind::Value) continue;
    ++e.detected;
    if (*c.ratio > e.ratio) e.ratio = *c.ratio;
  }
  if (e.detected > 0) e.status = LimitKind::Value;
  return e;
}

struct ShiftWindowResult {
  std::size_t window = 0;
  std::vector<Int> ratios;  // |T_{n+1}|/|T_n| for n = 1 .. window-1
  bool matches = false;
};

struct ShiftFormulaReport {
  Builtin lambda = Builtin::None;
  Int K = 2;
  std::size_t s = 0;  // s(lambda)
  Int expected_ratio = 1;
  std::vector<ShiftWindowResult> windows;
  bool all_match() const {
    return !windows.empty() && std::all_of(windows.begin(), windows.end(), [](const auto& w) { return w.matches; });
  }
};

// Window of w points used for a built-in: [0, w-1] on N, centred on Z.
inline WindowedMap builtin_window(Builtin b, std::size_t w) {
  if (w == 0) throw WindowTooSmall("empty window");
  if (b == Builtin::ShiftZ) {
    const long long lo = -static_cast<long long>(w / 2);
    return WindowedMap::make_builtin(b, lo, lo + static_cast<long long>(w) - 1);
  }
  return WindowedMap::make_builtin(b, 0, static_cast<long long>(w) - 1);
}

// Compare |T_{n+1}|/|T_n| with |K|^{s(lambda)} for F the first window coordinate, over the regime n + 1 <= w
// before the truncated window saturates.
inline ShiftFormulaReport shift_formula_check(Builtin lambda, const Int& K, const std::vector<std::size_t>& windows) {
  auto s = exact_string_number(lambda);
  if (!s) throw ValidationError("lambda", "shift-check needs a built-in with a known string number");
  ShiftFormulaReport rep;
  rep.lambda = lambda;
  rep.K = K;
  rep.s = *s;
  rep.expected_ratio = pow_int(K, static_cast<unsigned>(*s));
  for (auto w : windows) {
    if (w < 2) throw WindowTooSmall("shift-check windows need at least 2 points");
    auto m = builtin_window(lambda, w);
    Endomorphism sigma = generalized_shift_materialize(m, K);
    Subgroup F = first_coordinate(sigma.group());
    auto c = trajectory_growth(sigma, F, w);
    ShiftWindowResult r;
    r.window = w;
    r.matches = true;
    for (std::size_t n = 1; n < w; ++n) {
      r.ratios.push_back(c.ratio_at(n));
      if (r.ratios.back() != rep.expected_ratio) r.matches = false;
    }
    rep.windows.push_back(std::move(r));
  }
  return rep;
}

}  // namespace stringdyn
