#pragma once

// Independent re-verification of witness sections in a report. Only apply and equality are used.

#include "stringdyn/json_io.hpp"

#include <algorithm>
#include <functional>

namespace stringdyn {

struct RecheckResult {
  std::size_t sections = 0, prefixes = 0, terms = 0;
  std::size_t solver_only = 0;  // non-singularity claims, which need a solver and are not rechecked
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

inline json witness_section(const json& dynamics, const json& family) { return {{"dynamics", dynamics}, {"family", family}}; }

inline json fg_dynamics_json(const Endomorphism& phi) {
  return {{"type", "fg"}, {"group", to_json(phi.group())}, {"endo", to_json(phi)}};
}

inline json mul_dynamics_json(const MulEndo& f) {
  return {{"type", "mul"}, {"backend", backend_name(f)}, {"multiplier", rational_str(f.multiplier)}};
}

namespace detail {

inline Rational rational_from_json(const json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, "expected \"a/b\"");
  return parse_rational(j.get<std::string>(), path);
}

inline PruferElement prufer_from_json(const json& j, const std::string& path) {
  const json& e = field(j, "prufer", path);
  const std::string p = path + ".prufer";
  const long long n = ll_from_json(field(e, "n", p), p + ".n");
  if (n < 0) throw ValidationError(p + ".n", "negative exponent");
  return PruferElement::make(int_from_json(field(e, "p", p), p + ".p"), int_from_json(field(e, "a", p), p + ".a"),
                             static_cast<unsigned>(n));
}

template <class E>
struct Typed {
  std::function<E(const E&)> apply;
  std::function<E(const json&, const std::string&)> read;
  E zero;
};

template <class E>
void recheck_family(const Typed<E>& t, const json& fam, const std::string& path, RecheckResult& r) {
  const json& pre = field(fam, "prefixes", path);
  if (!pre.is_array()) throw ValidationError(path + ".prefixes", "expected an array");
  std::vector<std::vector<E>> all;
  auto fail = [&](const std::string& where, const std::string& what) { r.problems.push_back(where + ": " + what); };
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const std::string pp = path + ".prefixes[" + std::to_string(i) + "]";
    const json& terms = field(pre[i], "terms", pp);
    if (!terms.is_array() || terms.empty()) throw ValidationError(pp + ".terms", "expected a nonempty array");
    std::vector<E> xs;
    for (std::size_t n = 0; n < terms.size(); ++n) xs.push_back(t.read(terms[n], pp + ".terms[" + std::to_string(n) + "]"));
    ++r.prefixes;
    r.terms += xs.size();
    for (std::size_t n = 1; n < xs.size(); ++n)
      if (!(t.apply(xs[n]) == xs[n - 1])) fail(pp, "phi(x_" + std::to_string(n) + ") != x_" + std::to_string(n - 1));
    for (std::size_t a = 0; a < xs.size(); ++a)
      for (std::size_t b = a + 1; b < xs.size(); ++b)
        if (xs[a] == xs[b]) fail(pp, "x_" + std::to_string(a) + " == x_" + std::to_string(b));
    const json& kind = pre[i].contains("kind") ? pre[i]["kind"] : json::object();
    const std::string type = kind.value("type", "plain");
    if (type == "null") {
      const long long k = ll_from_json(field(kind, "k", pp + ".kind"), pp + ".kind.k");
      if (xs[0] == t.zero) fail(pp, "null string starts at 0");
      E y = xs[0];
      for (long long s = 0; s < k; ++s) y = t.apply(y);
      if (!(y == t.zero)) fail(pp, "phi^" + std::to_string(k) + "(x_0) != 0");
    } else if (type == "non_singular") {
      ++r.solver_only;
    }
    all.push_back(std::move(xs));
  }
  auto meet = [](const std::vector<E>& u, const std::vector<E>& v) {
    return std::any_of(u.begin(), u.end(), [&](const E& x) { return std::find(v.begin(), v.end(), x) != v.end(); });
  };
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a + 1; b < all.size(); ++b)
      if (meet(all[a], all[b])) fail(path, "prefixes " + std::to_string(a) + " and " + std::to_string(b) + " meet");
}

}  // namespace detail

inline void recheck_section(const json& sec, const std::string& path, RecheckResult& r) {
  ++r.sections;
  const json& dyn = field(sec, "dynamics", path);
  const json& fam = field(sec, "family", path);
  const std::string dp = path + ".dynamics";
  const std::string type = field(dyn, "type", dp).is_string() ? dyn["type"].get<std::string>() : "";
  if (type == "fg") {
    FgGroup g = group_from_json(field(dyn, "group", dp), dp + ".group");
    Endomorphism phi = endo_from_json(g, field(dyn, "endo", dp), dp + ".endo");
    detail::Typed<Vec> t{[&](const Vec& x) { return phi.apply(x); },
                         [&](const json& j, const std::string& p) {
                           Vec v = vec_from_json(j, p);
                           if (v.size() != g.dim()) throw ValidationError(p, "wrong length");
                           return g.reduce(v);
                         },
                         g.zero()};
    detail::recheck_family(t, fam, path + ".family", r);
    return;
  }
  if (type != "mul") throw ValidationError(dp + ".type", "expected \"fg\" or \"mul\"");
  const json& mj = field(dyn, "multiplier", dp);
  if (!mj.is_string()) throw ValidationError(dp + ".multiplier", "expected a string");
  const json& bj = field(dyn, "backend", dp);
  if (!bj.is_string()) throw ValidationError(dp + ".backend", "expected a string");
  MulEndo f = parse_backend(bj.get<std::string>(), mj.get<std::string>());
  switch (f.backend) {
    case BackendKind::Rationals: {
      RationalMul d(f.multiplier);
      detail::Typed<Rational> t{[&](const Rational& x) { return d.apply(x); },
                                [](const json& j, const std::string& p) { return detail::rational_from_json(field(j, "q", p), p + ".q"); },
                                Rational(0)};
      detail::recheck_family(t, fam, path + ".family", r);
      return;
    }
    case BackendKind::Prufer: {
      PruferMul d(f.prime, integer_multiplier(f));
      detail::Typed<PruferElement> t{[&](const PruferElement& x) { return d.apply(x); },
                                     [&](const json& j, const std::string& p) {
                                       PruferElement x = detail::prufer_from_json(j, p);
                                       if (x.p != f.prime) throw MixedBackend(p + ": element of Z(" + x.p.str() + "^inf)");
                                       return x;
                                     },
                                     d.zero()};
      detail::recheck_family(t, fam, path + ".family", r);
      return;
    }
    case BackendKind::QmodZ: {
      ModOneMul d(integer_multiplier(f));
      detail::Typed<ModOneElement> t{
          [&](const ModOneElement& x) { return d.apply(x); },
          [](const json& j, const std::string& p) {
            return ModOneElement::make(detail::rational_from_json(field(j, "modone", p), p + ".modone"));
          },
          d.zero()};
      detail::recheck_family(t, fam, path + ".family", r);
      return;
    }
  }
}

// Walks the report and rechecks every object holding both "dynamics" and "family".
inline RecheckResult recheck_report(const json& report) {
  RecheckResult r;
  std::function<void(const json&, const std::string&)> walk = [&](const json& j, const std::string& path) {
    if (j.is_object()) {
      if (j.contains("dynamics") && j.contains("family")) {
        recheck_section(j, path, r);
        return;
      }
      for (auto it = j.begin(); it != j.end(); ++it) walk(*it, path + "." + it.key());
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) walk(j[i], path + "[" + std::to_string(i) + "]");
    }
  };
  walk(report, "report");
  return r;
}

inline json to_json(const RecheckResult& r) {
  return {{"ok", r.ok()}, {"sections", r.sections}, {"prefixes", r.prefixes}, {"terms", r.terms},
          {"solver_only_claims", r.solver_only}, {"problems", r.problems}};
}

}  // namespace stringdyn
