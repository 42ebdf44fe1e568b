#pragma once

#include "stringdyn/catalog.hpp"
#include "stringdyn/concrete.hpp"
#include "stringdyn/dynamics.hpp"
#include "stringdyn/entropy.hpp"
#include "stringdyn/selfmap.hpp"
#include "stringdyn/strings.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace stringdyn {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------- scalars

inline json int_to_json(const Int& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return json(v.convert_to<long long>());
  return json(v.str());
}

inline Int int_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Int(j.get<long long>());
  if (j.is_number_unsigned()) return Int(j.get<unsigned long long>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::size_t i = (s.size() > 1 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.empty() || i == s.size() || s.find_first_not_of("0123456789", i) != std::string::npos)
      throw ValidationError(path, "not an integer: '" + s + "'");
    return Int(s);
  }
  throw ValidationError(path, "expected an integer");
}

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(path + "." + key, "missing field");
  return *it;
}

inline json vec_to_json(const Vec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(int_to_json(x));
  return a;
}

inline Vec vec_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(int_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

inline json matrix_to_json(const Matrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vec_to_json(m.row_vec(i)));
  return a;
}

// cols is used when there are no rows.
inline Matrix matrix_from_json(const json& j, const std::string& path, std::size_t cols_if_empty) {
  if (!j.is_array()) throw ValidationError(path, "expected an array of rows");
  if (j.empty()) return Matrix(0, cols_if_empty);
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(vec_from_json(j[i], path + "[" + std::to_string(i) + "]"));
    if (rows.back().size() != rows.front().size())
      throw ValidationError(path + "[" + std::to_string(i) + "]", "ragged matrix");
  }
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c) m(i, c) = rows[i][c];
  return m;
}

inline std::string rational_to_string(const Rational& q) { return rational_str(q); }

// ---------------------------------------------------------------- groups

inline json to_json(const FgGroup& g) {
  json t = json::array();
  for (const auto& d : g.torsion) t.push_back(int_to_json(d));
  return {{"free_rank", g.free_rank}, {"torsion", t}};
}

inline FgGroup group_from_json(const json& j, const std::string& path = "group") {
  const json& fr = field(j, "free_rank", path);
  if (!fr.is_number_integer() || fr.get<long long>() < 0) throw ValidationError(path + ".free_rank", "expected a nonnegative integer");
  std::vector<Int> tors;
  if (j.contains("torsion")) tors = vec_from_json(j.at("torsion"), path + ".torsion");
  try {
    return FgGroup(static_cast<std::size_t>(fr.get<long long>()), tors);
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  }
}

inline json to_json(const Endomorphism& f) {
  return {{"A", matrix_to_json(f.A())}, {"C", matrix_to_json(f.C())}, {"D", matrix_to_json(f.D())}};
}

inline Endomorphism endo_from_json(const FgGroup& g, const json& j, const std::string& path = "endo") {
  const std::size_t r = g.free_rank, k = g.torsion_rank();
  auto get = [&](const char* key, std::size_t cols) {
    if (!j.is_object()) throw ValidationError(path, "expected an object");
    if (!j.contains(key)) return Matrix(0, 0);
    return matrix_from_json(j.at(key), path + "." + key, cols);
  };
  Matrix A = get("A", r), C = get("C", r), D = get("D", k);
  try {
    return Endomorphism(g, A, C, D);
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  }
}

inline json to_json(const Subgroup& h) {
  json gens = json::array();
  for (const auto& v : h.generators()) gens.push_back(vec_to_json(v));
  return {{"ambient", to_json(h.ambient())}, {"lattice_rows", matrix_to_json(h.lattice())}, {"generators", gens}};
}

inline Subgroup subgroup_from_json(const json& j, const std::string& path = "subgroup") {
  FgGroup g = group_from_json(field(j, "ambient", path), path + ".ambient");
  Matrix rows = matrix_from_json(field(j, "lattice_rows", path), path + ".lattice_rows", g.dim());
  if (rows.rows() && rows.cols() != g.dim()) throw ValidationError(path + ".lattice_rows", "row length differs from ambient dimension");
  return Subgroup::from_lattice(g, rows);
}

// Subgroup given as a list of generator vectors.
inline Subgroup generated_from_json(const FgGroup& g, const json& j, const std::string& path) {
  if (j.is_object()) return subgroup_from_json(j, path);
  Matrix m = matrix_from_json(j, path, g.dim());
  std::vector<Vec> gens;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.cols() != g.dim()) throw ValidationError(path + "[" + std::to_string(i) + "]", "wrong length");
    gens.push_back(g.reduce(m.row_vec(i)));
  }
  return Subgroup::generated(g, gens);
}

// ---------------------------------------------------------------- dynamics

inline json to_json(const Periodicity& p) {
  if (auto* a = std::get_if<Periodic>(&p)) return {{"type", "Periodic"}, {"n", int_to_json(a->n)}};
  if (auto* b = std::get_if<QuasiPeriodic>(&p)) return {{"type", "QuasiPeriodic"}, {"n", int_to_json(b->n)}, {"m", int_to_json(b->m)}};
  return {{"type", "Neither"}};
}

inline json to_json(const DynamicalProfile& p) {
  json certs = json::array();
  for (const auto& c : p.certificates) certs.push_back({{"name", c.name}, {"ok", c.ok}});
  return {{"per", to_json(p.per)},
          {"qper", to_json(p.qper)},
          {"hyperkernel", to_json(p.hyperkernel)},
          {"surjective_core", to_json(p.surjective_core)},
          {"hyperkernel_index", p.hyperkernel_index},
          {"classification", to_json(p.classification)},
          {"certificates", certs}};
}

// ---------------------------------------------------------------- verdicts and witnesses

inline json to_json(const WitnessSummary& w) {
  return {{"strategy", strategy_name(w.strategy)}, {"count", w.count}, {"length", w.length},
          {"guaranteed", w.guaranteed}, {"theorem", w.theorem}};
}

inline json to_json(const Verdict& v) {
  json j = {{"kind", kind_name(v.kind)}, {"value", value_name(v.value)}, {"basis", v.basis}};
  if (v.witness) j["witness"] = to_json(*v.witness);
  return j;
}

inline json to_json(const VerdictTriple& t) { return {{"s", to_json(t.s)}, {"ns", to_json(t.ns)}, {"s0", to_json(t.s0)}}; }

inline json element_to_json(const Vec& v) { return vec_to_json(v); }
inline json element_to_json(const Rational& q) { return {{"q", rational_str(q)}}; }
inline json element_to_json(const PruferElement& x) {
  return {{"prufer", {{"p", int_to_json(x.p)}, {"a", int_to_json(x.a)}, {"n", x.n}}}};
}
inline json element_to_json(const ModOneElement& x) { return {{"modone", rational_str(x.v)}}; }

inline json to_json(const KindCertificate& k) {
  if (auto* n = std::get_if<NullCert>(&k)) return {{"type", "null"}, {"k", n->k}};
  if (auto* s = std::get_if<NonSingularCert>(&k)) return {{"type", "non_singular"}, {"proof", s->proof}};
  return {{"type", "plain"}};
}

template <class E>
json to_json(const StringPrefix<E>& s) {
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back(element_to_json(t));
  return {{"terms", terms}, {"relation_checked", s.relation_checked}, {"distinct_checked", s.distinct_checked},
          {"kind", to_json(s.kind)}};
}

template <class E>
json to_json(const WitnessFamily<E>& f) {
  json strings = json::array();
  for (const auto& s : f.strings) strings.push_back(to_json(s));
  json mult = json::array();
  for (const auto& m : f.multipliers) mult.push_back(int_to_json(m));
  return {{"strategy", strategy_name(f.strategy)},
          {"multipliers", mult},
          {"prefixes", strings},
          {"evidence",
           {{"prefixes_disjoint", f.evidence.prefixes_disjoint},
            {"first_term_criterion", f.evidence.first_term_criterion},
            {"guaranteed", f.evidence.guaranteed},
            {"theorem", f.evidence.theorem},
            {"notes", f.evidence.notes}}}};
}

inline json failure_to_json(const Failure& f) { return {{"reason", failure_name(f.reason)}, {"detail", f.detail}}; }

// ---------------------------------------------------------------- concrete backends

inline MulEndo parse_backend(const std::string& backend, const std::string& multiplier) {
  MulEndo f;
  if (backend == "q") {
    f.backend = BackendKind::Rationals;
  } else if (backend == "qmodz") {
    f.backend = BackendKind::QmodZ;
  } else if (backend.rfind("prufer:", 0) == 0) {
    f.backend = BackendKind::Prufer;
    const std::string p = backend.substr(7);
    if (p.empty() || p.find_first_not_of("0123456789") != std::string::npos) throw ValidationError("backend", "bad prime '" + p + "'");
    f.prime = Int(p);
    if (!is_probable_prime(f.prime)) throw ValidationError("backend", p + " is not prime");
  } else {
    throw ValidationError("backend", "expected q, prufer:p or qmodz, got '" + backend + "'");
  }
  f.multiplier = parse_rational(multiplier, "multiplier");
  if (f.backend != BackendKind::Rationals) integer_multiplier(f);
  return f;
}

inline json to_json(const MulEndo& f) { return {{"backend", backend_name(f)}, {"multiplier", rational_str(f.multiplier)}}; }

// ---------------------------------------------------------------- self-maps

inline FunctionalGraph graph_from_json(const json& j, const std::string& path = "graph") {
  const json& n = field(j, "n", path);
  if (!n.is_number_integer() || n.get<long long>() < 0) throw ValidationError(path + ".n", "expected a nonnegative integer");
  FunctionalGraph g;
  g.n = static_cast<std::size_t>(n.get<long long>());
  const json& s = field(j, "succ", path);
  if (!s.is_array()) throw ValidationError(path + ".succ", "expected an array");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].is_number_integer() || s[i].get<long long>() < 0)
      throw ValidationError(path + ".succ[" + std::to_string(i) + "]", "expected a node index");
    g.succ.push_back(static_cast<std::size_t>(s[i].get<long long>()));
  }
  try {
    g.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  }
  return g;
}

inline json to_json(const FunctionalGraph& g) { return {{"n", g.n}, {"succ", g.succ}}; }

inline long long ll_from_json(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
  return j.get<long long>();
}

inline WindowedMap windowed_from_json(const json& j, const std::string& path = "map") {
  WindowedMap w;
  const json& win = field(j, "window", path);
  if (!win.is_array() || win.size() != 2) throw ValidationError(path + ".window", "expected [lo, hi]");
  w.lo = ll_from_json(win[0], path + ".window[0]");
  w.hi = ll_from_json(win[1], path + ".window[1]");
  if (j.contains("builtin")) {
    if (!j["builtin"].is_string()) throw ValidationError(path + ".builtin", "expected a name");
    w.builtin = parse_builtin(j["builtin"].get<std::string>());
    w.domain = w.builtin == Builtin::ShiftZ ? Domain::Z : Domain::N;
  }
  if (j.contains("domain")) {
    const std::string d = j["domain"].is_string() ? j["domain"].get<std::string>() : "";
    if (d != "N" && d != "Z") throw ValidationError(path + ".domain", "expected \"N\" or \"Z\"");
    w.domain = d == "N" ? Domain::N : Domain::Z;
  }
  if (w.builtin == Builtin::None) {
    const json& cs = field(j, "cases", path);
    if (!cs.is_array() || cs.empty()) throw ValidationError(path + ".cases", "expected a nonempty array");
    w.mod = ll_from_json(field(cs[0], "mod", path + ".cases[0]"), path + ".cases[0].mod");
    if (w.mod < 1 || w.mod > 1000000) throw ValidationError(path + ".cases[0].mod", "modulus out of range");
    std::vector<std::optional<AffineCase>> seen(static_cast<std::size_t>(w.mod));
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string p = path + ".cases[" + std::to_string(i) + "]";
      if (ll_from_json(field(cs[i], "mod", p), p + ".mod") != w.mod) throw ValidationError(p + ".mod", "all cases need the same modulus");
      long long r = ll_from_json(field(cs[i], "r", p), p + ".r");
      if (r < 0 || r >= w.mod) throw ValidationError(p + ".r", "residue out of range");
      if (seen[static_cast<std::size_t>(r)]) throw ValidationError(p + ".r", "duplicate residue");
      seen[static_cast<std::size_t>(r)] = AffineCase{ll_from_json(field(cs[i], "a", p), p + ".a"), ll_from_json(field(cs[i], "b", p), p + ".b")};
    }
    for (long long r = 0; r < w.mod; ++r) {
      if (!seen[static_cast<std::size_t>(r)]) throw ValidationError(path + ".cases", "residue " + std::to_string(r) + " has no case");
      w.cases.push_back(*seen[static_cast<std::size_t>(r)]);
    }
  }
  try {
    w.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  }
  return w;
}

inline json to_json(const WindowedMap& w) {
  json j = {{"domain", w.domain == Domain::N ? "N" : "Z"}, {"window", {w.lo, w.hi}}};
  if (w.builtin != Builtin::None) {
    j["builtin"] = builtin_name(w.builtin);
  } else {
    json cs = json::array();
    for (long long r = 0; r < w.mod; ++r)
      cs.push_back({{"mod", w.mod}, {"r", r}, {"a", w.cases[static_cast<std::size_t>(r)].a}, {"b", w.cases[static_cast<std::size_t>(r)].b}});
    j["cases"] = cs;
  }
  return j;
}

inline json to_json(const ChainReport& c) {
  json j = {{"bound", c.bound}, {"requested", c.requested}, {"chains", c.chains}, {"consistent", c.consistent},
            {"budget_exhausted", c.budget_exhausted}};
  j["exact"] = c.exact ? json(*c.exact) : json(nullptr);
  return j;
}

inline json to_json(const OrbitReport& r) {
  return {{"tail", r.tail}, {"cycle", r.cycle}, {"per", r.per}, {"qper", r.qper}, {"sc", r.sc},
          {"image_steps", r.image_steps}, {"string_number", r.string_number}};
}

// ---------------------------------------------------------------- entropy

inline json to_json(const GrowthCurve& c) {
  json sizes = json::array();
  for (const auto& s : c.sizes) sizes.push_back(int_to_json(s));
  json j = {{"sizes", sizes}, {"limit", limit_name(c.limit)}};
  j["ratio"] = c.ratio ? int_to_json(*c.ratio) : json(nullptr);
  return j;
}

inline std::string growth_csv(const GrowthCurve& c) {
  std::ostringstream os;
  os << "n,size,log_slope\n";
  for (std::size_t n = 1; n <= c.sizes.size(); ++n) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", c.log_slope(n));
    os << n << "," << c.sizes[n - 1].str() << "," << buf << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- files

inline json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ValidationError(what, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(what, std::string("JSON parse error: ") + e.what());
  }
}

inline json report_header(const std::string& command) {
  return {{"schema", kSchemaVersion}, {"tool", "stringdyn"}, {"version", kToolVersion}, {"command", command}};
}

}  // namespace stringdyn
