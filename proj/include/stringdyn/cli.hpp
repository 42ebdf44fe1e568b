#pragma once

#include "stringdyn/recheck.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <iostream>
#include <map>
#include <thread>

namespace stringdyn::cli {

enum Exit { kOk = 0, kMismatch = 1, kInput = 2 };

struct Result {
  json report;
  int code = kOk;
  std::string csv;
};

// json either inline ('{' or '[') or the path of a file
inline json load_json_arg(const std::string& arg, const std::string& what) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
    try {
      return json::parse(arg);
    } catch (const json::parse_error& e) {
      throw ValidationError(what, std::string("JSON parse error: ") + e.what());
    }
  }
  return read_json_file(arg, what);
}

inline std::vector<Int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<Int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("-0123456789") != std::string::npos)
      throw ValidationError(what, "bad integer '" + item + "'");
    out.emplace_back(item);
  }
  if (out.empty()) throw ValidationError(what, "empty list");
  return out;
}

inline StringKind parse_kind(const std::string& s) {
  if (s == "s") return StringKind::S;
  if (s == "ns") return StringKind::NS;
  if (s == "s0") return StringKind::S0;
  throw ValidationError("kind", "expected s, ns or s0, got '" + s + "'");
}

inline Shift parse_shift(const std::string& s) {
  if (s == "right") return Shift::Right;
  if (s == "left") return Shift::Left;
  if (s == "two_sided") return Shift::TwoSided;
  throw ValidationError("shift", "expected right, left or two_sided, got '" + s + "'");
}

inline Int parse_int(const std::string& s, const std::string& what) { return parse_int_list(s, what).at(0); }

// Every option of every subcommand; unused fields stay at their defaults.
struct Options {
  std::string group, endo, kind = "ns", multipliers, backend, multiplier = "2";
  std::size_t count = 5, length = 20;
  bool no_garland = false;
  std::string graph, map, K, materialize;
  std::size_t k = 3, depth = 5;
  std::string shift, lambda, F, N, windows = "2,3,4,5,6,7,8,9,10,11,12", csv, format = "json";
  std::size_t window = 12, n_max = 12, samples = 64;
  bool sampled = false;
  unsigned seed = 1;
  std::string p, m, witnesses;
  std::string manifest;
};

// ---------------------------------------------------------------- shared pieces

inline Endomorphism load_endo(const Options& o, FgGroup& g) {
  if (o.group.empty() || o.endo.empty()) throw ValidationError("group", "--group and --endo are required");
  g = group_from_json(load_json_arg(o.group, "group"));
  return endo_from_json(g, load_json_arg(o.endo, "endo"));
}

inline json input_echo(const FgGroup& g, const Endomorphism& phi) { return {{"group", to_json(g)}, {"endo", to_json(phi)}}; }

inline const Verdict& pick(const VerdictTriple& t, StringKind k) {
  return k == StringKind::S ? t.s : k == StringKind::NS ? t.ns : t.s0;
}

// witness outcome into the report: VerdictMismatch is a normal answer, other failures are not
template <class Fam>
int attach_witness(json& r, const Outcome<Fam>& w, const std::function<json(const Fam&)>& section) {
  if (ok(w)) {
    r["status"] = "ok";
    r["witness"] = section(std::get<Fam>(w));
    return kOk;
  }
  const Failure& f = std::get<Failure>(w);
  r["status"] = failure_name(f.reason);
  r["failure"] = failure_to_json(f);
  return f.reason == Failure::VerdictMismatch ? kOk : kMismatch;
}

// ---------------------------------------------------------------- endo

inline Result endo_profile(const Options& o) {
  FgGroup g;
  Endomorphism phi = load_endo(o, g);
  DynamicalProfile prof = dynamical_profile(phi);
  Result res;
  res.report = report_header("endo profile");
  res.report["input"] = input_echo(g, phi);
  res.report["profile"] = to_json(prof);
  res.report["verdicts"] = to_json(string_verdicts(prof));
  res.report["witness_requested"] = false;
  res.code = prof.all_certified() ? kOk : kMismatch;
  return res;
}

inline Result endo_strings(const Options& o) {
  const StringKind kind = parse_kind(o.kind);
  Result res;
  res.report = report_header("endo strings");
  res.report["request"] = {{"kind", o.kind}, {"count", o.count}, {"length", o.length}};
  if (o.count == 0 || o.length == 0) throw ValidationError("count", "--count and --length must be positive");
  if (!o.backend.empty()) {
    MulEndo f = parse_backend(o.backend, o.multiplier);
    res.report["input"] = to_json(f);
    res.report["verdicts"] = to_json(concrete_string_numbers(f));
    auto w = concrete_family(f, kind, o.count, o.length);
    res.code = attach_witness<ConcreteFamily>(res.report, w, [&](const ConcreteFamily& fam) {
      return witness_section(mul_dynamics_json(f), std::visit([](const auto& x) { return to_json(x); }, fam));
    });
    return res;
  }
  FgGroup g;
  Endomorphism phi = load_endo(o, g);
  DynamicalProfile prof = dynamical_profile(phi);
  res.report["input"] = input_echo(g, phi);
  res.report["verdicts"] = to_json(string_verdicts(prof));
  WitnessOptions wo;
  wo.try_garland = !o.no_garland;
  if (!o.multipliers.empty()) wo.multipliers = parse_int_list(o.multipliers, "multipliers");
  auto w = witness_family(phi, prof, kind, o.count, o.length, wo);
  res.code = attach_witness<FgWitness>(res.report, w, [&](const FgWitness& fw) {
    json sec = witness_section(fg_dynamics_json(phi), to_json(fw.family));
    sec["garland_attempt"] = fw.garland_attempt;
    return sec;
  });
  return res;
}

// ---------------------------------------------------------------- selfmap

inline Result selfmap_cmd(const Options& o) {
  Result res;
  res.report = report_header("selfmap");
  if (o.graph.empty() == o.map.empty()) throw ValidationError("graph", "give exactly one of --graph and --map");
  if (!o.graph.empty()) {
    FunctionalGraph g = graph_from_json(load_json_arg(o.graph, "graph"));
    res.report["input"] = {{"graph", to_json(g)}};
    OrbitReport rep = analyze_finite(g);
    res.report["orbits"] = to_json(rep);
    res.report["string_number"] = rep.string_number;
    res.report["orbit_number"] = to_json(infinite_orbit_bound(g, o.k));
    if (!o.materialize.empty()) res.report["materialized"] = fg_dynamics_json(generalized_shift_materialize(g, parse_int(o.materialize, "materialize")));
    return res;
  }
  WindowedMap m = windowed_from_json(load_json_arg(o.map, "map"));
  res.report["input"] = {{"map", to_json(m)}, {"k", o.k}, {"depth", o.depth}};
  ChainReport s = windowed_string_bound(m, o.k, o.depth);
  ChainReport orb = infinite_orbit_bound(m, o.k, o.depth);
  if (s.budget_exhausted) throw BoundExhausted("string packing search ran out of budget");
  res.report["string_bound"] = to_json(s);
  res.report["orbit_bound"] = to_json(orb);
  if (!o.materialize.empty()) res.report["materialized"] = fg_dynamics_json(generalized_shift_materialize(m, parse_int(o.materialize, "materialize")));
  res.code = s.consistent && orb.consistent ? kOk : kMismatch;
  return res;
}

// ---------------------------------------------------------------- entropy

struct Model {
  Endomorphism phi;
  json echo;
  bool window = false;  // F and N have window defaults
};

inline Model load_model(const Options& o) {
  const int given = !o.group.empty() + !o.shift.empty() + !o.lambda.empty() + !o.map.empty();
  if (given != 1) throw ValidationError("model", "give exactly one of --group/--endo, --shift, --lambda and --map");
  const Int K = parse_int(o.K.empty() ? "2" : o.K, "K");
  if (K < 2) throw ValidationError("K", "need |K| >= 2");
  if (!o.group.empty()) {
    FgGroup g;
    Endomorphism phi = load_endo(o, g);
    return {phi, input_echo(g, phi), false};
  }
  if (!o.shift.empty()) {
    if (o.window == 0) throw WindowTooSmall("empty window");
    return {bernoulli_window(parse_shift(o.shift), K, o.window),
            {{"shift", o.shift}, {"K", int_to_json(K)}, {"window", o.window}}, true};
  }
  WindowedMap m = o.lambda.empty() ? windowed_from_json(load_json_arg(o.map, "map")) : builtin_window(parse_builtin(o.lambda), o.window);
  return {generalized_shift_materialize(m, K), {{"map", to_json(m)}, {"K", int_to_json(K)}}, true};
}

inline Result entropy_curve(const Options& o, bool traj) {
  Model md = load_model(o);
  const FgGroup& g = md.phi.group();
  Result res;
  res.report = report_header(traj ? "entropy traj" : "entropy cotraj");
  res.report["input"] = md.echo;
  const std::string& sub = traj ? o.F : o.N;
  const char* name = traj ? "F" : "N";
  Subgroup H = Subgroup::trivial(g);
  if (!sub.empty()) {
    H = generated_from_json(g, load_json_arg(sub, name), name);
  } else if (md.window) {
    H = traj ? first_coordinate(g) : last_coordinate_kernel(g);
  } else {
    throw ValidationError(name, std::string("--") + name + " is required for --group/--endo models");
  }
  res.report["input"][name] = to_json(H);
  GrowthCurve c = traj ? trajectory_growth(md.phi, H, o.n_max) : cotrajectory_growth(md.phi, H, o.n_max);
  res.report["curve"] = to_json(c);
  json v = {{"limit", limit_name(c.limit)}, {"n_max", o.n_max}, {"final_log_slope", c.log_slope(c.sizes.size())}};
  if (c.ratio) v["value"] = {{"ratio", int_to_json(*c.ratio)}, {"log", c.limit_log()}};
  if (!traj) v["note"] = "cotrajectory limits are lower bounds; unbounded means the ratio still exceeds 1 at n_max";
  res.report["verdict"] = v;
  res.csv = growth_csv(c);
  return res;
}

inline Result entropy_estimate_cmd(const Options& o) {
  Model md = load_model(o);
  EntropyOptions eo;
  eo.exhaustive = !o.sampled;
  eo.n_max = o.n_max;
  eo.samples = o.samples;
  eo.seed = o.seed;
  EntropyEstimate e = entropy_estimate(md.phi, eo);
  Result res;
  res.report = report_header("entropy estimate");
  res.report["input"] = md.echo;
  res.report["options"] = {{"exhaustive", eo.exhaustive}, {"n_max", eo.n_max}, {"samples", eo.samples}, {"seed", eo.seed}};
  res.report["estimate"] = {{"status", limit_name(e.status)}, {"ratio", int_to_json(e.ratio)}, {"log", e.value()},
                            {"subgroups", e.subgroups}, {"detected", e.detected}};
  return res;
}

inline Result shift_check_cmd(const Options& o) {
  if (o.lambda.empty()) throw ValidationError("lambda", "--lambda is required");
  const Builtin b = parse_builtin(o.lambda);
  const Int K = parse_int(o.K.empty() ? "2" : o.K, "K");
  if (K < 2) throw ValidationError("K", "need |K| >= 2");
  std::vector<std::size_t> ws;
  for (const auto& w : parse_int_list(o.windows, "windows")) {
    if (w < 2 || w > 4096) throw WindowTooSmall("window " + w.str() + " outside [2, 4096]");
    ws.push_back(w.convert_to<std::size_t>());
  }
  ShiftFormulaReport rep = shift_formula_check(b, K, ws);
  Result res;
  res.report = report_header("entropy shift-check");
  res.report["input"] = {{"lambda", builtin_name(b)}, {"K", int_to_json(K)}, {"windows", ws}};
  json wins = json::array();
  std::ostringstream csv;
  csv << "window,n,ratio,expected\n";
  for (const auto& w : rep.windows) {
    json ratios = json::array();
    for (std::size_t i = 0; i < w.ratios.size(); ++i) {
      ratios.push_back(int_to_json(w.ratios[i]));
      csv << w.window << "," << i + 1 << "," << w.ratios[i].str() << "," << rep.expected_ratio.str() << "\n";
    }
    wins.push_back({{"window", w.window}, {"ratios", ratios}, {"matches", w.matches}});
  }
  res.report["windows"] = wins;
  res.report["string_number"] = rep.s;
  res.report["expected_ratio"] = int_to_json(rep.expected_ratio);
  res.report["all_match"] = rep.all_match();
  res.csv = csv.str();
  res.code = rep.all_match() ? kOk : kMismatch;
  return res;
}

// ---------------------------------------------------------------- catalog

inline json to_json(const PredicateProfile& p) {
  auto one = [](const Predicate& q) { return json{{"value", q.value}, {"trace", q.trace}}; };
  json j = {{"p", int_to_json(p.p)}, {"is_torsion", one(p.is_torsion)}, {"tp_nontrivial", one(p.tp_nontrivial)},
            {"dp_in_torsion", one(p.dp_in_torsion)}, {"dp_tp_trivial", one(p.dp_tp_trivial)}, {"reduced", one(p.reduced)}};
  if (p.p_omega_trivial) j["p_omega_trivial"] = one(*p.p_omega_trivial);
  return j;
}

inline Result catalog_mu(const Options& o) {
  if (o.group.empty()) throw ValidationError("group", "--group is required");
  if (o.p.empty() == o.m.empty()) throw ValidationError("p", "give exactly one of --p and --m");
  GroupExpr g = parse_group_expr(o.group);
  Result res;
  res.report = report_header("catalog mu");
  res.report["input"] = {{"group", g.str()}};
  if (!o.p.empty()) {
    const Int p = parse_int(o.p, "p");
    res.report["input"]["p"] = int_to_json(p);
    res.report["verdicts"] = to_json(mu_p_verdicts(g, p));
    res.report["predicates"] = to_json(eval_predicates(g, p));
  } else {
    const Int m = parse_int(o.m, "m");
    res.report["input"]["m"] = int_to_json(m);
    res.report["verdicts"] = to_json(mu_verdicts(g, m));
  }
  res.report["witness_requested"] = false;
  return res;
}

inline Result catalog_bernoulli(const Options& o) {
  if (o.shift.empty()) throw ValidationError("shift", "--shift is required");
  const Shift s = parse_shift(o.shift);
  std::string ktext = o.K.empty() ? "2" : o.K;
  if (ktext.find_first_not_of("0123456789") == std::string::npos) ktext = "Z/" + ktext;
  GroupExpr K = parse_group_expr(ktext, false);
  VerdictTriple t = bernoulli_verdicts(s, K);
  Result res;
  res.report = report_header("catalog bernoulli");
  res.report["input"] = {{"shift", shift_name(s)}, {"K", K.str()}};
  res.report["verdicts"] = to_json(t);
  res.report["witness_requested"] = !o.witnesses.empty();
  if (o.witnesses.empty()) return res;
  if (o.count == 0 || o.length == 0) throw ValidationError("count", "--count and --length must be positive");
  std::vector<StringKind> kinds;
  if (o.witnesses == "all") {
    kinds = {StringKind::S, StringKind::NS, StringKind::S0};
  } else {
    kinds = {parse_kind(o.witnesses)};
  }
  json ws = json::object();
  for (StringKind k : kinds) {
    if (pick(t, k).value != VerdictValue::Infinite && o.witnesses == "all") continue;
    json r;
    int code = attach_witness<BernoulliWitness>(r, bernoulli_witness(s, K, k, o.count, o.length), [&](const BernoulliWitness& b) {
      json sec = witness_section(fg_dynamics_json(b.model), to_json(b.family));
      sec["window_lo"] = b.lo;
      return sec;
    });
    res.code = std::max(res.code, code);
    ws[kind_name(k)] = r;
  }
  res.report["witnesses"] = ws;
  return res;
}

// ---------------------------------------------------------------- tables

inline json cells_json(const std::vector<TableCell>& cells, bool& all) {
  json a = json::array();
  for (const auto& c : cells) {
    a.push_back({{"row", c.row}, {"column", c.column}, {"expected", c.expected}, {"observed", c.observed}, {"match", c.match}});
    all = all && c.match;
  }
  return a;
}

inline std::string cells_text(const std::string& title, const std::vector<TableCell>& cells) {
  std::ostringstream os;
  os << title << "\n";
  std::string row;
  for (const auto& c : cells) {
    if (c.row != row) {
      if (!row.empty()) os << "\n";
      row = c.row;
      os << "  " << row << ":";
    }
    os << " " << c.column << "=" << c.observed << (c.match ? "" : " (expected " + c.expected + ")");
  }
  os << "\n";
  return os.str();
}

inline Result tables_cmd(const Options& o) {
  const Int p = o.p.empty() ? Int(2) : parse_int(o.p, "p");
  const Int q = o.m.empty() ? Int(3) : parse_int(o.m, "q");
  if (!is_probable_prime(p) || !is_probable_prime(q) || p == q) throw ValidationError("p", "need two distinct primes");
  Table1Options t1;
  t1.K = parse_int(o.K.empty() ? "2" : o.K, "K");
  t1.window = o.window;
  t1.count = o.count;
  t1.length = o.length;
  auto c1 = table1_cells(t1);
  auto c2 = table2_cells(p, q);
  bool all = true;
  Result res;
  res.report = report_header("tables");
  res.report["table1"] = {{"K", int_to_json(t1.K)}, {"cells", cells_json(c1, all)}};
  res.report["table2"] = {{"p", int_to_json(p)}, {"q", int_to_json(q)}, {"cells", cells_json(c2, all)}};
  res.report["match"] = all;
  res.csv = cells_text("Table 1 (Bernoulli shifts, K = Z/" + t1.K.str() + ")", c1) +
            cells_text("Table 2 (mu_p, p = " + p.str() + ", q = " + q.str() + ")", c2);
  res.code = all ? kOk : kMismatch;
  return res;
}

// ---------------------------------------------------------------- errors

inline std::string error_type(const std::exception& e) {
#define STRINGDYN_TYPE(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  STRINGDYN_TYPE(ValidationError)
  STRINGDYN_TYPE(DimensionMismatch)
  STRINGDYN_TYPE(AmbientMismatch)
  STRINGDYN_TYPE(BoundExhausted)
  STRINGDYN_TYPE(CertificateFailure)
  STRINGDYN_TYPE(MixedBackend)
  STRINGDYN_TYPE(UnsupportedBackend)
  STRINGDYN_TYPE(WindowTooSmall)
  STRINGDYN_TYPE(NotFiniteToOne)
  STRINGDYN_TYPE(NotFinite)
  STRINGDYN_TYPE(InfiniteIndex)
  STRINGDYN_TYPE(AmbientInfinite)
  STRINGDYN_TYPE(TrivialK)
#undef STRINGDYN_TYPE
  return "Error";
}

inline Result error_result(const std::exception& e) {
  Result res;
  json err = {{"type", error_type(e)}, {"message", e.what()}};
  if (auto* v = dynamic_cast<const ValidationError*>(&e)) err["path"] = v->path();
  res.report = {{"error", err}};
  res.code = dynamic_cast<const CertificateFailure*>(&e) ? kMismatch : kInput;
  return res;
}

// ---------------------------------------------------------------- dispatch

struct Parsed {
  Options opt;
  std::string command;  // "endo profile", "tables", ...
  std::string out, recheck;
  bool timing = false;
};

inline void build_app(CLI::App& app, Parsed& p) {
  Options& o = p.opt;
  app.add_option("--out", p.out, "write the report to FILE");
  app.add_option("--recheck", p.recheck, "re-verify the witness sections of a report using apply and compare only");
  app.add_flag("--timing", p.timing, "add wall-clock timing to the report");
  app.require_subcommand(0, 1);
  app.fallthrough();

  auto endo_in = [&](CLI::App* c) {
    c->add_option("--group", o.group, "group JSON (file or inline)");
    c->add_option("--endo", o.endo, "endomorphism JSON (file or inline)");
  };
  auto window_model = [&](CLI::App* c) {
    endo_in(c);
    c->add_option("--shift", o.shift, "right|left|two_sided");
    c->add_option("--lambda", o.lambda, "built-in self-map: succ|pred_floor|shift_z");
    c->add_option("--map", o.map, "windowed map JSON");
    c->add_option("--K", o.K, "|K| of the coordinate group Z/K");
    c->add_option("--window", o.window, "window size");
    c->add_option("--n-max", o.n_max, "horizon");
    c->add_option("--csv", o.csv, "write the curve as CSV to FILE");
    c->add_option("--format", o.format, "json|csv on standard output")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* endo = app.add_subcommand("endo", "endomorphisms of finitely generated groups");
  endo->require_subcommand(1);
  auto* prof = endo->add_subcommand("profile", "Per, QPer, hyperkernel, surjective core and verdicts");
  endo_in(prof);
  prof->callback([&] { p.command = "endo profile"; });
  auto* str = endo->add_subcommand("strings", "string-number verdicts and witness families");
  endo_in(str);
  str->add_option("--kind", o.kind, "s|ns|s0");
  str->add_option("--count", o.count, "number of strings");
  str->add_option("--length", o.length, "prefix length");
  str->add_option("--multipliers", o.multipliers, "explicit fan multipliers, comma separated");
  str->add_flag("--no-garland", o.no_garland, "skip the garland attempt");
  str->add_option("--backend", o.backend, "q|prufer:p|qmodz instead of --group/--endo");
  str->add_option("--multiplier", o.multiplier, "multiplier for --backend");
  str->callback([&] { p.command = "endo strings"; });

  auto* sm = app.add_subcommand("selfmap", "orbits and string bounds of self-maps");
  sm->add_option("--graph", o.graph, "functional graph JSON");
  sm->add_option("--map", o.map, "windowed map JSON");
  sm->add_option("--k", o.k, "family size to look for");
  sm->add_option("--depth", o.depth, "chain length");
  sm->add_option("--materialize", o.materialize, "also emit the generalized shift over Z/K");
  sm->callback([&] { p.command = "selfmap"; });

  auto* ent = app.add_subcommand("entropy", "trajectory growth and entropy");
  ent->require_subcommand(1);
  auto* traj = ent->add_subcommand("traj", "trajectory sizes |T_n|");
  window_model(traj);
  traj->add_option("--F", o.F, "generators of the finite subgroup F (JSON)");
  traj->callback([&] { p.command = "entropy traj"; });
  auto* cot = ent->add_subcommand("cotraj", "cotrajectory sizes |C_n|");
  window_model(cot);
  cot->add_option("--N", o.N, "generators of the finite-index subgroup N (JSON)");
  cot->callback([&] { p.command = "entropy cotraj"; });
  auto* est = ent->add_subcommand("estimate", "sup of trajectory limits over cyclic subgroups");
  window_model(est);
  est->add_flag("--sampled", o.sampled, "sample cyclic subgroups instead of sweeping all");
  est->add_option("--samples", o.samples, "number of samples");
  est->add_option("--seed", o.seed, "sampling seed");
  est->callback([&] { p.command = "entropy estimate"; });
  auto* sc = ent->add_subcommand("shift-check", "compare trajectory ratios with |K|^s");
  sc->add_option("--lambda", o.lambda, "succ|pred_floor|shift_z")->required();
  sc->add_option("--K", o.K, "|K|");
  sc->add_option("--windows", o.windows, "comma separated window sizes");
  sc->add_option("--csv", o.csv, "write ratios as CSV to FILE");
  sc->callback([&] { p.command = "entropy shift-check"; });

  auto* cat = app.add_subcommand("catalog", "verdicts on symbolic groups");
  cat->require_subcommand(1);
  auto* mu = cat->add_subcommand("mu", "multiplication by p or m");
  mu->add_option("--group", o.group, "group expression, e.g. Sum(Q,Prufer(2))");
  mu->add_option("--p", o.p, "prime");
  mu->add_option("--m", o.m, "integer multiplier");
  mu->callback([&] { p.command = "catalog mu"; });
  auto* be = cat->add_subcommand("bernoulli", "Bernoulli shifts over K");
  be->add_option("--shift", o.shift, "right|left|two_sided");
  be->add_option("--K", o.K, "group expression for K (default Z/2)");
  be->add_option("--witnesses", o.witnesses, "s|ns|s0|all");
  be->add_option("--count", o.count, "strings per witness family");
  be->add_option("--length", o.length, "prefix length");
  be->callback([&] { p.command = "catalog bernoulli"; });

  auto* tab = app.add_subcommand("tables", "reproduce both verdict tables");
  tab->add_option("--p", o.p, "first prime (default 2)");
  tab->add_option("--q", o.m, "second prime (default 3)");
  tab->add_option("--K", o.K, "|K| for the Bernoulli table");
  tab->add_option("--window", o.window, "window for the entropy cells");
  tab->add_option("--count", o.count, "witness family size");
  tab->add_option("--length", o.length, "witness prefix length");
  tab->add_option("--format", o.format, "json|text")->check(CLI::IsMember({"json", "text"}));
  tab->callback([&] { p.command = "tables"; });

  auto* batch = app.add_subcommand("batch", "run the jobs of a manifest");
  batch->add_option("manifest", o.manifest, "manifest JSON {\"jobs\": [{\"id\", \"args\"}]}")->required();
  batch->callback([&] { p.command = "batch"; });
}

inline Result run_command(const Parsed& p);

inline Result run_batch(const Options& o) {
  json m = load_json_arg(o.manifest, "manifest");
  const json& jobs = field(m, "jobs", "manifest");
  if (!jobs.is_array()) throw ValidationError("manifest.jobs", "expected an array");
  struct Job {
    std::string id;
    std::vector<std::string> args;
    Result res;
  };
  std::vector<Job> todo;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string path = "manifest.jobs[" + std::to_string(i) + "]";
    const json& id = field(jobs[i], "id", path);
    if (!id.is_string()) throw ValidationError(path + ".id", "expected a string");
    if (!ids.insert(id.get<std::string>()).second) throw ValidationError(path + ".id", "duplicate job id");
    const json& args = field(jobs[i], "args", path);
    if (!args.is_array()) throw ValidationError(path + ".args", "expected an array of strings");
    Job j{id.get<std::string>(), {}, {}};
    for (const auto& a : args) {
      if (!a.is_string()) throw ValidationError(path + ".args", "expected an array of strings");
      j.args.push_back(a.get<std::string>());
    }
    if (!j.args.empty() && j.args.front() == "batch") throw ValidationError(path + ".args", "nested batch");
    todo.push_back(std::move(j));
  }
  std::sort(todo.begin(), todo.end(), [](const Job& a, const Job& b) { return a.id < b.id; });
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < todo.size();) {
      Job& j = todo[i];
      CLI::App app{"stringdyn"};
      Parsed p;
      build_app(app, p);
      std::vector<std::string> rev(j.args.rbegin(), j.args.rend());
      try {
        app.parse(rev);
        if (p.command.empty()) throw ValidationError("args", "no subcommand");
        j.res = run_command(p);
      } catch (const CLI::ParseError& e) {
        j.res.report = {{"error", {{"type", "ParseError"}, {"message", e.what()}}}};
        j.res.code = kInput;
      } catch (const std::exception& e) {
        j.res = error_result(e);
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min<std::size_t>(todo.size(), std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  Result res;
  res.report = report_header("batch");
  json out = json::array();
  for (const auto& j : todo) {
    out.push_back({{"id", j.id}, {"args", j.args}, {"exit", j.res.code}, {"report", j.res.report}});
    res.code = std::max(res.code, j.res.code);
  }
  res.report["jobs"] = out;
  return res;
}

inline Result run_command(const Parsed& p) {
  const Options& o = p.opt;
  if (p.command == "endo profile") return endo_profile(o);
  if (p.command == "endo strings") return endo_strings(o);
  if (p.command == "selfmap") return selfmap_cmd(o);
  if (p.command == "entropy traj") return entropy_curve(o, true);
  if (p.command == "entropy cotraj") return entropy_curve(o, false);
  if (p.command == "entropy estimate") return entropy_estimate_cmd(o);
  if (p.command == "entropy shift-check") return shift_check_cmd(o);
  if (p.command == "catalog mu") return catalog_mu(o);
  if (p.command == "catalog bernoulli") return catalog_bernoulli(o);
  if (p.command == "tables") return tables_cmd(o);
  if (p.command == "batch") return run_batch(o);
  throw ValidationError("command", "unknown command '" + p.command + "'");
}

inline Result recheck_cmd(const std::string& file) {
  json rep = read_json_file(file, "recheck");
  RecheckResult r = recheck_report(rep);
  Result res;
  res.report = report_header("recheck");
  res.report["file"] = file;
  res.report["recheck"] = to_json(r);
  res.code = r.ok() ? kOk : kMismatch;
  return res;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ValidationError("out", "cannot write '" + path + "'");
  f << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stringdyn: string numbers, orbits and entropy of endomorphisms"};
  app.name("stringdyn");
  Parsed p;
  build_app(app, p);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInput;
  }
  if (p.command.empty() && p.recheck.empty()) {
    err << app.help();
    return kInput;
  }
  const auto t0 = std::chrono::steady_clock::now();
  Result res;
  try {
    if (!p.command.empty() && !p.recheck.empty()) throw ValidationError("recheck", "--recheck takes no subcommand");
    res = p.command.empty() ? recheck_cmd(p.recheck) : run_command(p);
    if (p.timing)
      res.report["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!p.opt.csv.empty() && !res.csv.empty() && p.command != "tables") write_text(p.opt.csv, res.csv);
    const bool csv_out = (p.opt.format == "csv" || p.opt.format == "text") && !res.csv.empty();
    if (!p.out.empty()) {
      write_text(p.out, dump(res.report));
      if (csv_out) out << res.csv;
    } else {
      out << (csv_out ? res.csv : dump(res.report));
    }
  } catch (const std::exception& e) {
    res = error_result(e);
    err << dump(res.report);
  }
  return res.code;
}

}  // namespace stringdyn::cli
