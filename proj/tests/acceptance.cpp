// One line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include "support.hpp"

#include "stringdyn/catalog.hpp"
#include "stringdyn/concrete.hpp"
#include "stringdyn/entropy.hpp"

#include <json.hpp>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace testkit;
using nlohmann::json;

namespace {

// wall-clock limits in seconds
constexpr double kLimitAC1 = 5, kLimitAC2 = 30, kLimitAC3 = 60, kLimitAC4 = 60, kLimitAC5 = 5, kLimitAC6 = 600,
                 kLimitAC7 = 300, kLimitAC8 = 10;
constexpr double kSlopeFloor = 0.5;  // AC4: slope at window 12 must exceed this times log 2

struct Check {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, double limit, const std::function<void(Check&)>& body) {
  Check o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.pass && secs >= limit) o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(limit) + " s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2fs", secs);
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << title << " (" << buf << ")";
  if (!o.detail.empty()) std::cout << ": " << o.detail;
  std::cout << std::endl;
  if (!o.pass) ++failures;
}

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("stringdyn_accept_" + name)).string();
}

int run_cli(const std::string& args, const std::string& out_file) {
  const std::string cmd = std::string(STRINGDYN_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  return json::parse(f);
}

std::string triple(const VerdictTriple& t) {
  return cell_value(t.s.value) + "," + cell_value(t.ns.value) + "," + cell_value(t.s0.value);
}

template <class T>
bool pairwise_distinct(const std::vector<T>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] == xs[j]) return false;
  return true;
}

// Truncated shifts acting directly on coordinates: left reads x_{i+1}, two-sided reads x_{i-1}.
Vec shift_coords(Shift s, const Vec& x, const Int& K) {
  const std::size_t w = x.size();
  Vec y(w, Int(0));
  for (std::size_t i = 0; i < w; ++i) {
    if (s == Shift::Left && i + 1 < w) y[i] = x[i + 1];
    if (s != Shift::Left && i > 0) y[i] = x[i - 1];
    y[i] = mod_floor(y[i], K);
  }
  return y;
}

Rational frac(const Rational& r) {
  const Int q = numerator(r) / denominator(r) - (numerator(r) < 0 && numerator(r) % denominator(r) != 0 ? 1 : 0);
  return r - Rational(q);
}

}  // namespace

int main() {
  criterion("AC1", "mu_p table via `stringdyn tables`, p = 2, q = 3", kLimitAC1, [](Check& o) {
    const std::string f = tmp("tables.json");
    if (run_cli("tables", f) != 0) return o.fail("tables exited nonzero");
    const json rep = read_json(f);
    std::map<std::string, std::map<std::string, std::string>> got;
    for (const auto& c : rep["table2"]["cells"]) got[c["row"]][c["column"]] = c["observed"];
    const std::vector<std::pair<std::string, std::string>> expect = {
        {"Z", "0,0,0"},         {"Q", "inf,inf,0"}, {"Prufer(p)", "inf,0,inf"}, {"Prufer(q)", "0,0,0"},
        {"QmodZ", "inf,0,inf"}, {"J(p)", "0,0,0"},  {"J(q)", "inf,inf,0"}};
    if (got.size() != expect.size()) o.fail("expected 7 rows, got " + std::to_string(got.size()));
    for (const auto& [row, t] : expect) {
      const std::string g = got[row]["s"] + "," + got[row]["ns"] + "," + got[row]["s0"];
      if (g != t) o.fail(row + ": " + g + " != " + t);
    }
  });

  criterion("AC2", "Bernoulli verdicts with verified witness families 5 x 20", kLimitAC2, [](Check& o) {
    const GroupExpr K = parse_group_expr("Z/2");
    const std::vector<std::tuple<Shift, std::string>> rows = {
        {Shift::Right, "0,0,0"}, {Shift::Left, "inf,0,inf"}, {Shift::TwoSided, "inf,inf,0"}};
    std::size_t families = 0;
    for (const auto& [s, expect] : rows) {
      const VerdictTriple t = bernoulli_verdicts(s, K);
      if (triple(t) != expect) o.fail(shift_name(s) + ": " + triple(t) + " != " + expect);
      const std::pair<StringKind, const Verdict*> cells[] = {{StringKind::S, &t.s}, {StringKind::NS, &t.ns}, {StringKind::S0, &t.s0}};
      for (const auto& [kind, v] : cells) {
        if (v->value != VerdictValue::Infinite) continue;
        auto w = bernoulli_witness(s, K, kind, 5, 20);
        const std::string tag = shift_name(s) + "/" + kind_name(kind);
        if (!ok(w)) {
          o.fail(tag + ": " + std::get<Failure>(w).detail);
          continue;
        }
        const auto& bw = std::get<BernoulliWitness>(w);
        if (!bw.family.evidence.guaranteed) o.fail(tag + ": disjointness not guaranteed by a theorem");
        if (bw.family.strings.size() != 5) o.fail(tag + ": family size");
        std::vector<Vec> all;
        for (const auto& str : bw.family.strings) {
          if (str.terms.size() != 20) o.fail(tag + ": prefix length");
          for (std::size_t n = 0; n < str.terms.size(); ++n) {
            all.push_back(str.terms[n]);
            if (n > 0 && shift_coords(s, str.terms[n], 2) != str.terms[n - 1]) o.fail(tag + ": backward relation");
          }
          if (kind == StringKind::S0) {
            Vec x = str.terms[0];
            for (std::size_t k = 0; k < x.size() + 1; ++k) x = shift_coords(s, x, 2);
            if (x != Vec(x.size(), Int(0)) || str.terms[0] == x) o.fail(tag + ": not null");
          }
        }
        if (!pairwise_distinct(all)) o.fail(tag + ": prefixes meet");
        ++families;
      }
    }
    if (families != 4) o.fail("expected 4 witness families, built " + std::to_string(families));
  });

  criterion("AC3", "trajectory ratio equals |K|^s(lambda), windows 2..12", kLimitAC3, [](Check& o) {
    const std::vector<std::size_t> windows = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    const std::vector<std::pair<Builtin, int>> lambdas = {{Builtin::PredFloor, 1}, {Builtin::Succ, 0}, {Builtin::ShiftZ, 1}};
    for (const auto& [b, s] : lambdas)
      for (int K = 2; K <= 4; ++K) {
        auto rep = shift_formula_check(b, K, windows);
        const Int want = s == 1 ? Int(K) : Int(1);
        if (rep.expected_ratio != want) o.fail(builtin_name(b) + ": expected ratio " + rep.expected_ratio.str());
        for (const auto& w : rep.windows) {
          if (!w.matches) o.fail(builtin_name(b) + " K=" + std::to_string(K) + " window " + std::to_string(w.window));
          for (const auto& r : w.ratios)
            if (r != want) o.fail(builtin_name(b) + " K=" + std::to_string(K) + ": ratio " + r.str());
        }
      }
    for (const auto& c : table1_cells())
      if (c.column == "ent" && !c.match) o.fail("Bernoulli entropy cell " + c.row + ": " + c.observed);
  });

  criterion("AC4", "cotrajectory slope of truncated right shift over Z/2, windows 4, 8, 12", kLimitAC4, [](Check& o) {
    const std::size_t horizon = 12;
    double prev = -1;
    for (std::size_t w : {4u, 8u, 12u}) {
      Endomorphism b = bernoulli_window(Shift::Right, 2, w);
      auto c = cotrajectory_growth(b, last_coordinate_kernel(b.group()), horizon);
      const double slope = c.log_slope(horizon);
      if (slope < prev) o.fail("slope decreased at window " + std::to_string(w));
      prev = slope;
      if (w == 12) {
        if (!(slope > kSlopeFloor * std::log(2.0))) o.fail("slope " + std::to_string(slope) + " at window 12");
        if (c.limit != LimitKind::Unbounded) o.fail("Unbounded flag not set at window 12");
      }
    }
  });

  criterion("AC5", "Shear: Per, verdicts, fan of 10 prefixes of length 50, recheck", kLimitAC5, [](Check& o) {
    const FgGroup z2 = FgGroup::free(2);
    const Endomorphism phi(z2, Matrix{{1, 1}, {0, 1}}, Matrix(0, 2), Matrix(0, 0));
    DynamicalProfile prof = dynamical_profile(phi);
    if (prof.per != Subgroup::generated(z2, {{1, 0}})) o.fail("Per is not <e1>");
    const VerdictTriple t = string_verdicts(prof);
    if (triple(t) != "inf,inf,0") o.fail("verdicts " + triple(t));
    std::vector<Int> mults;
    for (int k = 1; k <= 10; ++k) mults.push_back(k);
    WitnessOptions opt;
    opt.multipliers = mults;
    opt.try_garland = false;
    auto w = witness_family(phi, prof, StringKind::NS, 10, 50, opt);
    if (!ok(w)) return o.fail(std::get<Failure>(w).detail);
    const auto& fam = std::get<FgWitness>(w).family;
    if (fam.strategy != Strategy::Fan || !fam.evidence.guaranteed) o.fail("family is not a guaranteed fan");
    if (fam.strings.size() != 10) o.fail("family size");
    std::vector<Vec> all;
    for (const auto& s : fam.strings) {
      if (s.terms.size() != 50) o.fail("prefix length");
      if (prof.qper.contains(s.terms[0])) o.fail("singular first term");
      for (std::size_t n = 0; n < s.terms.size(); ++n) {
        all.push_back(s.terms[n]);
        const Vec& x = s.terms[n];
        if (n > 0 && Vec{x[0] + x[1], x[1]} != s.terms[n - 1]) o.fail("backward relation");
      }
    }
    if (!pairwise_distinct(all)) o.fail("prefixes meet");

    const std::string dir = STRINGDYN_SAMPLES_DIR;
    const std::string rep = tmp("shear.json"), chk = tmp("shear_recheck.json");
    const std::string args = "endo strings --group " + dir + "/shear_group.json --endo " + dir +
                             "/shear_endo.json --kind ns --count 10 --length 50 --multipliers 1,2,3,4,5,6,7,8,9,10 "
                             "--no-garland --out " + rep;
    if (run_cli(args, chk) != 0) return o.fail("endo strings exited nonzero");
    if (run_cli("--recheck " + rep, chk) != 0) return o.fail("recheck exited nonzero");
    const json r = read_json(chk)["recheck"];
    if (!r["ok"].get<bool>() || r["prefixes"] != 10 || r["terms"] != 500) o.fail("recheck report " + r.dump());
  });

  criterion("AC6", "verdict laws on 500 random endomorphisms", kLimitAC6, [](Check& o) {
    Rng rng(20260601);
    LawReport rep;
    for (int t = 0; t < 500; ++t) {
      FgGroup g = random_group(rng);
      check_laws(random_endo(g, rng), rng, rep, g.str() + "#" + std::to_string(t));
    }
    if (!rep.failures.empty()) o.fail(std::to_string(rep.failures.size()) + " failures, first: " + rep.failures.front());
    o.detail = o.pass ? std::to_string(rep.checks) + " checks" : o.detail;
  });

  criterion("AC7", "Per, QPer, hyperkernel, sc against brute force on finite groups", kLimitAC7, [](Check& o) {
    std::size_t cases = 0, bad = 0;
    auto probe = [&](const Endomorphism& phi) {
      FiniteOracle orc(phi);
      DynamicalProfile p = dynamical_profile(phi);
      ++cases;
      const bool same = orc.per() == orc.members(p.per) && orc.qper() == orc.members(p.qper) &&
                        orc.hyperkernel() == orc.members(p.hyperkernel) &&
                        orc.surjective_core() == orc.members(p.surjective_core);
      if (!same) {
        ++bad;
        o.fail("discrepancy on " + phi.group().str());
      }
    };
    const FgGroup g(0, {2, 8});
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 8; ++d) probe(Endomorphism(g, Matrix(0, 0), Matrix(2, 0), Matrix{{a, b}, {4 * c, d}}));
    Rng rng(20260602);
    for (int t = 0; t < 200; ++t) {
      FgGroup h = random_finite_group(rng, 512);
      probe(random_endo(h, rng, 20));
    }
    if (cases != 264) o.fail("ran " + std::to_string(cases) + " cases");
    if (o.pass) o.detail = std::to_string(cases) + " cases";
    else o.detail += " (" + std::to_string(bad) + " total)";
  });

  criterion("AC8", "Prufer(2): garland m = 10, N = 30, convex garland, multiplier law m <= 20", kLimitAC8, [](Check& o) {
    auto check_family = [&](const WitnessFamily<PruferElement>& f, const std::string& tag, bool null) {
      if (f.strings.size() != 10) o.fail(tag + ": family size");
      std::vector<Rational> all;
      for (const auto& s : f.strings) {
        if (s.terms.size() != 30) o.fail(tag + ": prefix length");
        for (std::size_t n = 0; n < s.terms.size(); ++n) {
          all.push_back(s.terms[n].value());
          if (n > 0 && frac(2 * s.terms[n].value()) != s.terms[n - 1].value()) o.fail(tag + ": backward relation");
        }
        if (null) {
          Rational x = s.terms[0].value();
          if (x == 0) o.fail(tag + ": zero first term");
          for (int k = 0; k < 64 && x != 0; ++k) x = frac(2 * x);
          if (x != 0) o.fail(tag + ": not null");
        }
      }
      if (!pairwise_distinct(all)) o.fail(tag + ": prefixes meet");
    };
    auto g = prufer_garland(2, 10, 30, GarlandVariant::Plain);
    if (!ok(g)) return o.fail("garland: " + std::get<Failure>(g).detail);
    check_family(std::get<WitnessFamily<PruferElement>>(g), "garland", true);
    if (!std::get<WitnessFamily<PruferElement>>(g).evidence.guaranteed) o.fail("garland not guaranteed");
    auto c = prufer_garland(2, 10, 30, GarlandVariant::Convex);
    if (!ok(c)) return o.fail("convex garland: " + std::get<Failure>(c).detail);
    check_family(std::get<WitnessFamily<PruferElement>>(c), "convex", false);
    for (int p : {2, 3})
      for (int m = 1; m <= 20; ++m) {
        std::vector<Rational> t;
        for (int n = 1; n <= 30; ++n) t.push_back(frac(Rational(m, pow_int(Int(p), static_cast<unsigned>(n)))));
        const bool oracle = pairwise_distinct(t);
        const bool law = m % (p * p) != 0;
        const bool lib = prufer_multiple_is_string(p, m, 30);
        if (oracle != law || lib != law)
          o.fail("p=" + std::to_string(p) + " m=" + std::to_string(m) + ": oracle " + std::to_string(oracle) + " library " +
                 std::to_string(lib));
      }
  });

  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
