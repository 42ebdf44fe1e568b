#pragma once

#include "stringdyn/strings.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stringdyn {

class MixedBackend : public Error {
 public:
  using Error::Error;
};

class UnsupportedBackend : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------- Q

inline Rational make_rational(const Int& a, const Int& b) {
  if (b == 0) throw ValidationError("q", "zero denominator");
  return Rational(a, b);
}

inline std::string rational_str(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline Rational parse_rational(const std::string& s, const std::string& path = "q") {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Int(s));
    return make_rational(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError(path, "cannot parse rational '" + s + "'");
  }
}

// Multiplication by a nonzero rational r on Q.
class RationalMul {
 public:
  using element_type = Rational;
  explicit RationalMul(Rational r) : r_(std::move(r)) {}
  Rational apply(const Rational& x) const { return x * r_; }
  Rational add(const Rational& a, const Rational& b) const { return a + b; }
  Rational neg(const Rational& a) const { return -a; }
  Rational zero() const { return Rational(0); }
  Rational scale(const Int& k, const Rational& a) const { return Rational(k) * a; }
  std::optional<Rational> preimage(const Rational& b) const {
    if (r_ == 0) {
      if (b == 0) return Rational(0);
      return std::nullopt;
    }
    return b / r_;
  }
  std::optional<Int> order(const Rational& x) const {
    if (x == 0) return Int(1);
    return std::nullopt;
  }
  const Rational& multiplier() const { return r_; }

 private:
  Rational r_;
};

// ---------------------------------------------------------------- Prufer

// a / p^n + Z with 0 <= a < p^n and p not dividing a unless a = 0, n = 0.
struct PruferElement {
  Int p = 2;
  unsigned n = 0;
  Int a = 0;

  static PruferElement make(const Int& p, Int a, unsigned n) {
    if (!is_probable_prime(p)) throw ValidationError("prufer.p", p.str() + " is not prime");
    Int pn = pow_int(p, n);
    a = mod_floor(a, pn);
    while (n > 0 && a % p == 0) {
      a /= p;
      --n;
    }
    if (a == 0) n = 0;
    return {p, n, a};
  }
  static PruferElement c(const Int& p, unsigned n) { return make(p, 1, n); }

  Int order() const { return pow_int(p, n); }
  Rational value() const { return Rational(a, pow_int(p, n)); }
  friend bool operator<(const PruferElement& x, const PruferElement& y) {
    if (x.p != y.p) return x.p < y.p;
    if (x.n != y.n) return x.n < y.n;
    return x.a < y.a;
  }
  friend bool operator==(const PruferElement& x, const PruferElement& y) { return x.p == y.p && x.n == y.n && x.a == y.a; }
};

inline std::string prufer_str(const PruferElement& x) { return x.a.str() + "/" + x.p.str() + "^" + std::to_string(x.n); }

// Multiplication by an integer m on Z(p^inf).
class PruferMul {
 public:
  using element_type = PruferElement;
  PruferMul(Int p, Int m) : p_(std::move(p)), m_(std::move(m)) {
    if (!is_probable_prime(p_)) throw ValidationError("p", p_.str() + " is not prime");
    u_ = m_;
    j_ = 0;
    if (m_ != 0)
      while (u_ % p_ == 0) {
        u_ /= p_;
        ++j_;
      }
  }

  PruferElement apply(const PruferElement& x) const {
    check(x);
    return PruferElement::make(p_, m_ * x.a, x.n);
  }
  PruferElement add(const PruferElement& x, const PruferElement& y) const {
    check(x);
    check(y);
    unsigned n = std::max(x.n, y.n);
    return PruferElement::make(p_, x.a * pow_int(p_, n - x.n) + y.a * pow_int(p_, n - y.n), n);
  }
  PruferElement neg(const PruferElement& x) const { return PruferElement::make(p_, -x.a, x.n); }
  PruferElement zero() const { return PruferElement{p_, 0, 0}; }
  PruferElement scale(const Int& k, const PruferElement& x) const { return PruferElement::make(p_, k * x.a, x.n); }

  // Smallest value in [0, 1) among the preimages.
  std::optional<PruferElement> preimage(const PruferElement& b) const {
    check(b);
    if (m_ == 0) {
      if (b.a == 0) return zero();
      return std::nullopt;
    }
    const Int pn = pow_int(p_, b.n);
    Int a = b.n ? mod_floor(b.a * inv_mod(u_, pn), pn) : Int(0);
    return PruferElement::make(p_, a, b.n + j_);
  }
  std::optional<Int> order(const PruferElement& x) const { return x.order(); }

  const Int& prime() const { return p_; }
  const Int& multiplier() const { return m_; }

 private:
  void check(const PruferElement& x) const {
    if (x.p != p_) throw MixedBackend("Prufer element for p = " + x.p.str() + " used with p = " + p_.str());
  }
  Int p_, m_, u_;
  unsigned j_ = 0;
};

// ---------------------------------------------------------------- Q/Z

// a/b + Z with 0 <= a < b, reduced.
struct ModOneElement {
  Rational v;
  static ModOneElement make(const Rational& q) {
    Int num = numerator(q), den = denominator(q);
    return {Rational(mod_floor(num, den), den)};
  }
  friend bool operator<(const ModOneElement& x, const ModOneElement& y) { return x.v < y.v; }
  friend bool operator==(const ModOneElement& x, const ModOneElement& y) { return x.v == y.v; }
};

// Primary components of a/b + Z as (q, Prufer element) pairs.
inline std::vector<PruferElement> primary_parts(const ModOneElement& x) {
  std::vector<PruferElement> out;
  const Int a = numerator(x.v), b = denominator(x.v);
  if (b == 1) return out;
  for (const auto& pp : factorize(b)) {
    const Int qe = pow_int(pp.prime, pp.exponent);
    const Int rest = b / qe;
    out.push_back(PruferElement::make(pp.prime, a * inv_mod(rest, qe), pp.exponent));
  }
  return out;
}

inline ModOneElement from_primary(const std::vector<PruferElement>& parts) {
  Rational s = 0;
  for (const auto& p : parts) s += p.value();
  return ModOneElement::make(s);
}

class ModOneMul {
 public:
  using element_type = ModOneElement;
  explicit ModOneMul(Int m) : m_(std::move(m)) {}
  ModOneElement apply(const ModOneElement& x) const { return ModOneElement::make(x.v * Rational(m_)); }
  ModOneElement add(const ModOneElement& x, const ModOneElement& y) const { return ModOneElement::make(x.v + y.v); }
  ModOneElement neg(const ModOneElement& x) const { return ModOneElement::make(-x.v); }
  ModOneElement zero() const { return {Rational(0)}; }
  ModOneElement scale(const Int& k, const ModOneElement& x) const { return ModOneElement::make(x.v * Rational(k)); }
  std::optional<ModOneElement> preimage(const ModOneElement& b) const {
    if (m_ == 0) {
      if (b.v == 0) return zero();
      return std::nullopt;
    }
    std::vector<PruferElement> parts;
    for (const auto& c : primary_parts(b)) {
      auto y = PruferMul(c.p, m_).preimage(c);
      parts.push_back(*y);
    }
    return from_primary(parts);
  }
  std::optional<Int> order(const ModOneElement& x) const { return denominator(x.v); }
  const Int& multiplier() const { return m_; }

 private:
  Int m_;
};

// ---------------------------------------------------------------- verdicts

enum class BackendKind { Rationals, Prufer, QmodZ };

struct MulEndo {
  BackendKind backend = BackendKind::Rationals;
  Int prime = 2;           // the Prufer prime
  Rational multiplier = 2;  // integer on Prufer and Q/Z
};

inline std::string backend_name(const MulEndo& f) {
  switch (f.backend) {
    case BackendKind::Rationals: return "q";
    case BackendKind::Prufer: return "prufer:" + f.prime.str();
    case BackendKind::QmodZ: return "qmodz";
  }
  return "?";
}

inline Int integer_multiplier(const MulEndo& f) {
  if (denominator(f.multiplier) != 1)
    throw ValidationError("multiplier", "must be an integer on " + backend_name(f));
  return numerator(f.multiplier);
}

inline Verdict make_verdict(StringKind k, bool inf, std::string basis) {
  return {k, inf ? VerdictValue::Infinite : VerdictValue::Zero, std::move(basis), {}};
}

inline VerdictTriple concrete_string_numbers(const MulEndo& f) {
  VerdictTriple t;
  switch (f.backend) {
    case BackendKind::Rationals: {
      const Rational& r = f.multiplier;
      if (r == 0 || r == 1 || r == -1) {
        t = {make_verdict(StringKind::S, false, "quasi-periodic"), make_verdict(StringKind::NS, false, "quasi-periodic"),
             make_verdict(StringKind::S0, false, "quasi-periodic")};
      } else {
        t = {make_verdict(StringKind::S, true, "rational-fan"), make_verdict(StringKind::NS, true, "rational-fan"),
             make_verdict(StringKind::S0, false, "injective")};
      }
      break;
    }
    case BackendKind::Prufer: {
      const Int m = integer_multiplier(f);
      if (m != 0 && m % f.prime == 0) {
        t = {make_verdict(StringKind::S, true, "surjective-non-injective:null-garland"),
             make_verdict(StringKind::NS, false, "locally-quasi-periodic"),
             make_verdict(StringKind::S0, true, "surjective-non-injective:null-garland")};
      } else {
        const std::string why = m == 0 ? "quasi-periodic" : "locally-periodic-automorphism";
        t = {make_verdict(StringKind::S, false, why), make_verdict(StringKind::NS, false, why),
             make_verdict(StringKind::S0, false, m == 0 ? why : "injective")};
      }
      break;
    }
    case BackendKind::QmodZ: {
      const Int m = integer_multiplier(f);
      if (m != 0 && abs_int(m) != 1) {
        t = {make_verdict(StringKind::S, true, "contains-divisible-p-torsion:null-garland"),
             make_verdict(StringKind::NS, false, "locally-quasi-periodic"),
             make_verdict(StringKind::S0, true, "contains-divisible-p-torsion:null-garland")};
      } else {
        const std::string why = m == 0 ? "quasi-periodic" : "locally-periodic-automorphism";
        t = {make_verdict(StringKind::S, false, why), make_verdict(StringKind::NS, false, why),
             make_verdict(StringKind::S0, false, m == 0 ? why : "injective")};
      }
      break;
    }
  }
  if (!sum_law_holds(t)) throw CertificateFailure("concrete verdicts violate the sum law");
  return t;
}

// ---------------------------------------------------------------- witnesses

// Q: fan of S = {1/r^n} over primes coprime to r, certified by q-adic valuations.
inline Outcome<WitnessFamily<Rational>> rational_fan(const Rational& r, std::size_t count, std::size_t N,
                                                     std::optional<std::vector<Int>> primes = std::nullopt) {
  if (r == 0 || r == 1 || r == -1) return Failure{Failure::VerdictMismatch, "multiplication by 0 or +-1 has no strings"};
  RationalMul d(r);
  StringPrefix<Rational> S;
  Rational x = 1;
  for (std::size_t n = 0; n < N; ++n) {
    S.terms.push_back(x);
    x /= r;
  }
  S.relation_checked = check_relation(d, S.terms);
  S.distinct_checked = check_distinct(S.terms);
  S.kind = NonSingularCert{"QPer of multiplication by r is 0 and x0 != 0"};
  const Int num = numerator(r), den = denominator(r);
  std::vector<Int> qs;
  if (primes) {
    qs = *primes;
  } else {
    for (unsigned q : primes_up_to(100000)) {
      if (qs.size() == count) break;
      if (num % q != 0 && den % q != 0) qs.push_back(q);
    }
  }
  for (const auto& q : qs)
    if (!is_probable_prime(q) || num % q == 0 || den % q == 0)
      return Failure{Failure::MultiplierExhaustion, q.str() + " is not a prime coprime to r"};
  auto fam = scaled_family(d, S, qs, N);
  if (!ok(fam)) return fam;
  auto& f = std::get<WitnessFamily<Rational>>(fam);
  std::set<Int> distinct(qs.begin(), qs.end());
  if (distinct.size() == qs.size()) {
    f.evidence.guaranteed = true;
    f.evidence.theorem = "valuation-separation";
    f.evidence.notes.push_back("r is a unit at every q, so v_q is constant on q'S and equals 1 exactly when q' = q");
  }
  if (!family_ok_on_prefixes(f.evidence) || !members_distinct(f)) throw CertificateFailure("rational fan failed prefix checks");
  return fam;
}

// Z(p^inf), multiplication by p: S = {c_1, c_2, ...}.
inline StringPrefix<PruferElement> prufer_null_string(const Int& p, std::size_t length) {
  PruferMul d(p, p);
  StringPrefix<PruferElement> S;
  for (std::size_t n = 1; n <= length; ++n) S.terms.push_back(PruferElement::c(p, static_cast<unsigned>(n)));
  S.kind = NullCert{1};
  if (!verify_prefix(d, S)) throw CertificateFailure("prufer string failed verification");
  return S;
}

// Base-p digits of a/p^n at positions 1..n (position i has weight p^{-i}).
inline std::vector<Int> prufer_digits(const PruferElement& x) {
  std::vector<Int> digits(x.n);
  Int a = x.a;
  for (unsigned i = x.n; i-- > 0;) {
    digits[i] = a % x.p;
    a /= x.p;
  }
  return digits;
}

inline Outcome<WitnessFamily<PruferElement>> prufer_garland(const Int& p, std::size_t m, std::size_t N, GarlandVariant v) {
  PruferMul d(p, p);
  auto S = prufer_null_string(p, N + m);
  auto fam = garland_family(d, S, m, N, v);
  if (!ok(fam) || v == GarlandVariant::Plain) return fam;
  // convex members: c_{n+1} + ... + c_{n+k+1} has digit 1 exactly at positions n+1..n+k+1
  auto& f = std::get<WitnessFamily<PruferElement>>(fam);
  bool blocks = true;
  for (std::size_t k = 1; k <= m && blocks; ++k)
    for (std::size_t n = 0; n < N && blocks; ++n) {
      auto dg = prufer_digits(f.strings[k - 1].terms[n]);
      if (dg.size() != n + k + 1) blocks = false;
      for (std::size_t i = 0; i < dg.size() && blocks; ++i) blocks = dg[i] == (i >= n ? 1 : 0);
    }
  if (blocks) {
    f.evidence.guaranteed = true;
    f.evidence.theorem = "digit-blocks";
    f.evidence.notes.push_back("each element is a run of k+1 ones in base p ending at its order, so k and n are determined");
  }
  for (std::size_t k = 0; k < f.strings.size(); ++k) f.strings[k].kind = NullCert{k + 2};
  return fam;
}

// Whether m*S is a string prefix of length N for S = {c_n}.
inline bool prufer_multiple_is_string(const Int& p, const Int& m, std::size_t N) {
  PruferMul d(p, p);
  auto S = prufer_null_string(p, N);
  std::vector<PruferElement> t;
  for (const auto& x : S.terms) t.push_back(d.scale(m, x));
  return check_relation(d, t) && check_distinct(t);
}

inline Outcome<WitnessFamily<ModOneElement>> qmodz_garland(const Int& m, std::size_t count, std::size_t N) {
  if (m == 0 || abs_int(m) == 1) return Failure{Failure::VerdictMismatch, "no strings for multiplier 0 or +-1"};
  const Int p = factorize(m).front().prime;
  ModOneMul d(m);
  // a string through the p-primary part: x_0 of order p killed by m, then solve backwards
  StringPrefix<ModOneElement> S;
  ModOneElement x{Rational(1, p)};
  S.terms.push_back(x);
  for (std::size_t n = 1; n < N + count; ++n) S.terms.push_back(*d.preimage(S.terms.back()));
  S.kind = NullCert{1};
  if (!verify_prefix(d, S)) throw CertificateFailure("Q/Z string failed verification");
  return garland_family(d, S, count, N, GarlandVariant::Plain);
}

using ConcreteFamily = std::variant<WitnessFamily<Rational>, WitnessFamily<PruferElement>, WitnessFamily<ModOneElement>>;

inline Outcome<ConcreteFamily> concrete_family(const MulEndo& f, StringKind kind, std::size_t count, std::size_t N) {
  VerdictTriple t = concrete_string_numbers(f);
  const Verdict& v = kind == StringKind::S ? t.s : kind == StringKind::NS ? t.ns : t.s0;
  if (v.value != VerdictValue::Infinite) return Failure{Failure::VerdictMismatch, kind_name(kind) + " verdict is Zero"};
  auto lift = [](auto fam) -> Outcome<ConcreteFamily> {
    if (!ok(fam)) return std::get<Failure>(fam);
    return ConcreteFamily(std::move(std::get<0>(fam)));
  };
  switch (f.backend) {
    case BackendKind::Rationals: return lift(rational_fan(f.multiplier, count, N));
    case BackendKind::Prufer: {
      const Int m = integer_multiplier(f);
      if (m == f.prime) return lift(prufer_garland(f.prime, count, N, GarlandVariant::Plain));
      PruferMul d(f.prime, m);
      StringPrefix<PruferElement> S;
      S.terms.push_back(PruferElement::c(f.prime, 1));
      for (std::size_t n = 1; n < N + count; ++n) S.terms.push_back(*d.preimage(S.terms.back()));
      S.kind = NullCert{1};
      if (!verify_prefix(d, S)) throw CertificateFailure("Prufer string failed verification");
      return lift(garland_family(d, S, count, N, GarlandVariant::Plain));
    }
    case BackendKind::QmodZ: return lift(qmodz_garland(integer_multiplier(f), count, N));
  }
  throw UnsupportedBackend("unknown backend");
}

inline Outcome<WitnessSummary> concrete_witness(const MulEndo& f, StringKind kind, std::size_t count, std::size_t N) {
  auto fam = concrete_family(f, kind, count, N);
  if (!ok(fam)) return std::get<Failure>(fam);
  return std::visit([](const auto& w) { return w.summary(); }, std::get<ConcreteFamily>(fam));
}

}  // namespace stringdyn
