#include "support.hpp"

#include "stringdyn/catalog.hpp"
#include "stringdyn/concrete.hpp"

#include <gtest/gtest.h>

using namespace testkit;

namespace {

std::string triple_str(const VerdictTriple& t) {
  return cell_value(t.s.value) + "," + cell_value(t.ns.value) + "," + cell_value(t.s0.value);
}

PruferElement random_prufer(Rng& rng, const Int& p) {
  const auto n = static_cast<unsigned>(uniform(rng, 0, 8));
  return PruferElement::make(p, Int(uniform(rng, 0, 1 << 20)), n);
}

ModOneElement random_modone(Rng& rng) {
  return ModOneElement::make(Rational(Int(uniform(rng, -500, 500)), Int(uniform(rng, 1, 360))));
}

}  // namespace

TEST(Arithmetic, Examples) {
  PruferMul mu3(3, 3);
  EXPECT_EQ(mu3.apply(PruferElement::c(3, 2)), PruferElement::c(3, 1));
  RationalMul q(Rational(3, 2));
  EXPECT_EQ(q.apply(Rational(2, 3)), Rational(1));
  ModOneMul m(5);
  ASSERT_TRUE(m.order(ModOneElement::make(Rational(1, 6))));
  EXPECT_EQ(*m.order(ModOneElement::make(Rational(1, 6))), 6);
  EXPECT_EQ(ModOneElement::make(Rational(7, 6)), ModOneElement::make(Rational(1, 6)));
  EXPECT_EQ(ModOneElement::make(Rational(-1, 6)), ModOneElement::make(Rational(5, 6)));
  EXPECT_FALSE(q.order(Rational(1, 2)));
  EXPECT_EQ(*q.order(Rational(0)), 1);
  EXPECT_EQ(PruferElement::c(2, 3).order(), 8);
}

TEST(Arithmetic, PruferNormalForm) {
  // 2/8 reduces to 1/4
  EXPECT_EQ(PruferElement::make(2, 2, 3), PruferElement::c(2, 2));
  EXPECT_EQ(PruferElement::make(2, 8, 3), PruferElement::make(2, 0, 0));
  EXPECT_EQ(PruferElement::make(3, -1, 1), PruferElement::make(3, 2, 1));
  PruferMul mu(2, 3);
  EXPECT_EQ(mu.add(PruferElement::c(2, 1), PruferElement::c(2, 1)), mu.zero());
}

TEST(Preimage, Examples) {
  RationalMul q(2);
  EXPECT_EQ(*q.preimage(Rational(1)), Rational(1, 2));
  PruferMul mu2(2, 2);
  EXPECT_EQ(*mu2.preimage(PruferElement::c(2, 1)), PruferElement::c(2, 2));
  PruferMul mu3(2, 3);
  auto x = mu3.preimage(PruferElement::c(2, 2));
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, PruferElement::make(2, 3, 2));
  // brute force on the layer of order 4
  std::vector<PruferElement> sols;
  for (int a = 0; a < 4; ++a)
    if (mu3.apply(PruferElement::make(2, a, 2)) == PruferElement::c(2, 2)) sols.push_back(PruferElement::make(2, a, 2));
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_EQ(sols[0], *x);
  EXPECT_FALSE(RationalMul(0).preimage(Rational(1)));
  EXPECT_FALSE(PruferMul(2, 0).preimage(PruferElement::c(2, 1)));
}

TEST(Preimage, PruferPickSmallestNumerator) {
  PruferMul mu2(2, 2);
  // preimages of 1/4 under doubling are 1/8 and 5/8
  EXPECT_EQ(*mu2.preimage(PruferElement::c(2, 2)), PruferElement::c(2, 3));
  EXPECT_EQ(*mu2.preimage(PruferElement::make(2, 3, 2)), PruferElement::make(2, 3, 3));
  EXPECT_EQ(*mu2.preimage(mu2.zero()), mu2.zero());
}

TEST(Preimage, RoundTripRandom) {
  Rng rng(41);
  for (int t = 0; t < 1000; ++t) {
    Rational r(Int(uniform(rng, -20, 20)), Int(uniform(rng, 1, 20)));
    if (r == 0) r = 7;
    RationalMul q(r);
    Rational b(Int(uniform(rng, -1000, 1000)), Int(uniform(rng, 1, 1000)));
    ASSERT_EQ(q.apply(*q.preimage(b)), b);
  }
  for (const Int& p : {Int(2), Int(3), Int(5)}) {
    for (int t = 0; t < 1000; ++t) {
      Int m = uniform(rng, -30, 30);
      if (m == 0) m = 1;
      PruferMul mu(p, m);
      PruferElement b = random_prufer(rng, p);
      auto x = mu.preimage(b);
      ASSERT_TRUE(x);
      ASSERT_EQ(mu.apply(*x), b);
    }
  }
  for (int t = 0; t < 1000; ++t) {
    Int m = uniform(rng, -30, 30);
    if (m == 0) m = 2;
    ModOneMul mu(m);
    ModOneElement b = random_modone(rng);
    auto x = mu.preimage(b);
    ASSERT_TRUE(x);
    ASSERT_EQ(mu.apply(*x), b);
  }
}

TEST(ModOne, PrimaryDecomposition) {
  Rng rng(42);
  for (int t = 0; t < 300; ++t) {
    ModOneElement x = random_modone(rng);
    auto parts = primary_parts(x);
    Int prod = 1;
    for (const auto& q : parts) prod *= q.order();
    EXPECT_EQ(prod, *ModOneMul(1).order(x));
    EXPECT_EQ(from_primary(parts), x);
  }
}

TEST(StringNumbers, TableTwoBackends) {
  EXPECT_EQ(triple_str(concrete_string_numbers({BackendKind::Rationals, 2, 2})), "inf,inf,0");
  EXPECT_EQ(triple_str(concrete_string_numbers({BackendKind::Rationals, 2, Rational(3, 2)})), "inf,inf,0");
  EXPECT_EQ(triple_str(concrete_string_numbers({BackendKind::Rationals, 2, -1})), "0,0,0");
  EXPECT_EQ(triple_str(concrete_string_numbers({BackendKind::Prufer, 2, 2})), "inf,0,inf");
  EXPECT_EQ(triple_str(concrete_string_numbers({BackendKind::Prufer, 3, 2})), "0,0,0");
  EXPECT_EQ(triple_str(concrete_string_numbers({BackendKind::QmodZ, 2, 2})), "inf,0,inf");
  EXPECT_EQ(triple_str(concrete_string_numbers({BackendKind::QmodZ, 2, 1})), "0,0,0");
  EXPECT_THROW(concrete_string_numbers({BackendKind::Prufer, 2, Rational(1, 2)}), ValidationError);
}

TEST(StringNumbers, AgreeWithCatalog) {
  for (const Int& p : {Int(2), Int(3), Int(5), Int(7)}) {
    EXPECT_TRUE(same_values(concrete_string_numbers({BackendKind::Rationals, 2, Rational(p)}),
                            mu_p_verdicts(GroupExpr::atom(GroupExpr::Q), p)));
    for (const Int& q : {Int(2), Int(3), Int(5)})
      EXPECT_TRUE(same_values(concrete_string_numbers({BackendKind::Prufer, q, Rational(p)}),
                              mu_p_verdicts(GroupExpr::atom(GroupExpr::Prufer, q), p)));
    EXPECT_TRUE(same_values(concrete_string_numbers({BackendKind::QmodZ, 2, Rational(p)}),
                            mu_p_verdicts(GroupExpr::atom(GroupExpr::QmodZ), p)));
  }
}

TEST(Prufer, LocallyQuasiPeriodic) {
  Rng rng(43);
  for (const Int& p : {Int(2), Int(3), Int(5)}) {
    PruferMul mu(p, p);
    for (int t = 0; t < 200; ++t) {
      PruferElement x = random_prufer(rng, p);
      PruferElement y = x;
      for (unsigned i = 0; i < x.n; ++i) {
        EXPECT_NE(y, mu.zero());
        y = mu.apply(y);
      }
      EXPECT_EQ(y, mu.zero());
    }
  }
}

TEST(Prufer, GarlandDisjointAndNull) {
  for (std::size_t m = 1; m <= 10; ++m)
    for (std::size_t N : {5u, 15u, 30u}) {
      auto fam = prufer_garland(2, m, N, GarlandVariant::Plain);
      ASSERT_TRUE(ok(fam)) << m << " " << N;
      const auto& f = std::get<WitnessFamily<PruferElement>>(fam);
      ASSERT_EQ(f.strings.size(), m);
      EXPECT_TRUE(f.evidence.prefixes_disjoint);
      std::set<PruferElement> seen;
      for (const auto& s : f.strings)
        for (const auto& x : s.terms) EXPECT_TRUE(seen.insert(x).second);
      for (const auto& s : f.strings) EXPECT_TRUE(null_depth(PruferMul(2, 2), s.terms[0], 64));
    }
}

TEST(Prufer, ConvexGarlandDigitBlocks) {
  auto fam = prufer_garland(3, 6, 12, GarlandVariant::Convex);
  ASSERT_TRUE(ok(fam));
  const auto& f = std::get<WitnessFamily<PruferElement>>(fam);
  EXPECT_EQ(f.strategy, Strategy::ConvexGarland);
  EXPECT_TRUE(f.evidence.guaranteed);
  EXPECT_EQ(f.evidence.theorem, "digit-blocks");
  // c_1 + c_2 = 1/3 + 1/9 = 4/9
  EXPECT_EQ(f.strings[0].terms[0], PruferElement::make(3, 4, 2));
}

TEST(Prufer, MultipleOfStringLaw) {
  for (const Int& p : {Int(2), Int(3)})
    for (int m = 1; m <= 20; ++m) {
      const bool p2 = m % (p * p).convert_to<int>() == 0;
      PruferMul mu(p, p);
      auto S = prufer_null_string(p, 15);
      std::vector<PruferElement> t;
      for (const auto& x : S.terms) t.push_back(mu.scale(m, x));
      bool brute = true;
      for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = a + 1; b < t.size(); ++b) brute = brute && !(t[a] == t[b]);
      EXPECT_EQ(prufer_multiple_is_string(p, m, 15), brute);
      if (p2) {
        EXPECT_FALSE(brute) << "p = " << p << ", m = " << m;
      }
    }
}

TEST(Rational, FanFivePrimes) {
  for (const Rational& r : {Rational(2), Rational(3, 2), Rational(-5, 7)}) {
    auto fam = rational_fan(r, 5, 20);
    ASSERT_TRUE(ok(fam));
    const auto& f = std::get<WitnessFamily<Rational>>(fam);
    ASSERT_EQ(f.strings.size(), 5u);
    for (const auto& q : f.multipliers) {
      EXPECT_NE(numerator(r) % q, 0);
      EXPECT_NE(denominator(r) % q, 0);
    }
    std::set<Rational> seen;
    for (const auto& s : f.strings)
      for (const auto& x : s.terms) EXPECT_TRUE(seen.insert(x).second);
    EXPECT_TRUE(f.evidence.guaranteed);
  }
  EXPECT_FALSE(ok(rational_fan(Rational(-1), 3, 5)));
}

TEST(QmodZ, NullGarland) {
  auto fam = qmodz_garland(6, 4, 10);
  ASSERT_TRUE(ok(fam));
  const auto& f = std::get<WitnessFamily<ModOneElement>>(fam);
  EXPECT_EQ(f.strings.size(), 4u);
  EXPECT_TRUE(f.evidence.guaranteed);
  ModOneMul mu(6);
  for (const auto& s : f.strings) EXPECT_TRUE(check_relation(mu, s.terms));
}

TEST(ConcreteFamily, EveryInfiniteVerdictHasWitness) {
  const std::vector<MulEndo> fs = {{BackendKind::Rationals, 2, 3},  {BackendKind::Rationals, 2, Rational(5, 3)},
                                   {BackendKind::Prufer, 2, 2},     {BackendKind::Prufer, 3, 6},
                                   {BackendKind::Prufer, 2, 3},     {BackendKind::QmodZ, 2, 2},
                                   {BackendKind::QmodZ, 2, 10}};
  for (const auto& f : fs) {
    VerdictTriple t = concrete_string_numbers(f);
    for (auto [k, v] : {std::pair{StringKind::S, &t.s}, {StringKind::NS, &t.ns}, {StringKind::S0, &t.s0}}) {
      auto w = concrete_witness(f, k, 4, 10);
      if (v->value == VerdictValue::Infinite) {
        ASSERT_TRUE(ok(w)) << backend_name(f) << " " << kind_name(k);
        EXPECT_EQ(std::get<WitnessSummary>(w).count, 4u);
        EXPECT_TRUE(std::get<WitnessSummary>(w).guaranteed) << backend_name(f) << " " << kind_name(k);
      } else {
        ASSERT_FALSE(ok(w));
        EXPECT_EQ(std::get<Failure>(w).reason, Failure::VerdictMismatch);
      }
    }
  }
}
