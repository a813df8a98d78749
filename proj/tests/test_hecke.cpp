#include <random>

#include <gtest/gtest.h>

#include "klp/hecke.hpp"

using namespace klp;

namespace {

Laurent qpoly(std::vector<long long> c) {
  std::vector<BigInt> b(c.begin(), c.end());
  return Laurent::from_q_coefficients(b);
}

// c_w is bar-invariant, Pc_{w,w} = 1, off-diagonal entries lie in vZ[v], and
// d(Pc_{x,y}) = sum_{x <= k <= y} Rc_{x,k} Pc_{k,y}.
void expect_kl_sound(const CoxeterSystem& sys) {
  KLContext ctx(sys);
  for (std::size_t j = 0; j < sys.size(); ++j) {
    const Element y = sys.element(j);
    const HeckeElement c = ctx.canonical(y);
    ASSERT_EQ(ctx.algebra().d(c), c) << sys.name() << " " << format_element(sys, y);
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const Element x = sys.element(i);
      const Laurent& pc = ctx.p_check(x, y);
      if (x == y) {
        EXPECT_EQ(pc, Laurent(1));
        continue;
      }
      if (!sys.bruhat_leq(x, y)) {
        EXPECT_TRUE(pc.is_zero());
        EXPECT_TRUE(ctx.r_check(x, y).is_zero());
        continue;
      }
      EXPECT_GE(pc.min_exp(), 1);
      EXPECT_TRUE(is_q_polynomial(ctx.p(x, y)));
      Laurent rhs;
      for (std::size_t k = 0; k < sys.size(); ++k) rhs += ctx.r_check(x, sys.element(k)) * ctx.p_check(sys.element(k), y);
      EXPECT_EQ(bar(pc), rhs);
    }
  }
}

}  // namespace

TEST(Hecke, QuadraticRelationAndLengthAdditivity) {
  auto s3 = CoxeterSystem::symmetric(3);
  HeckeAlgebra alg(s3);
  const Element s1 = s3.generator(0), s2 = s3.generator(1);
  HeckeElement sq = alg.mul(alg.h(s1), alg.h(s1));
  HeckeElement expected = alg.h(s3.identity());
  expected.add(s1, Laurent::alpha());
  EXPECT_EQ(sq, expected);
  EXPECT_EQ(alg.mul(alg.h(s1), alg.h(s2)), alg.h(s3.mul(s1, s2)));
  HeckeElement X = Laurent::v(3) * alg.h(s2);
  X.add(s1, Laurent(2));
  EXPECT_EQ(alg.mul(alg.h(s3.identity()), X), X);
}

TEST(Hecke, InverseAndInvolution) {
  auto s3 = CoxeterSystem::symmetric(3);
  HeckeAlgebra alg(s3);
  const Element s1 = s3.generator(0);
  EXPECT_EQ(alg.mul(alg.h_inverse_gen(0), alg.h(s1)), alg.h(s3.identity()));
  EXPECT_EQ(alg.d(alg.h(s1)), alg.h_inverse_gen(0));
  EXPECT_EQ(alg.d(Laurent::v() * alg.h(s3.identity())), Laurent::v(-1) * alg.h(s3.identity()));
  std::mt19937 rng(3);
  auto s4 = CoxeterSystem::symmetric(4);
  HeckeAlgebra a4(s4);
  std::uniform_int_distribution<int> pick(0, 23), coef(-3, 3), ex(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    HeckeElement X, Y;
    for (int k = 0; k < 4; ++k) {
      X.add(s4.element(pick(rng)), Laurent::monomial(coef(rng), ex(rng)));
      Y.add(s4.element(pick(rng)), Laurent::monomial(coef(rng), ex(rng)));
    }
    EXPECT_EQ(a4.d(a4.d(X)), X);
    EXPECT_EQ(a4.d(a4.mul(X, Y)), a4.mul(a4.d(X), a4.d(Y)));
    HeckeElement Z;
    Z.add(s4.element(pick(rng)), Laurent(1));
    EXPECT_EQ(a4.mul(a4.mul(X, Y), Z), a4.mul(X, a4.mul(Y, Z)));
  }
}

TEST(Hecke, KLExamplesS3) {
  auto s3 = CoxeterSystem::symmetric(3);
  KLContext ctx(s3);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const Element x = s3.element(i), y = s3.element(j);
      if (s3.bruhat_leq(x, y)) {
        EXPECT_EQ(ctx.p_check(x, y), Laurent::v(s3.length(y) - s3.length(x)));
      }
    }
  EXPECT_EQ(ctx.canonical(s3.identity()), HeckeElement::basis(s3.identity()));
  HeckeElement cs = HeckeElement::basis(s3.generator(0));
  cs.add(s3.identity(), Laurent::v());
  EXPECT_EQ(ctx.canonical(s3.generator(0)), cs);
  HeckeElement c0;
  for (std::size_t i = 0; i < 6; ++i) c0.add(s3.element(i), Laurent::v(3 - s3.length(s3.element(i))));
  EXPECT_EQ(ctx.canonical(s3.longest()), c0);
}

TEST(Hecke, KLValuesS4MatchOracle) {
  auto s4 = CoxeterSystem::symmetric(4);
  KLContext ctx(s4);
  auto el = [&](const char* s) { return parse_element(s4, s); };
  EXPECT_EQ(ctx.p(el("1324"), el("4231")), Laurent(1));
  EXPECT_EQ(ctx.p(el("1324"), el("3412")), qpoly({1, 1}));
  EXPECT_EQ(ctx.p(el("2143"), el("4231")), qpoly({1, 1}));
  EXPECT_EQ(ctx.p(el("1234"), el("4231")), qpoly({1, 1}));
  // exactly six nontrivial pairs
  int nontrivial = 0;
  for (std::size_t i = 0; i < s4.size(); ++i)
    for (std::size_t j = 0; j < s4.size(); ++j)
      if (s4.bruhat_leq(s4.element(i), s4.element(j)) && ctx.p(s4.element(i), s4.element(j)) != Laurent(1)) ++nontrivial;
  EXPECT_EQ(nontrivial, 6);
}

TEST(Hecke, KLSoundnessSmallSystems) {
  expect_kl_sound(CoxeterSystem::symmetric(3));
  expect_kl_sound(CoxeterSystem::symmetric(4));
  expect_kl_sound(CoxeterSystem::build(Family::B, 3));
  for (int m = 3; m <= 8; ++m) expect_kl_sound(CoxeterSystem::build(Family::I2, m));
}

TEST(Hecke, RExamples) {
  auto s3 = CoxeterSystem::symmetric(3);
  KLContext ctx(s3);
  const Element s1 = s3.generator(0), s2 = s3.generator(1);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(ctx.r_check(s3.element(i), s3.element(i)), Laurent(1));
  EXPECT_EQ(ctx.r_check(s3.identity(), s1), Laurent::alpha());
  EXPECT_EQ(ctx.r(s3.identity(), s1), qpoly({-1, 1}));
  EXPECT_TRUE(ctx.r_check(s1, s2).is_zero());
}

TEST(Hecke, DyerLehrerBasis) {
  auto s3 = CoxeterSystem::symmetric(3);
  KLContext ctx(s3);
  const auto& alg = ctx.algebra();
  for (std::size_t i = 0; i < 6; ++i) {
    const Element w = s3.element(i);
    EXPECT_EQ(ctx.f_basis_element(w, s3.identity()), alg.h(w));
    EXPECT_EQ(ctx.f_basis_element(w, s3.longest()), alg.d_h(w));
    for (std::size_t j = 0; j < 6; ++j) {
      const Element x = s3.element(j);
      EXPECT_EQ(ctx.pairing_f(s3.identity(), x, alg.h(w)), x == w ? Laurent(1) : Laurent());
      EXPECT_EQ(ctx.pairing_f(s3.longest(), x, alg.h(w)), ctx.r_check(x, w));
      EXPECT_EQ(ctx.pairing_f(x, w, ctx.f_basis_element(w, x)), Laurent(1));
    }
  }
}

// f_{w, s tau} = f_{w,tau} or f_{w,tau} - alpha f_{tw,tau}.
TEST(Hecke, FBasisRecursionS4) {
  auto s4 = CoxeterSystem::symmetric(4);
  KLContext ctx(s4);
  for (std::size_t i = 0; i < s4.size(); ++i) {
    const Element tau = s4.element(i);
    for (int g = 0; g < s4.rank(); ++g) {
      const Element st = s4.lmul(g, tau);
      if (s4.length(st) < s4.length(tau)) continue;
      const Element t = s4.mul(s4.mul(s4.inverse(tau), s4.generator(g)), tau);
      for (std::size_t j = 0; j < s4.size(); ++j) {
        const Element w = s4.element(j);
        const Element tw = s4.mul(t, w);
        HeckeElement expected = ctx.f_basis_element(w, tau);
        if (s4.length(tw) < s4.length(w)) expected -= Laurent::alpha() * ctx.f_basis_element(tw, tau);
        EXPECT_EQ(ctx.f_basis_element(w, st), expected);
      }
    }
  }
}

TEST(Hecke, ConvexOracleMatchesPairingS3Exhaustive) {
  auto s3 = CoxeterSystem::symmetric(3);
  KLContext ctx(s3);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      const Element tau = s3.element(a), kappa = s3.element(b);
      if (!weak_left_leq(s3, tau, kappa)) {
        EXPECT_THROW(ctx.convex_pairing_oracle(tau, kappa, tau, kappa), PreconditionError);
        continue;
      }
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
          const Element x = s3.element(i), w = s3.element(j);
          EXPECT_EQ(ctx.convex_pairing_oracle(tau, kappa, x, w), ctx.pairing_f(tau, x, ctx.f_basis_element(w, kappa)));
        }
    }
}

TEST(Hecke, ConvexOracleMatchesPairingS4Sampled) {
  auto s4 = CoxeterSystem::symmetric(4);
  KLContext ctx(s4);
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, s4.size() - 1);
  int checked = 0;
  while (checked < 3000) {
    const Element tau = s4.element(pick(rng)), kappa = s4.element(pick(rng));
    if (!weak_left_leq(s4, tau, kappa)) continue;
    const Element x = s4.element(pick(rng)), w = s4.element(pick(rng));
    EXPECT_EQ(ctx.convex_pairing_oracle(tau, kappa, x, w), ctx.pairing_f(tau, x, ctx.f_basis_element(w, kappa)));
    ++checked;
  }
}

TEST(Hecke, DyerLehrerPositivityS4) {
  auto s4 = CoxeterSystem::symmetric(4);
  KLContext ctx(s4);
  for (std::size_t a = 0; a < s4.size(); ++a)
    for (std::size_t j = 0; j < s4.size(); ++j)
      for (const Laurent& p : ctx.pairing_canonical(s4.element(a), s4.element(j))) EXPECT_TRUE(is_nonneg(p));
}

TEST(Hecke, JRelativeRExamplesS3) {
  auto s3 = CoxeterSystem::symmetric(3);
  KLContext ctx(s3);
  const GeneratorSet J(0b01);
  const Element e = s3.identity();
  EXPECT_EQ(ctx.jrel_check(e, parse_element(s3, "321"), J), Laurent::alpha());
  EXPECT_EQ(ctx.jrel(e, parse_element(s3, "321"), J), qpoly({0, -1, 1}));
  EXPECT_EQ(ctx.jrel(e, s3.generator(1), J), qpoly({-1, 1}));
  EXPECT_TRUE(ctx.jrel(e, s3.generator(0), J).is_zero());
}

TEST(Hecke, JRelativeRExtremes) {
  for (auto fam : {Family::A, Family::B}) {
    auto sys = CoxeterSystem::build(fam, 3);
    KLContext ctx(sys);
    for (std::size_t i = 0; i < sys.size(); ++i)
      for (std::size_t j = 0; j < sys.size(); ++j) {
        const Element x = sys.element(i), y = sys.element(j);
        EXPECT_EQ(ctx.jrel(x, y, GeneratorSet{}), ctx.r(x, y));
        EXPECT_EQ(ctx.jrel(x, y, sys.all_generators()), x == y ? Laurent(1) : Laurent());
      }
  }
}

TEST(Hecke, HybridGammaS3) {
  auto s3 = CoxeterSystem::symmetric(3);
  KLContext ctx(s3);
  const GeneratorSet J(0b01);
  const auto& col = ctx.gamma_check_column(s3.longest(), J);
  auto el = [&](const char* s) { return parse_element(s3, s); };
  EXPECT_EQ(col[el("321").id], Laurent(1));
  EXPECT_EQ(col[el("231").id], Laurent::v());
  EXPECT_EQ(col[el("213").id], Laurent::v(2));
  EXPECT_TRUE(col[el("123").id].is_zero());
  EXPECT_TRUE(col[el("132").id].is_zero());
  EXPECT_TRUE(col[el("312").id].is_zero());
}

TEST(Hecke, HybridGammaPositiveAndUnitriangular) {
  for (auto fam : {Family::A, Family::B}) {
    auto sys = CoxeterSystem::build(fam, 3);
    KLContext ctx(sys);
    for (std::uint32_t bits = 0; bits < (1u << sys.rank()); ++bits)
      for (std::size_t j = 0; j < sys.size(); ++j) {
        const Element y = sys.element(j);
        const auto& col = ctx.gamma_check_column(y, GeneratorSet(bits));
        EXPECT_EQ(col[y.id], Laurent(1));
        for (const Laurent& g : col) EXPECT_TRUE(is_nonneg(g));
      }
  }
}

// Pairings against hybrid basis elements, tau in W_J.
TEST(Hecke, HybridPairingsFactorThroughParabolicS4) {
  auto s4 = CoxeterSystem::symmetric(4);
  KLContext ctx(s4);
  for (std::uint32_t bits = 0; bits < 8; ++bits) {
    const GeneratorSet J(bits);
    const Parabolic& par = s4.parabolic(J);
    for (Element tau : par.subgroup)
      for (std::size_t j = 0; j < s4.size(); ++j) {
        const Element w = s4.element(j);
        const auto col = ctx.pairing_f_column(tau, ctx.hybrid_basis_element(w, J));
        const auto [wj, wrep] = coset_factorize(s4, w, J);
        const auto& inner = ctx.pairing_canonical(tau, wj);
        for (std::size_t i = 0; i < s4.size(); ++i) {
          const auto [xj, xrep] = coset_factorize(s4, s4.element(i), J);
          EXPECT_EQ(col[i], xrep == wrep ? inner[xj.id] : Laurent());
        }
      }
  }
}

// <f^{x,w0}, f_{y, w0 w0^J}> = Rc_{x_J,y_J} [^Jx = ^Jy], and the d-twisted partner.
TEST(Hecke, TwistedPairingsS4) {
  auto s4 = CoxeterSystem::symmetric(4);
  KLContext ctx(s4);
  const Element w0 = s4.longest();
  for (std::uint32_t bits = 0; bits < 8; ++bits) {
    const GeneratorSet J(bits);
    const Element tauJ = s4.mul(w0, s4.parabolic(J).longest);
    for (std::size_t j = 0; j < s4.size(); ++j) {
      const Element y = s4.element(j);
      const auto a = ctx.pairing_f_column(w0, ctx.f_basis_element(y, tauJ));
      const auto b = ctx.pairing_f_column(tauJ, ctx.f_basis_element(y, w0));
      const auto [yj, yrep] = coset_factorize(s4, y, J);
      for (std::size_t i = 0; i < s4.size(); ++i) {
        const auto [xj, xrep] = coset_factorize(s4, s4.element(i), J);
        EXPECT_EQ(a[i], xrep == yrep ? ctx.r_check(xj, yj) : Laurent());
        EXPECT_EQ(b[i], bar(a[i]));
      }
    }
  }
}
