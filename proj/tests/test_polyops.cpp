#include "hypobv/errors.hpp"
#include "hypobv/polyops.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hypobv;

namespace {

const std::vector<std::string> kXT = {"x", "t"};
const std::vector<std::string> kXXT = {"x1", "x2", "t"};

MultiPoly P1(const std::string& s) { return parse_poly(s, kXT); }

MultiPoly random_poly(std::mt19937& rng, int nvars, int maxdeg, int terms) {
  std::uniform_int_distribution<int> deg(0, maxdeg), num(-9, 9), den(1, 7);
  MultiPoly p(nvars);
  for (int i = 0; i < terms; ++i) {
    MultiIndex e(nvars);
    for (auto& v : e) v = deg(rng);
    p.add_term(e, CRational(make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng))));
  }
  return p;
}

}  // namespace

TEST(Parse, ReadsBasicExpressions) {
  MultiPoly heat = P1("t - i*x^2");
  EXPECT_EQ(heat.coeff({0, 1}), CRational(1));
  EXPECT_EQ(heat.coeff({2, 0}), CRational(Rational(0), Rational(-1)));
  EXPECT_EQ(P1("(x + t)^2"), P1("x^2 + 2*x*t + t^2"));
  EXPECT_EQ(P1("3/4 x"), P1("0.75*x"));
  EXPECT_THROW(P1("x + y"), Error);
  EXPECT_THROW(P1("x^"), Error);
}

TEST(DecomposeT, Heat) {
  auto prof = decompose_t(P1("t - i*x^2"));
  EXPECT_EQ(prof.m, 1);
  EXPECT_EQ(prof.d, 1);
  EXPECT_EQ(prof.Q[0], parse_poly("-i*x^2", {"x"}));
  EXPECT_EQ(prof.Q[1], parse_poly("1", {"x"}));
}

TEST(DecomposeT, Laplace) {
  auto prof = decompose_t(P1("x^2 + t^2"));
  EXPECT_EQ(prof.m, 2);
  EXPECT_EQ(prof.Q[0], parse_poly("x^2", {"x"}));
  EXPECT_TRUE(prof.Q[1].is_zero());
  EXPECT_EQ(prof.Q[2], parse_poly("1", {"x"}));
}

TEST(DecomposeT, NormalizesLeadingConstant) {
  auto prof = decompose_t(P1("3*t^2 + 6*x"));
  EXPECT_EQ(prof.scale, CRational(3));
  EXPECT_EQ(prof.Q[0], parse_poly("2*x", {"x"}));
  EXPECT_EQ(prof.reassemble() * prof.scale, P1("3*t^2 + 6*x"));
}

TEST(DecomposeT, Errors) {
  try {
    decompose_t(P1("x*t^2 + 1"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConstantLeading);
  }
  try {
    decompose_t(P1("5"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConstantPoly);
  }
}

TEST(DecomposeT, ReassemblyIsExactOnRandomPolys) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int nv = 2 + trial % 2;
    MultiPoly p = random_poly(rng, nv, 3, 6);
    MultiIndex lead(nv, 0);
    lead[nv - 1] = 4;
    p.add_term(lead, CRational(Rational(2, 3), Rational(1)));
    auto prof = decompose_t(p);
    EXPECT_EQ(prof.reassemble() * prof.scale, p);
    EXPECT_EQ(prof.Q[prof.m], MultiPoly::constant(nv - 1, CRational(1)));
  }
}

TEST(Derivative, Examples) {
  EXPECT_EQ(poly_derivative(P1("t - i*x^2"), {0, 1}), P1("1"));
  EXPECT_EQ(poly_derivative(P1("x^2 + t^2"), {2, 0}), P1("2"));
  EXPECT_EQ(poly_derivative(P1("x^2*t^2"), {1, 1}), P1("4*x*t"));
}

TEST(Derivative, CommutesWithDecomposition) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    MultiPoly p = random_poly(rng, 3, 3, 5);
    p.add_term({0, 0, 4}, CRational(1));
    auto prof = decompose_t(p);
    MultiPoly lhs = poly_derivative(prof.P, {1, 2, 0});
    MultiPoly rhs(3);
    for (int k = 0; k <= prof.m; ++k) rhs += widen(poly_derivative(prof.Q[k], {1, 2}), 1) * prof.t_power(k);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Eval, Examples) {
  auto heat = P1("t - i*x^2");
  EXPECT_EQ(poly_eval(heat, std::vector<CRational>{CRational(1), CRational(0)}), CRational(Rational(0), Rational(-1)));
  EXPECT_EQ(poly_eval(P1("x^2 + t^2"), std::vector<CRational>{CRational(3), CRational(4)}), CRational(25));
  EXPECT_TRUE(poly_eval(P1("t - i*x"), std::vector<CRational>{CRational(1), CRational::i()}).is_zero());
  auto z = poly_eval(heat, std::vector<std::complex<double>>{0.5, 0.25});
  EXPECT_DOUBLE_EQ(z.real(), 0.25);
  EXPECT_DOUBLE_EQ(z.imag(), -0.25);
  EXPECT_THROW(poly_eval(heat, std::vector<CRational>{CRational(1)}), Error);
}

TEST(PFamily, Laplace) {
  auto fam = p_family(decompose_t(P1("x^2 + t^2")));
  ASSERT_EQ(fam.Pj.size(), 2u);
  EXPECT_EQ(fam.Pj[0], P1("t"));
  EXPECT_EQ(fam.Pj[1], P1("1"));
  EXPECT_TRUE(fam.recursion_check);
}

TEST(PFamily, HeatAndCauchyRiemann) {
  auto heat = p_family(decompose_t(P1("t - i*x^2")));
  EXPECT_EQ(heat.Pj[0], P1("1"));
  EXPECT_EQ(heat.Pcheck, P1("-t - i*x^2"));
  EXPECT_TRUE(heat.recursion_check);
  auto cr = p_family(decompose_t(P1("t - i*x")));
  EXPECT_EQ(cr.Pj[0], P1("1"));
  EXPECT_EQ(cr.Pcheck, P1("-t + i*x"));
}

TEST(PFamily, RecursionHoldsForRandomProfiles) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    MultiPoly p = random_poly(rng, 3, 2, 6);
    MultiIndex lead = {0, 0, 3 + trial % 2};
    p.add_term(lead, CRational(1));
    auto prof = decompose_t(p);
    EXPECT_TRUE(p_family(prof).recursion_check);
  }
}

TEST(Profile, DegQBoundFlag) {
  EXPECT_TRUE(decompose_t(parse_poly("t^2 + x1^2 + x2^4", kXXT)).degQ_bounded);
  EXPECT_FALSE(decompose_t(P1("t^2 + x^3*t + x")).degQ_bounded);
}
