#include "hypobv/indices.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hypobv;

namespace {

OperatorProfile prof1(const std::string& s) { return decompose_t(parse_poly(s, {"x", "t"})); }
OperatorProfile prof2(const std::string& s) { return decompose_t(parse_poly(s, {"x1", "x2", "t"})); }
Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST(B0, Examples) {
  EXPECT_EQ(b0_exact(prof1("t - i*x^2")), q(2, 1));
  EXPECT_EQ(b0_exact(prof1("x^2 + t^2")), q(1, 1));
  EXPECT_EQ(b0_exact(prof2("t^2 + x1^2 + x2^4")), q(2, 1));
  EXPECT_EQ(b0_exact(prof1("t^2 + x^3*t + x")), q(3, 1));
}

TEST(SemiElliptic, Laplace) {
  auto r = semi_elliptic_analyze(prof1("x^2 + t^2"));
  ASSERT_EQ(r.semi_elliptic, SemiElliptic::yes);
  EXPECT_EQ(r.n, (std::vector<int>{2, 2}));
  EXPECT_EQ(*r.a0, q(1, 1));
  EXPECT_EQ(r.b0, q(1, 1));
  EXPECT_EQ(*r.gamma0, q(1, 1));
  EXPECT_EQ(*r.mu0, q(1, 1));
  EXPECT_EQ(r.case_tag, "elliptic");
}

TEST(SemiElliptic, Heat) {
  auto r = semi_elliptic_analyze(prof1("t - i*x^2"));
  ASSERT_EQ(r.semi_elliptic, SemiElliptic::yes);
  EXPECT_EQ(r.n, (std::vector<int>{2, 1}));
  EXPECT_EQ(*r.a0, q(2, 1));
  EXPECT_EQ(r.b0, q(2, 1));
  EXPECT_EQ(*r.gamma0, q(1, 1));
  EXPECT_EQ(*r.mu0, q(1, 2));
  EXPECT_EQ(r.case_tag, "parabolic_like");
}

TEST(SemiElliptic, Anisotropic) {
  auto r = semi_elliptic_analyze(prof2("t^2 + x1^2 + x2^4"));
  ASSERT_EQ(r.semi_elliptic, SemiElliptic::yes);
  EXPECT_EQ(r.n, (std::vector<int>{2, 4, 2}));
  EXPECT_EQ(*r.a0, q(1, 1));
  EXPECT_EQ(r.b0, q(2, 1));
  EXPECT_EQ(*r.gamma0, q(1, 2));
  EXPECT_EQ(*r.mu0, q(1, 2));
}

TEST(SemiElliptic, CaseThree) {
  auto r = semi_elliptic_analyze(prof1("t^4 + x^2"));
  ASSERT_EQ(r.semi_elliptic, SemiElliptic::yes);
  EXPECT_EQ(r.case_tag, "case_iii");
  EXPECT_EQ(*r.a0, q(1, 2));
  EXPECT_EQ(r.b0, q(1, 2));
  EXPECT_EQ(*r.gamma0, q(1, 2));
}

TEST(SemiElliptic, WaveHasExactZeroWitness) {
  auto r = semi_elliptic_analyze(prof1("t^2 - x^2"));
  ASSERT_EQ(r.semi_elliptic, SemiElliptic::no);
  ASSERT_EQ(r.witness.size(), 2u);
  EXPECT_EQ(std::abs(r.witness[0]), std::abs(r.witness[1]));
  EXPECT_GT(std::abs(r.witness[0]), 0.0);
}

TEST(SemiElliptic, IrrationalZeroIsInconclusive) {
  auto r = semi_elliptic_analyze(prof1("t^2 - 2*x^2"));
  EXPECT_EQ(r.semi_elliptic, SemiElliptic::inconclusive);
}

TEST(SemiElliptic, ChainInvariants) {
  for (const auto& s : {"x^2 + t^2", "t - i*x^2", "t^4 + x^2", "t^2 - i*x^4 + x^2"}) {
    auto r = semi_elliptic_analyze(prof1(s));
    ASSERT_EQ(r.semi_elliptic, SemiElliptic::yes) << s;
    EXPECT_LE(*r.gamma0, *r.a0);
    EXPECT_LE(*r.a0, r.b0);
    EXPECT_LE(*r.gamma0, 1);
    EXPECT_LE(*r.mu0, 1);
    EXPECT_TRUE(r.degQ_bounded);
  }
}

TEST(RootMargin, Examples) {
  EXPECT_NEAR(root_margin(prof1("t - i*x^2"), {3.0}).value, 9.0, 1e-12);
  EXPECT_NEAR(root_margin(prof1("x^2 + t^2"), {2.5}).value, 2.5, 1e-12);
  EXPECT_NEAR(root_margin(prof1("t - i*x"), {2.0}).value, 2.0, 1e-12);
}

TEST(VerifyA0, HeatPassesAndIsMaximal) {
  auto pr = verify_a0_numeric(prof1("t - i*x^2"), 2.0);
  EXPECT_TRUE(pr.at_a.bounded);
  EXPECT_NEAR(pr.at_a.C_fit, 1.0, 1e-9);
  EXPECT_TRUE(pr.maximal);
  EXPECT_NEAR(pr.perturbed.slope, 0.2, 0.02);
  EXPECT_TRUE(pr.pass);
}

TEST(VerifyA0, LaplaceAndAnisotropic) {
  EXPECT_TRUE(verify_a0_numeric(prof1("x^2 + t^2"), 1.0).pass);
  auto pr = verify_a0_numeric(prof2("t^2 + x1^2 + x2^4"), 1.0);
  EXPECT_TRUE(pr.at_a.bounded);
  EXPECT_TRUE(pr.pass);
}

TEST(VerifyA0, TooLargeExponentIsNotBounded) {
  auto pr = verify_a0_numeric(prof1("t - i*x^2"), 2.5);
  EXPECT_FALSE(pr.at_a.bounded);
  EXPECT_FALSE(pr.pass);
}
