#include "hypobv/errors.hpp"
#include "hypobv/fundsol.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hypobv;
using cd = std::complex<double>;

namespace {

const double kPi = std::numbers::pi;
const cd kI{0, 1};

OperatorProfile prof1(const std::string& s) { return decompose_t(parse_poly(s, {"x", "t"})); }

TimeFactor gauss_t(double b = 1, double c = 0) {
  TimeFactor chi;
  chi.kind = TimeFactor::gaussian;
  chi.width = b;
  chi.center = c;
  return chi;
}

SymFun second_test() {
  std::vector<Rational> c{make_rational(-1, 4)};
  return SymFun::term(CRational(make_rational(1, 2)), {0}, make_rational(3, 2), c) +
         SymFun::term(CRational(1), {2}, make_rational(3, 2), c);
}

}  // namespace

TEST(FundSol, HeatTransformIsExplicit) {
  FundamentalSolution1D E(prof1("t - i*x^2"));
  for (double xi : {-3.0, 0.0, 0.7})
    for (double t : {0.1, 1.3}) {
      EXPECT_LT(std::abs(E.Ehat(xi, t) - kI * std::exp(-t * xi * xi)), 1e-13);
      EXPECT_EQ(E.Ehat(xi, -t), cd(0.0));
    }
  EXPECT_TRUE(E.crossings(50).empty());
}

TEST(FundSol, LaplaceTransformAndCrossings) {
  FundamentalSolution1D E(prof1("x^2 + t^2"));
  auto c = E.crossings(10);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], -2.0, 1e-9);
  EXPECT_NEAR(c[1], 2.0, 1e-9);
  // outside the crossings only the root i|xi| lies above the contour
  for (double xi : {-5.0, 3.0})
    for (double t : {0.2, -0.4})
      EXPECT_LT(std::abs(E.Ehat(xi, t) - std::exp(-std::abs(t * xi)) / (2 * std::abs(xi))), 1e-13);
  // near xi = 0 the two residues merge; the sum stays finite with limit -t
  EXPECT_LT(std::abs(E.Ehat(1e-7, 0.3) + 0.3), 1e-6);
  EXPECT_LT(std::abs(E.Ehat(0.01, 0.3) - (std::exp(-0.003) - std::exp(0.003)) / 0.02), 1e-9);
}

TEST(FundSol, DeltaPropertyHeat) {
  FundamentalSolution1D E(prof1("t - i*x^2"));
  auto a = E.check_delta(SymFun::gaussian(1), gauss_t());
  EXPECT_LT(a.abs_err, 1e-3);
  auto b = E.check_delta(second_test(), gauss_t(2, 0.3));
  EXPECT_LT(b.abs_err, 1e-3);
  EXPECT_GT(std::abs(b.expected), 0.1);
}

TEST(FundSol, DeltaPropertyLaplace) {
  FundamentalSolution1D E(prof1("x^2 + t^2"));
  EXPECT_LT(E.check_delta(SymFun::gaussian(1), gauss_t()).abs_err, 1e-3);
  EXPECT_LT(E.check_delta(second_test(), gauss_t(2, 0.3)).abs_err, 1e-3);
}

TEST(FundSol, DeltaPropertyScaledAndFirstOrder) {
  // scale -1 after normalization, and a complex first-order operator
  FundamentalSolution1D E(prof1("-t^2 - x^2"));
  EXPECT_LT(E.check_delta(second_test(), gauss_t(2, 0.3)).abs_err, 1e-3);
  FundamentalSolution1D C(prof1("t - i*x"));
  EXPECT_LT(C.check_delta(second_test(), gauss_t(1, -0.2)).abs_err, 1e-3);
}

TEST(FundSol, WrongContourSideBreaksDelta) {
  // Sanity check of the check itself: flipping the residue sign must be detected.
  FundamentalSolution1D E(prof1("t - i*x^2"));
  FundamentalSolution1D F(prof1("-t + i*x^2"));
  auto a = E.check_delta(SymFun::gaussian(1), gauss_t());
  auto b = F.check_delta(SymFun::gaussian(1), gauss_t());
  EXPECT_LT(a.abs_err, 1e-3);
  EXPECT_LT(b.abs_err, 1e-3);
  EXPECT_LT(std::abs(E(0.3, 0.2) + F(0.3, 0.2)), 1e-6);  // E_{-P} = -E_P
}

TEST(FundSol, PointwiseHeat) {
  FundamentalSolution1D E(prof1("t - i*x^2"));
  for (double x : {0.0, 0.3, -0.8})
    for (double t : {0.05, 0.2, 1.0}) {
      cd exact = kI * std::exp(-x * x / (4 * t)) / std::sqrt(4 * kPi * t);
      EXPECT_LT(std::abs(E(x, t) - exact), 1e-5) << x << " " << t;
    }
  EXPECT_LT(std::abs(E(0.3, -0.2)), 1e-12);
}

TEST(FundSol, PointwiseLaplaceIsHarmonicAwayFromOrigin) {
  FundamentalSolution1D E(prof1("x^2 + t^2"));
  const double h = 0.05;
  for (auto [x, t] : {std::pair{0.5, 0.5}, std::pair{-0.3, 0.8}, std::pair{0.4, -0.6}}) {
    cd lap = (E(x + h, t) + E(x - h, t) + E(x, t + h) + E(x, t - h) - 4.0 * E(x, t)) / (h * h);
    EXPECT_LT(std::abs(lap), 2e-3) << x << " " << t;
  }
  // logarithmic singularity: E(0, t) - E(0, t/2) -> log(2) / (2 pi) as t -> 0
  cd d = E(0, 0.01) - E(0, 0.005);
  EXPECT_NEAR(d.real(), -std::log(2.0) / (2 * kPi), 2e-3);
}

TEST(FundSol, RegularityMonitor) {
  FundamentalSolution1D heat(prof1("t - i*x^2"));
  auto r = heat.regularity(6, 1, 5);
  EXPECT_NEAR(r.S, 0.5, 0.05);
  EXPECT_TRUE(r.bounded);
  // log singularity: sup |E| gains log(2) / (2 pi) per halving of t, and the power fit stays below heat
  FundamentalSolution1D lap(prof1("x^2 + t^2"));
  auto s = lap.regularity(8, 1, 5);
  for (size_t i = s.t.size() - 3; i < s.t.size(); ++i)
    EXPECT_NEAR(s.sup[i] - s.sup[i - 1], std::log(2.0) / (2 * kPi), 5e-3);
  EXPECT_LT(s.S, r.S);
  EXPECT_TRUE(s.bounded);
}

TEST(FundSol, Admissibility) {
  // the root of t + i sits at -i for every xi
  FundSolConfig cfg;
  cfg.A = 1.2;
  try {
    FundamentalSolution1D E(prof1("t + i"), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AdmissibilityFailure);
  }
  cfg.A = 2;
  EXPECT_NO_THROW(FundamentalSolution1D(prof1("t + i"), cfg));
  cfg.A = -1;
  EXPECT_THROW(FundamentalSolution1D(prof1("t - i*x^2"), cfg), Error);
  EXPECT_THROW(FundamentalSolution1D(decompose_t(parse_poly("t - x1^2 - x2^2", {"x1", "x2", "t"}))), Error);
}
