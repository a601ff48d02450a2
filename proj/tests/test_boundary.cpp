#include "hypobv/boundary.hpp"
#include "hypobv/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hypobv;
using cd = std::complex<double>;

namespace {

const double kPi = std::numbers::pi;
const cd kI{0, 1};

OperatorProfile prof1(const std::string& s) { return decompose_t(parse_poly(s, {"x", "t"})); }
MultiPoly pxt(const std::string& s) { return parse_poly(s, {"x", "t"}); }
SymFun gauss() { return SymFun::gaussian(1); }
// (1 + x) exp(-2 (x - 1/5)^2), a second test function with phi(0) != 1
SymFun shifted_test() {
  std::vector<Rational> c{make_rational(1, 5)};
  return SymFun::term(CRational(make_rational(6, 5)), {0}, Rational(2), c) +
         SymFun::term(CRational(1), {1}, Rational(2), c);
}

}  // namespace

TEST(Quadrature, ClassicalIntegrals) {
  auto r = gauss_kronrod([](double x) { return cd(std::exp(-x * x)); }, -8, 8);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), std::sqrt(kPi), 1e-12);
  auto s = gauss_kronrod([](double x) { return cd(std::log(x)); }, 0, 1);
  EXPECT_NEAR(s.value.real(), -1.0, 1e-9);
  auto o = gauss_kronrod([](double x) { return std::exp(kI * 40.0 * x); }, {0, 1, 2, kPi});
  EXPECT_LT(std::abs(o.value - (std::exp(kI * 40.0 * kPi) - 1.0) / (40.0 * kI)), 1e-11);
}

TEST(Quadrature, DivergentIntegralThrows) {
  EXPECT_THROW(integrate_checked([](double x) { return cd(std::pow(x, -1.2)); }, {0, 1}, {1e-10, 1e-10, 200}, "x^-1.2"),
               Error);
}

TEST(Jet2, MatchesClosedFormDerivatives) {
  // d_x^2 d_t exp(x t) = (2 t + x t^2) exp(x t)
  const double x0 = 0.3, t0 = -0.7;
  Jet2 x = Jet2::var_x(5, x0), t = Jet2::var_t(5, t0);
  Jet2 e = exp(x * t);
  double E = std::exp(x0 * t0);
  EXPECT_NEAR(e.derivative(1, 0).real(), t0 * E, 1e-13);
  EXPECT_NEAR(e.derivative(2, 1).real(), (2 * t0 + x0 * t0 * t0) * E, 1e-12);
  Jet2 q = 1.0 / (1.0 + x * x);
  EXPECT_NEAR(q.derivative(2, 0).real(), (6 * x0 * x0 - 2) / std::pow(1 + x0 * x0, 3), 1e-12);
  Jet2 r = pow(2.0 + t, -0.5);
  EXPECT_NEAR(r.derivative(0, 3).real(), -15.0 / 8 * std::pow(2 + t0, -3.5), 1e-12);
  Jet2 s = sqrt(x * x + t * t);
  EXPECT_NEAR(s.derivative(1, 1).real(), -x0 * t0 / std::pow(x0 * x0 + t0 * t0, 1.5), 1e-12);
}

TEST(Kernels, AreZeroSolutions) {
  auto heat = make_kernel(KernelKind::heat_kernel);
  EXPECT_LT(zero_solution_residual(heat.f, heat.profile, 0.3, 0.1), 1e-10);
  for (auto k : {KernelKind::heat_kernel, KernelKind::poisson_kernel, KernelKind::cauchy_kernel, KernelKind::heat_gaussian})
    EXPECT_LT(verify_zero_solution(make_kernel(k)), 1e-8) << kernel_name(k);
}

TEST(Kernels, Symmetries) {
  auto poisson = make_kernel(KernelKind::poisson_kernel).f;
  auto cauchy = make_kernel(KernelKind::cauchy_kernel).f;
  for (double x : {-1.3, 0.0, 0.4})
    for (double t : {0.01, 0.5}) {
      EXPECT_EQ(poisson(x, -t), -poisson(x, t));
      // (d_x + i d_t) f = 0
      Jet2 j = cauchy.jet(x, t, 1);
      EXPECT_LT(std::abs(j.derivative(1, 0) + kI * j.derivative(0, 1)), 1e-12 * (1 + std::abs(j.derivative(1, 0))));
    }
  EXPECT_EQ(make_kernel(KernelKind::heat_kernel).f(0.2, -0.1), cd(0.0));
}

TEST(Kernels, ProfileMismatch) {
  EXPECT_THROW(make_kernel(KernelKind::heat_kernel, prof1("x^2 + t^2")), Error);
  try {
    make_kernel(KernelKind::cauchy_kernel, prof1("t - i*x^2"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KindProfileMismatch);
  }
  // a rescaled operator has the same kernels
  EXPECT_NO_THROW(make_kernel(KernelKind::poisson_kernel, prof1("3*x^2 + 3*t^2")));
}

TEST(Kernels, DerivedFieldJets) {
  auto f = make_kernel(KernelKind::poisson_kernel).f;
  Field g = derived_field(f, pxt("x*t"));  // D_x D_t f = -f_xt
  const double x = 0.4, t = 0.3, h = 1e-5;
  Jet2 jg = g.jet(x, t, 2), jf = f.jet(x, t, 4);
  EXPECT_LT(std::abs(jg.value() + jf.derivative(1, 1)), 1e-12);
  EXPECT_LT(std::abs(jg.derivative(1, 0) + jf.derivative(2, 1)), 1e-10);
  EXPECT_LT(std::abs(g(x, t) - (g(x + h, t) + g(x - h, t)) / 2.0), 1e-6);
}

TEST(Stokes, ThreeCaseCorpus) {
  ProductTest Phi{gauss(), TimeFactor{TimeFactor::bump, {0.25, 0.75, 12}}};
  // f = x^2 t is not a zero solution of the Laplacian, so the interior term is active
  auto lap = prof1("x^2 + t^2");
  auto r1 = stokes_check(polynomial_field(pxt("x^2*t")), lap, Phi, 0.1, 1.0);
  EXPECT_LT(r1.abs_diff, 1e-6);
  EXPECT_GT(std::abs(r1.interior), 0.1);

  auto heat = make_kernel(KernelKind::heat_kernel);
  auto r2 = stokes_check(heat.f, heat.profile, Phi, 0.05, 0.5);
  EXPECT_LT(r2.abs_diff, 1e-6);
  EXPECT_LT(std::abs(r2.interior), 1e-9);
  EXPECT_GT(std::abs(r2.boundary), 0.1);

  auto r3 = stokes_check(heat.f, heat.profile, ProductTest{SymFun(1), Phi.chi}, 0.05, 0.5);
  EXPECT_EQ(r3.lhs, cd(0.0));
  EXPECT_EQ(r3.rhs, cd(0.0));
}

TEST(Stokes, HigherOrderAndComplexOperators) {
  ProductTest Phi{shifted_test(), TimeFactor{TimeFactor::gaussian, {}, 3.0, 0.2}};
  auto r = stokes_check(make_kernel(KernelKind::cauchy_kernel).f, prof1("t - i*x"), Phi, 0.2, 0.9);
  EXPECT_LT(r.abs_diff, 1e-6);
  auto r4 = stokes_check(polynomial_field(pxt("x^3 + t^2*x - i*t")), prof1("t^3 + x^4 - 2*i*x*t"), Phi, -0.4, 0.6);
  EXPECT_LT(r4.abs_diff, 1e-6);
}

TEST(BvDirect, ReferenceKernels) {
  auto heat = bv_direct(make_kernel(KernelKind::heat_kernel).f, gauss());
  EXPECT_LT(std::abs(heat.value - 1.0), 1e-4);
  auto poisson = bv_direct(make_kernel(KernelKind::poisson_kernel).f, gauss());
  EXPECT_LT(std::abs(poisson.value - 2.0), 1e-4);
  auto cauchy = bv_direct(make_kernel(KernelKind::cauchy_kernel).f, gauss());
  EXPECT_LT(std::abs(cauchy.value + 2.0 * kPi * kI), 1e-3);
  ASSERT_TRUE(cauchy.staggered.has_value());
  EXPECT_LT(std::abs(*cauchy.staggered - cauchy.value), 1e-6);
  EXPECT_EQ(static_cast<int>(cauchy.trail.size()), 13);
  for (size_t k = 1; k < cauchy.trail.size(); ++k) EXPECT_EQ(cauchy.trail[k].t, cauchy.trail[k - 1].t / 2);
}

TEST(BvDirect, CauchyBruteForceAtSmallT) {
  auto f = make_kernel(KernelKind::cauchy_kernel).f;
  NumSymFun phi = NumSymFun::from(gauss());
  const double t = 1e-4;
  cd v = integrate_checked([&](double x) { return (f(x, t) - f(x, -t)) * phi(x); },
                           {-9, -std::sqrt(t), -t, 0, t, std::sqrt(t), 9}, {1e-12, 1e-12, 4000}, "brute force");
  EXPECT_LT(std::abs(v + 2.0 * kPi * kI), 1e-3);
}

TEST(BvDirect, SecondTestFunction) {
  SymFun phi = shifted_test();
  const double phi0 = NumSymFun::from(phi)(0.0).real();
  EXPECT_LT(std::abs(bv_direct(make_kernel(KernelKind::heat_kernel).f, phi).value - phi0), 1e-4);
  EXPECT_LT(std::abs(bv_direct(make_kernel(KernelKind::poisson_kernel).f, phi).value - 2 * phi0), 1e-4);
}

TEST(BvDirect, NonConvergentTrailIsReported) {
  // grows like t^{-2} at x = 0: no limit
  Field bad("t^-2 spike", [](double x, double t) { return cd(1.0 / ((x * x + t * t) * t)); },
            [](const Jet2& x, const Jet2&) { return Jet2(x.order(), 0.0); });
  try {
    bv_direct(bad, gauss());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
  }
}

TEST(BvDirect, Linearity) {
  auto f = make_kernel(KernelKind::cauchy_kernel).f;
  SymFun a = gauss(), b = shifted_test();
  auto va = bv_direct(f, a).value, vb = bv_direct(f, b).value;
  auto vab = bv_direct(f, a + b * CRational(2)).value;
  EXPECT_LT(std::abs(vab - (va + 2.0 * vb)), 1e-8);
}

TEST(BvStokes, AgreesWithDirect) {
  SymFun phi = gauss();
  auto heat = make_kernel(KernelKind::heat_kernel);
  auto hs = bv_stokes(heat.f, heat.profile, phi, 0);
  EXPECT_LT(std::abs(hs.value - 1.0), 1e-4);
  EXPECT_LT(std::abs(hs.value - bv_direct(heat.f, phi).value), 1e-3);

  auto cauchy = make_kernel(KernelKind::cauchy_kernel);
  auto cs = bv_stokes(cauchy.f, cauchy.profile, phi, 0);
  EXPECT_LT(std::abs(cs.value + 2.0 * kPi * kI), 1e-3);
  EXPECT_LT(std::abs(cs.value - bv_direct(cauchy.f, phi).value), 1e-3);

  // P_(2) = 1 for the Laplacian, so slot j = 1 pairs bv(f) itself
  auto poisson = make_kernel(KernelKind::poisson_kernel);
  auto ps = bv_stokes(poisson.f, poisson.profile, phi, 1);
  EXPECT_LT(std::abs(ps.value - 2.0), 1e-4);
  EXPECT_LT(std::abs(ps.value - bv_direct(poisson.f, phi).value), 1e-3);
}

TEST(BvStokes, SmoothAcrossZeroGivesZero) {
  auto g = make_kernel(KernelKind::heat_gaussian);
  EXPECT_LT(std::abs(bv_stokes(g.f, g.profile, gauss(), 0).value), 1e-6);
  EXPECT_LT(std::abs(bv_direct(g.f, gauss()).value), 1e-6);
}

TEST(BvStokes, ResidualTooLargeForFastGrowth) {
  auto heat = make_kernel(KernelKind::heat_kernel);
  Field steep("t^-3 heat", [&](double x, double t) { return heat.f(x, t) * std::pow(std::abs(t), -2.5); },
              [](const Jet2& x, const Jet2&) { return Jet2(x.order(), 0.0); });
  StokesBvConfig cfg;
  cfg.order = 2;
  try {
    bv_stokes(steep, heat.profile, gauss(), 0, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResidualTooLarge);
  }
}

TEST(BvTDerivatives, HeatIsDirect) {
  auto heat = make_kernel(KernelKind::heat_kernel);
  auto v = bv_t_derivatives(heat.profile, gauss(), [&](int j, const SymFun& psi) {
    return bv_stokes(heat.f, heat.profile, psi, j).value;
  });
  ASSERT_EQ(v.size(), 1u);
  EXPECT_LT(std::abs(v[0] - 1.0), 1e-4);
}

TEST(BvTDerivatives, PoissonEvenOddStructure) {
  auto poisson = make_kernel(KernelKind::poisson_kernel);
  auto v = bv_t_derivatives(poisson.profile, gauss(), [&](int j, const SymFun& psi) {
    return bv_stokes(poisson.f, poisson.profile, psi, j).value;
  });
  ASSERT_EQ(v.size(), 2u);
  EXPECT_LT(std::abs(v[0] - 2.0), 1e-4);
  EXPECT_LT(std::abs(v[1]), 1e-4);
  // the same D_t pairing as a direct limit
  auto dt = bv_direct(derived_field(poisson.f, pxt("t")), gauss());
  EXPECT_LT(std::abs(dt.value - v[1]), 1e-4);
}

TEST(BvTDerivatives, RecursionUsesLowerOrderTerms) {
  // P = t^2 + x t + x^2 has Q_1 = x, so bv(D_t f) = P_(1) pairing minus a Q_1 correction
  auto prof = prof1("t^2 + x*t + x^2");
  std::vector<std::pair<int, SymFun>> calls;
  auto v = bv_t_derivatives(prof, gauss(), [&](int j, const SymFun& psi) {
    calls.push_back({j, psi});
    return cd(j == 0 ? 5.0 : 1.0) * integrate(psi);
  });
  ASSERT_EQ(v.size(), 2u);
  // l = 1: pairing(0, phi) - T(0, Q_1(-D) phi) with Q_1(-D) phi = i phi', whose integral vanishes
  EXPECT_LT(std::abs(v[0] - integrate(gauss())), 1e-12);
  EXPECT_LT(std::abs(v[1] - 5.0 * integrate(gauss())), 1e-12);
  EXPECT_EQ(calls.size(), 3u);
}

TEST(BvTransfer, DerivativeMovesToTestFunction) {
  // <bv(D_x f), phi> = <bv(f), -D_x phi>
  auto f = make_kernel(KernelKind::cauchy_kernel).f;
  SymFun phi = shifted_test();
  auto lhs = bv_direct(derived_field(f, pxt("x")), phi).value;
  SymFun mdphi = apply_operator(parse_poly("-x", {"x"}), phi);
  auto rhs = bv_direct(f, mdphi).value;
  EXPECT_LT(std::abs(lhs - rhs), 1e-4);
}

TEST(GrowthFit, Kernels) {
  EXPECT_EQ(growth_fit(make_kernel(KernelKind::heat_kernel).f).N, 1);
  auto p = growth_fit(make_kernel(KernelKind::poisson_kernel).f);
  EXPECT_EQ(p.N, 1);
  EXPECT_NEAR(p.slope, -1.0, 1e-6);
  EXPECT_EQ(growth_fit(make_kernel(KernelKind::heat_gaussian).f).N, 0);
  auto h = growth_fit(make_kernel(KernelKind::heat_kernel).f);
  EXPECT_NEAR(h.slope, -0.5, 1e-6);
  EXPECT_LT(h.fit_residual, 1e-6);
}

TEST(GrowthFit, WeightedEnvelope) {
  WeightSeq M = WeightSeq::gevrey(2);
  auto g = growth_fit(make_kernel(KernelKind::poisson_kernel).f, {}, &M, 2);
  ASSERT_TRUE(g.h_fit.has_value());
  EXPECT_GT(*g.h_fit, 0);
}
