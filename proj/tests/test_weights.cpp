#include "hypobv/errors.hpp"
#include "hypobv/weights.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace hypobv;

namespace {

WeightSeq factorial_times_power(double base, int p_max) {
  std::vector<double> lg(p_max + 1);
  for (int p = 0; p <= p_max; ++p) lg[p] = p * std::log(base) + std::lgamma(p + 1.0);
  return WeightSeq::from_log_table(lg, "c^p p!");
}

}  // namespace

TEST(WeightSeq, Construction) {
  auto g = WeightSeq::gevrey(2);
  EXPECT_EQ(g.p_max(), 400);
  EXPECT_DOUBLE_EQ(g.log_M(0), 0.0);
  EXPECT_DOUBLE_EQ(g.log_M(1), 0.0);
  EXPECT_NEAR(g.log_M(5), 2 * std::log(120.0), 1e-12);
  EXPECT_THROW(WeightSeq::from_table({2.0, 1.0, 3.0}), Error);
  EXPECT_THROW(WeightSeq::from_table({1.0, 1.0, -3.0}), Error);
  EXPECT_THROW(WeightSeq::gevrey(0), Error);
}

TEST(WeightSeq, Csv) {
  std::string path = ::testing::TempDir() + "/seq.csv";
  {
    std::ofstream out(path);
    out << "index,value\n0,1\n1,1\n2,2\n3,6\n";
  }
  auto w = WeightSeq::from_csv(path);
  EXPECT_EQ(w.p_max(), 3);
  EXPECT_NEAR(w.M(3), 6.0, 1e-12);
  EXPECT_THROW(WeightSeq::from_csv(path + ".missing"), Error);
  std::remove(path.c_str());
}

TEST(Transform, Examples) {
  auto g2 = WeightSeq::gevrey(2);
  auto t = transform(g2, 2, true);
  for (int p : {0, 3, 10, 50}) EXPECT_NEAR(t.log_M(p), 3 * std::lgamma(p + 1.0), 1e-9);
  auto id = transform(g2, 1, false);
  EXPECT_EQ(id.log_values(), g2.log_values());
  auto one = transform(WeightSeq::gevrey(1), 1, true);
  for (int p = 0; p <= one.p_max(); ++p) EXPECT_NEAR(one.log_M(p), 0.0, 1e-12);
  EXPECT_TRUE(one.asymptotic_to_one());
}

TEST(Conditions, GevreyTwo) {
  auto rep = check_conditions(WeightSeq::gevrey(2), 1.0);
  EXPECT_EQ(rep.M1.verdict, Verdict::holds_on_truncation);
  EXPECT_EQ(rep.M2.verdict, Verdict::holds_on_truncation);
  EXPECT_EQ(rep.M3prime.verdict, Verdict::holds_on_truncation);
  EXPECT_EQ(rep.M4a.verdict, Verdict::holds_on_truncation);
  EXPECT_TRUE(rep.weight_sequence());
  EXPECT_NEAR(rep.M4a_C, 1.0, 1e-9);
}

TEST(Conditions, M4FailsWithWitness) {
  auto rep = check_conditions(WeightSeq::gevrey(1.2), 0.5);
  EXPECT_EQ(rep.M4a.verdict, Verdict::fails);
  EXPECT_FALSE(rep.M4a.witness.empty());
}

TEST(Conditions, PlantedM1Violation) {
  std::vector<double> v(101);
  for (int p = 0; p <= 100; ++p) v[p] = std::exp(1.5 * std::lgamma(p + 1.0));
  v[2] *= 3;  // M_2^2 > M_1 M_3
  auto rep = check_conditions(WeightSeq::from_table(v));
  EXPECT_EQ(rep.M1.verdict, Verdict::fails);
  ASSERT_EQ(rep.M1.witness.size(), 1u);
  EXPECT_EQ(rep.M1.witness[0], 2);
}

TEST(Conditions, M3PrimeDivergesForSigmaAtMostOne) {
  auto rep = check_conditions(WeightSeq::gevrey(1.0));
  EXPECT_EQ(rep.M3prime.verdict, Verdict::fails);
  EXPECT_GT(rep.M3prime_slope, -1.05);
  for (double s : {1.5, 2.0, 3.0}) EXPECT_EQ(check_conditions(WeightSeq::gevrey(s)).M3prime.verdict, Verdict::holds_on_truncation);
}

TEST(Conditions, M4MatchesSigmaRule) {
  for (double s : {1.2, 1.5, 2.0, 3.0})
    for (double a : {0.5, 1.0, 2.0}) {
      auto rep = check_conditions(WeightSeq::gevrey(s), a);
      Verdict expect = s >= 1 / a ? Verdict::holds_on_truncation : Verdict::fails;
      EXPECT_EQ(rep.M4a.verdict, expect) << "sigma=" << s << " a=" << a;
    }
}

TEST(Conditions, M2FitSatisfiesOmegaInequality) {
  auto M = WeightSeq::gevrey(2);
  auto rep = check_conditions(M);
  ASSERT_EQ(rep.M2.verdict, Verdict::holds_on_truncation);
  for (double rho : {2.0, 10.0, 100.0, 1e3, 1e4}) {
    double lhs = 2 * omega(M, rho).value;
    double rhs = omega(M, rep.M2_H * rho).value + std::log(rep.M2_C);
    EXPECT_LE(lhs, rhs + 1e-9) << rho;
  }
}

TEST(Omega, Examples) {
  auto M = WeightSeq::gevrey(2);
  EXPECT_DOUBLE_EQ(omega(M, 1.0).value, 0.0);
  auto r = omega(M, 4.0);
  EXPECT_NEAR(r.value, std::log(4.0), 1e-12);
  EXPECT_TRUE(r.argmax == 1 || r.argmax == 2);
  auto one = transform(WeightSeq::gevrey(1), 1, true);
  EXPECT_TRUE(std::isinf(omega(one, 2.0).value));
  EXPECT_EQ(omega(one, 0.5).value, 0.0);
  EXPECT_THROW(omega(WeightSeq::gevrey(2, 60), 1e60), Error);
}

TEST(Omega, MonotoneConvexAndSuperLogarithmic) {
  auto M = WeightSeq::gevrey(1.5, 1000);
  double prev = -1;
  std::vector<double> vals;
  for (int k = 0; k <= 40; ++k) {
    double v = omega(M, std::pow(10.0, k * 0.1)).value;
    EXPECT_GE(v, prev);
    prev = v;
    vals.push_back(v);
  }
  for (size_t i = 1; i + 1 < vals.size(); ++i) EXPECT_LE(2 * vals[i], vals[i - 1] + vals[i + 1] + 1e-9);
  double last_ratio = 0;
  for (int k = 1; k <= 4; ++k) {
    double ratio = omega(M, std::pow(10.0, k)).value / (k * std::log(10.0));
    EXPECT_GT(ratio, last_ratio);
    last_ratio = ratio;
  }
}

TEST(GammaCut, Examples) {
  auto Mstar = transform(WeightSeq::gevrey(2), 2, true);
  EXPECT_EQ(gamma_cut(Mstar, 0.01), 4);
  EXPECT_EQ(gamma_cut(Mstar, 1.0), 0);
  EXPECT_EQ(gamma_cut(Mstar, 5.0), 0);
  double lhs = std::pow(0.01, 4) * std::pow(24.0, 3);
  EXPECT_NEAR(lhs, 1.3824e-4, 1e-12);
  EXPECT_NEAR(std::exp(-omega(Mstar, 100).value), lhs, 1e-14);
  EXPECT_LT(gamma_identity_error(Mstar, 0.01), 1e-10);
  EXPECT_THROW(gamma_cut(transform(WeightSeq::gevrey(1), 1, true), 0.5), Error);
}

TEST(Relation, Examples) {
  EXPECT_EQ(relation(WeightSeq::gevrey(1), WeightSeq::gevrey(2)).relation, Relation::prec);
  EXPECT_EQ(relation(WeightSeq::gevrey(2), WeightSeq::gevrey(2)).relation, Relation::asymp);
  auto r = relation(factorial_times_power(2, 400), WeightSeq::gevrey(1));
  EXPECT_EQ(r.relation, Relation::asymp);
  EXPECT_NEAR(r.L_forward, 2.0, 1e-9);
  EXPECT_NEAR(r.L_backward, 0.5, 1e-9);
  EXPECT_EQ(relation(WeightSeq::gevrey(2), WeightSeq::gevrey(1)).relation, Relation::none);
}

TEST(FloorPowerFit, GevreyTwo) {
  auto M = WeightSeq::gevrey(2);
  auto f1 = floor_power_fit(M, 1);
  EXPECT_NEAR(f1.C, 1.0, 1e-9);
  EXPECT_NEAR(f1.L, 1.0, 1e-9);
  // a = 2: the fitted pair must satisfy M_{2p} <= C L^p M_p^2 on the truncation.
  auto f2 = floor_power_fit(M, 2);
  for (int p = 0; p <= f2.p_top; ++p)
    EXPECT_LE(M.log_M(2 * p), std::log(f2.C) + p * std::log(f2.L) + 2 * M.log_M(p) + 1e-9) << p;
  EXPECT_LE(f2.L, 16.0 + 1e-9);  // (2p)! <= 4^p p!^2
  auto fh = floor_power_fit(M, 0.5);
  EXPECT_GT(fh.C, 0.0);
  EXPECT_GE(fh.argmax, 0);
  for (int p = 0; p <= fh.p_top; ++p)
    EXPECT_LE(M.log_M(p / 2), std::log(fh.C) + p * std::log(fh.L) + 0.5 * M.log_M(p) + 1e-9);
}

TEST(Dichotomy, ReportedWithM4) {
  auto rep = check_conditions(WeightSeq::gevrey(2), 0.5);
  ASSERT_TRUE(rep.dichotomy.has_value());
  EXPECT_EQ(rep.dichotomy->relation, Relation::asymp);
  auto rep2 = check_conditions(WeightSeq::gevrey(3), 1.0);
  EXPECT_EQ(rep2.dichotomy->relation, Relation::prec);
}
