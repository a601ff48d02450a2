#pragma once

#include "hypobv/polyops.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace hypobv {

// max over k < m with Q_k != 0 of deg Q_k / (m - k)
Rational b0_exact(const OperatorProfile& prof);

enum class SemiElliptic { yes, no, inconclusive };
const char* semi_elliptic_name(SemiElliptic s);

struct IndexReport {
  Rational b0;
  SemiElliptic semi_elliptic = SemiElliptic::inconclusive;
  std::vector<int> n;                 // deg_{x_j} P for j = 1..d, then m
  std::vector<double> witness;        // real zero of the principal part when semi_elliptic == no
  std::string note;
  std::optional<Rational> a0, gamma0, mu0;
  std::string case_tag = "not_semielliptic";
  MultiPoly principal;                // P^0
  double principal_min = 0;           // min |P^0| over the anisotropic sphere sample
  double threshold = 0;
  int grid_points = 0;
  unsigned seed = 0;                  // Halton start index
  bool degQ_bounded = true;
};

struct SemiEllipticConfig {
  int points = 100000;
  unsigned seed = 1;
  double rel_threshold = 1e-8;
};

IndexReport semi_elliptic_analyze(const OperatorProfile& prof, const SemiEllipticConfig& cfg = {});

struct RootMargin {
  std::vector<double> x;
  double value = 0;
  std::vector<std::complex<double>> roots;
};

RootMargin root_margin(const OperatorProfile& prof, const std::vector<double>& x);
std::vector<std::complex<double>> t_roots(const OperatorProfile& prof, const std::vector<double>& x);

struct A0ProbeConfig {
  double R_min = 1;
  double R_max = 1e3;
  int radii = 61;
  int random_rays = 8;
  unsigned seed = 20240611;
  double eps = 0.1;
};

// Running sup of the two characterizing ratios along rays, as a function of |x|.
struct A0Trace {
  std::vector<double> radius;
  std::vector<double> C_i;    // max_l max_t |x|^{a l} |D_t^l P| / |P|
  std::vector<double> C_ii;   // |x|^a / d(x)
  double C_fit = 0;           // max of both at R_max
  double slope = 0;           // log-log slope of the larger ratio over the outer half
  double growth = 0;          // C(R_max) / C(R_min), running sup
  bool bounded = false;
};

struct A0Probe {
  double a = 0;
  A0Trace at_a;
  A0Trace perturbed;          // at a (1 + eps)
  bool maximal = false;       // perturbed trace grows
  bool pass = false;
  double R = 0;
};

A0Trace a0_trace(const OperatorProfile& prof, double a, const A0ProbeConfig& cfg = {});
A0Probe verify_a0_numeric(const OperatorProfile& prof, double a, const A0ProbeConfig& cfg = {});

}  // namespace hypobv
