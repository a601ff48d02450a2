#pragma once

#include "hypobv/cauchyext.hpp"
#include "hypobv/jet2.hpp"
#include "hypobv/polyops.hpp"
#include "hypobv/quadrature.hpp"
#include "hypobv/symfun.hpp"
#include "hypobv/weights.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hypobv {

// Closed-form f(x, t) in one space dimension, with derivatives through Jet2.
class Field {
 public:
  using ValueFn = std::function<std::complex<double>(double, double)>;
  using JetFn = std::function<Jet2(const Jet2&, const Jet2&)>;

  Field() = default;
  Field(std::string name, ValueFn value, JetFn jet) : name_(std::move(name)), value_(std::move(value)), jet_(std::move(jet)) {}

  const std::string& name() const { return name_; }
  std::complex<double> operator()(double x, double t) const { return value_(x, t); }
  Jet2 jet(double x, double t, int order) const;
  // Q(D) f at (x, t), Q over (x, t), D = -i d
  std::complex<double> apply(const MultiPoly& Q, double x, double t) const;

 private:
  std::string name_;
  ValueFn value_;
  JetFn jet_;
};

// p(x, t) as a field (two variables).
Field polynomial_field(const MultiPoly& p);
// Q(D) f as a field.
Field derived_field(const Field& f, const MultiPoly& Q);

enum class KernelKind { heat_kernel, poisson_kernel, cauchy_kernel, heat_gaussian };
const char* kernel_name(KernelKind k);
KernelKind kernel_from_name(const std::string& s);
// Operator each kernel solves, in the variables (x, t).
MultiPoly kernel_operator(KernelKind k);

struct ZeroSolution {
  OperatorProfile profile;
  KernelKind kind;
  Field f;
};

// heat_kernel: (4 pi t)^{-1/2} e^{-x^2/4t} for t > 0, 0 for t < 0, P = t - i x^2
// poisson_kernel: t / (pi (x^2 + t^2)), P = x^2 + t^2
// cauchy_kernel: 1 / (x + i t), P = t - i x
// heat_gaussian: (1 + t/2)^{-1/2} e^{-x^2/(8+4t)}, smooth for t > -2, P = t - i x^2
ZeroSolution make_kernel(KernelKind kind, const OperatorProfile& prof);
ZeroSolution make_kernel(KernelKind kind);

// |P(D) f| / sum |c_alpha D^alpha f| at one point.
double zero_solution_residual(const Field& f, const OperatorProfile& prof, double x, double t);
// Largest relative residual over x in [-2, 2] (17 points), t = +-2^{-k}, k = 1..6.
double verify_zero_solution(const ZeroSolution& zs);

// chi(t): constant one, the plateau bump psi(|t|), or exp(-b (t - c)^2).
struct TimeFactor {
  enum Kind { one, bump, gaussian } kind = one;
  BumpFun cut{0.25, 0.5, 12};
  double width = 1, center = 0;
  // chi^{(j)}(t), j = 0..k
  std::vector<double> jet(double t, int k) const;
  double support_radius() const;  // +inf for one
};

// Phi(x, t) = phi(x) chi(t)
struct ProductTest {
  SymFun phi;
  TimeFactor chi;
};

struct StokesConfig {
  QuadConfig quad{1e-9, 1e-12, 4000};  // per one-dimensional integral
  double x_radius = 0;                  // 0: from the Gaussian envelopes
};

struct StokesResult {
  std::complex<double> lhs;       // int int f P^(D) Phi
  std::complex<double> interior;  // int int P(D) f Phi
  std::complex<double> boundary;  // i sum_j (-1)^j int [P_(j+1)(D) f D_t^j Phi]_a^b
  std::complex<double> rhs;
  double abs_diff = 0;
  double quad_error = 0;
};

StokesResult stokes_check(const Field& f, const OperatorProfile& prof, const ProductTest& Phi, double a, double b,
                          const StokesConfig& cfg = {});

enum class BvMethod { direct, stokes };
const char* bv_method_name(BvMethod m);

struct TrailPoint {
  int k = 0;
  double t = 0, s = 0;
  std::complex<double> value;
};

struct PairingResult {
  BvMethod method = BvMethod::direct;
  std::complex<double> value;
  double error = 0;
  std::vector<TrailPoint> trail;         // direct: symmetric schedule t_k = s_k
  std::vector<double> orders;            // detected Richardson orders
  std::optional<std::complex<double>> staggered;  // direct: limit along s_k = t_{k+1}
  std::string note;
};

struct BvSchedule {
  double t0 = 0.25;
  int steps = 12;
  bool staggered_probe = true;
  QuadConfig quad{1e-12, 1e-12, 4000};
  int threads = 1;
};

// lim int (f(x, t) - f(x, -s)) phi(x) dx along t_k = s_k = t0 2^{-k}
PairingResult bv_direct(const Field& f, const SymFun& phi, const BvSchedule& sched = {});

struct StokesBvConfig {
  int order = 6;                   // finite_order residual order of the extension for P^
  BumpFun cut{0.25, 0.5, 12};
  QuadConfig outer{1e-9, 1e-10, 4000};
  QuadConfig inner{1e-11, 1e-11, 4000};
};

// <bv(P_(j+1)(D) f), phi> as (-1)^j i int int f P^(D) Phi, Phi the extension for P^ with
// D_t^j Phi(., 0) = phi and the other traces zero.
PairingResult bv_stokes(const Field& f, const OperatorProfile& prof, const SymFun& phi, int j,
                        const StokesBvConfig& cfg = {});

// pairing(j, psi) = <bv(P_(j+1)(D) f), psi>. Returns <bv(D_t^l f), phi> for l = 0..m-1.
using PairingFn = std::function<std::complex<double>(int, const SymFun&)>;
std::vector<std::complex<double>> bv_t_derivatives(const OperatorProfile& prof, const SymFun& phi,
                                                   const PairingFn& pairing);

struct GrowthWindow {
  int k_coarse = 1;  // t = 2^{-k}
  int k_fine = 10;
  double x_radius = 4;
  int x_points = 2001;
};

struct GrowthFit {
  int N = -1;                       // smallest integer with sup|f| t^N nonincreasing; -1 if none <= 20
  std::vector<double> t, sup;
  double slope = 0;                 // log-log slope of sup|f|
  double fit_residual = 0;          // rms deviation from that line
  std::optional<double> h_fit;      // largest h = 2^k, |k| <= 6, with sup|f| e^{-omega(1/(h t))} nonincreasing
};

GrowthFit growth_fit(const Field& f, const GrowthWindow& w = {}, const WeightSeq* M = nullptr, double b0 = 1);

}  // namespace hypobv
