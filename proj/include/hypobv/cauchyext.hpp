#pragma once

#include "hypobv/polyops.hpp"
#include "hypobv/symfun.hpp"
#include "hypobv/weights.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace hypobv {

enum class CauchyProvenance { recursive, explicit_formula };

struct CauchyTable {
  OperatorProfile profile;
  std::vector<MultiPoly> ops;  // C_0..C_{L_max}, polynomials in x read as operators in D_x
  CauchyProvenance provenance = CauchyProvenance::recursive;
  int L_max() const { return static_cast<int>(ops.size()) - 1; }
};

CauchyTable cauchy_recursive(const OperatorProfile& prof, int L_max);
CauchyTable cauchy_explicit(const OperatorProfile& prof, int L_max);
// sum_k Q_k C_{k+l} == 0 for every l <= L_max - m.
bool cauchy_identity_holds(const CauchyTable& table);
// sum_j sum_{k <= m-1-j} Q_{j+k+1}(D) C_{k+n}(phi_j), computed exactly.
SymFun trace_combination(const CauchyTable& table, const std::vector<SymFun>& phis, int n);

// S_n(x,t) = sum_{p<=n} C_p(phi)(x) (it)^p / p!
class FormalSolution {
 public:
  FormalSolution(const CauchyTable& table, const SymFun& phi, int n);
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const SymFun& coeff(int p) const { return coeffs_.at(p); }
  std::complex<double> operator()(const double* x, double t) const;
  std::complex<double> operator()(double x, double t) const { return (*this)(&x, t); }

 private:
  std::vector<SymFun> coeffs_;
  std::vector<NumSymFun> scaled_;  // C_p(phi) / p!
};

FormalSolution formal_solution(const CauchyTable& table, const SymFun& phi, int n);

enum class ExtMode { plain, finite_order, gevrey, convergent };
const char* ext_mode_name(ExtMode m);

struct ExtensionConfig {
  ExtMode mode = ExtMode::plain;
  // plain: truncation order n of the t-series; finite_order: target residual order N;
  // convergent: truncation order n.
  int order = 0;
  BumpFun bump{0.25, 0.5, 12};  // t-cutoff for finite_order (psi(t)), psi(lambda t) otherwise
  // gevrey and convergent modes
  std::optional<WeightSeq> M;
  double h = 1;
  std::optional<double> A;      // default: 1 / (8 L1 H^{b0})
  double t_min = 1.0 / 1024;    // smallest evaluation time; fixes the cutoff index
  int threads = 1;
};

// Phi for data phi_0..phi_{m-1}, together with an evaluator for P(D)Phi.
class ExtensionBuild {
 public:
  ExtensionBuild(const OperatorProfile& prof, const std::vector<SymFun>& phis, const ExtensionConfig& cfg);

  const OperatorProfile& profile() const { return prof_; }
  const ExtensionConfig& config() const { return cfg_; }
  ExtMode mode() const { return mode_; }
  // Truncation order of the t-series (plain, finite_order, convergent) or the cutoff index p_max (gevrey).
  int series_order() const { return n_; }
  double A() const { return A_; }
  double L1() const { return L1_; }
  double H() const { return H_; }
  double b0() const { return b0_; }
  double lambda(int p) const;  // cutoff scale of the p-th term
  bool convergent_branch() const { return mode_ == ExtMode::convergent; }
  // |t| below which every cutoff equals one
  double inner_window() const;

  // D_t^q Phi(., 0) for q = 0..m-1, exact.
  const std::vector<SymFun>& traces() const { return traces_; }
  bool traces_exact() const;

  std::complex<double> value(const double* x, double t) const;
  std::complex<double> residual(const double* x, double t) const;
  std::complex<double> value(double x, double t) const { return value(&x, t); }
  std::complex<double> residual(double x, double t) const { return residual(&x, t); }
  double envelope_radius() const { return radius_; }

 private:
  void build_series();
  void build_gevrey();
  std::complex<double> weight_derivative(int b, double t) const;  // D_t^b w(t)
  std::complex<double> cutoff_derivative(int p, int b, double t) const;  // D_t^b psi(lambda_p t)

  OperatorProfile prof_;
  std::vector<SymFun> phis_;
  ExtensionConfig cfg_;
  ExtMode mode_;
  int n_ = 0;
  double A_ = 0, L1_ = 0, H_ = 0, b0_ = 0;
  std::vector<double> log_lambda_;
  std::vector<SymFun> traces_;
  double radius_ = 0;

  // Series modes: Phi_q / q! for q <= n, (Q_r Phi_q)/q!, and rho_q/q!.
  std::vector<NumSymFun> phi_q_;
  std::vector<std::vector<NumSymFun>> G_;   // G_[r][q]
  std::vector<NumSymFun> rho_;              // index q - (n - m + 1)

  // Gevrey mode: K_{j,k,p}/p! and H_{j,k,r,p}/p!, flattened over (j,k).
  struct JK {
    int j, k;
    std::vector<NumSymFun> K;                // p = 0..p_max
    std::vector<std::vector<NumSymFun>> H;   // H[r][p], p = 0..p_max+m
  };
  std::vector<JK> jk_;
};

struct ExtensionReportConfig {
  int k_coarse = 4;   // dyadic window 2^{-k_coarse} .. 2^{-k_fine}
  int k_fine = 10;
  int discard = 2;    // coarsest points dropped from the slope fit
  int x_points = 161; // per axis (d = 1); coarser grids for d > 1
  double x_radius = 0; // 0: use the envelope radius
  int L_low = -6, L_high = 6;  // L = A 2^k sweep
  int threads = 1;
};

struct ExtensionReport {
  ExtMode mode = ExtMode::plain;
  bool trace_exact = false;
  std::vector<double> t;
  std::vector<double> residual;   // sup_x |P(D)Phi(x,t)|
  double slope = 0;               // log-log slope of the residual
  int series_order = 0;
  double A = 0;
  std::optional<double> fitted_L;
  std::vector<double> weighted;   // at fitted_L
  std::vector<std::pair<double, bool>> sweep;
  double inner_window = 0;
  double inner_residual = 0;      // convergent branch: max residual on the inner window
};

// sup_x |P(D) Phi(x, t)| on a grid
double residual_sup(const ExtensionBuild& ext, double t, const ExtensionReportConfig& cfg);
ExtensionReport verify_extension(const ExtensionBuild& ext, const ExtensionReportConfig& cfg = {});

}  // namespace hypobv
