#pragma once

#include "hypobv/boundary.hpp"
#include "hypobv/polyops.hpp"
#include "hypobv/quadrature.hpp"
#include "hypobv/symfun.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace hypobv {

struct FundSolConfig {
  std::optional<double> A;                 // contour Im tau = -A; default 2
  QuadConfig quad{1e-10, 1e-10, 8000};
  double xi_max = 0;                       // 0: from the test function envelope
  double point_tol = 1e-6;                 // pointwise E: stop shrinking the mollifier here
};

struct DeltaCheck {
  std::complex<double> pairing;   // <E, P^(D) phi>
  std::complex<double> expected;  // phi(0, 0)
  double abs_err = 0;
  double quad_error = 0;
};

struct RegularityFit {
  std::vector<double> t;
  std::vector<double> sup;   // sup over the x grid of |E(x, t)|, both signs of t
  double S = 0;              // fitted exponent: sup |E| |t|^S stays bounded
  bool bounded = false;      // sup |E| |t|^S within a factor 10 over the window
};

// E with P(D) E = delta for d = 1. In the x-Fourier variable xi, E^(xi, .) is the
// ODE fundamental solution from the contour Im tau = -A, evaluated by residues.
class FundamentalSolution1D {
 public:
  FundamentalSolution1D(const OperatorProfile& prof, const FundSolConfig& cfg = {});

  double A() const { return A_; }
  const OperatorProfile& profile() const { return prof_; }
  // xi where a root of P(xi, .) crosses the contour, within [-lim, lim]
  std::vector<double> crossings(double lim) const;
  std::complex<double> Ehat(double xi, double t) const;
  // Mollified inverse transform in xi, with shrinking mollifier width.
  std::complex<double> operator()(double x, double t) const;

  // <E, P^(D)(phi(x) chi(t))> against phi(0) chi(0), chi Gaussian in t.
  DeltaCheck check_delta(const SymFun& phi, const TimeFactor& chi) const;
  RegularityFit regularity(int k_max = 6, double x_radius = 1, int x_points = 9) const;

 private:
  struct Residues {
    std::vector<std::complex<double>> tau;  // roots
    std::vector<std::complex<double>> w;    // residue weights 1/P'(tau), or cluster data
    std::vector<int> side;                  // +1 above the contour, -1 below
    std::vector<std::vector<int>> clusters;
  };
  Residues residues(double xi) const;
  std::complex<double> ehat_from(const Residues& r, double t) const;

  OperatorProfile prof_;
  FundSolConfig cfg_;
  double A_ = 2;
  std::vector<double> cross_;  // within |xi| <= 1e3
};

}  // namespace hypobv
