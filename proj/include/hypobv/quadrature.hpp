#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace hypobv {

using CFun = std::function<std::complex<double>(double)>;

struct QuadConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

struct QuadResult {
  std::complex<double> value;
  double error = 0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod (G10/K21) over [breaks.front(), breaks.back()],
// starting from the panels between consecutive breakpoints.
QuadResult gauss_kronrod(const CFun& f, std::vector<double> breaks, const QuadConfig& cfg = {});
inline QuadResult gauss_kronrod(const CFun& f, double a, double b, const QuadConfig& cfg = {}) {
  return gauss_kronrod(f, std::vector<double>{a, b}, cfg);
}

// Same, but throws QuadratureNoConvergence when the tolerance is not met.
std::complex<double> integrate_checked(const CFun& f, std::vector<double> breaks, const QuadConfig& cfg,
                                       const std::string& what, double* error = nullptr);

}  // namespace hypobv
