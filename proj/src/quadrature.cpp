#include "hypobv/quadrature.hpp"

#include "hypobv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace hypobv {

namespace {

// 21-point Kronrod abscissae (positive half) and weights; odd entries carry the 10-point Gauss rule.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525355381, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                           0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                           0.295524224714752870173892994651338};

struct Panel {
  double a, b;
  std::complex<double> value;
  double error;
  double l1;  // Kronrod estimate of int |f|
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel rule(const CFun& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::complex<double> fc = f(c);
  std::complex<double> kron = fc * kWgk[10], gauss = 0;
  double l1 = std::abs(fc) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    std::complex<double> fl = f(c - dx), fr = f(c + dx), s = fl + fr;
    kron += kWgk[j] * s;
    l1 += kWgk[j] * (std::abs(fl) + std::abs(fr));
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kron *= h;
  gauss *= h;
  // |K21 - G10| bounds the Gauss error, so it overestimates the Kronrod error.
  return {a, b, kron, std::abs(kron - gauss), std::abs(h) * l1};
}

}  // namespace

QuadResult gauss_kronrod(const CFun& f, std::vector<double> breaks, const QuadConfig& cfg) {
  QuadResult res;
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.size() < 2) {
    res.converged = true;
    return res;
  }
  std::priority_queue<Panel> heap;
  std::complex<double> total = 0;
  double err = 0, l1 = 0;
  // Cancellation in f limits what any refinement can resolve.
  auto target = [&] {
    return std::max({cfg.abs_tol, cfg.rel_tol * std::abs(total), 50 * std::numeric_limits<double>::epsilon() * l1});
  };
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel p = rule(f, breaks[i], breaks[i + 1]);
    res.evaluations += 21;
    total += p.value;
    err += p.error;
    l1 += p.l1;
    heap.push(p);
  }
  while (err > target()) {
    if (static_cast<int>(heap.size()) >= cfg.max_intervals) break;
    Panel p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;  // panel at machine resolution
    heap.pop();
    Panel l = rule(f, p.a, mid), r = rule(f, mid, p.b);
    res.evaluations += 42;
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    l1 += l.l1 + r.l1 - p.l1;
    heap.push(l);
    heap.push(r);
  }
  // Recompute the sums to shed accumulated rounding from the incremental updates.
  total = 0;
  err = 0;
  l1 = 0;
  res.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  res.value = total;
  res.error = err;
  res.converged = err <= target() && std::isfinite(std::abs(total));
  return res;
}

std::complex<double> integrate_checked(const CFun& f, std::vector<double> breaks, const QuadConfig& cfg,
                                       const std::string& what, double* error) {
  QuadResult r = gauss_kronrod(f, std::move(breaks), cfg);
  if (!r.converged) {
    std::ostringstream os;
    os << what << ": error estimate " << r.error << " after " << r.intervals << " panels";
    throw Error(ErrorKind::QuadratureNoConvergence, os.str());
  }
  if (error) *error = r.error;
  return r.value;
}

}  // namespace hypobv
