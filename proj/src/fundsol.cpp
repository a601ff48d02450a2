#include "hypobv/fundsol.hpp"

#include "hypobv/errors.hpp"
#include "hypobv/indices.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hypobv {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

cd i_pow(int k) {
  static const cd cyc[4] = {1.0, I, -1.0, -I};
  return cyc[((k % 4) + 4) % 4];
}

// 0 and +-2^j up to lim, so every panel sees features at its own scale.
std::vector<double> geometric_breaks(double lim, double first = 0.0625) {
  std::vector<double> b{-lim, 0.0, lim};
  for (double s = first; s < lim; s *= 2) {
    b.push_back(s);
    b.push_back(-s);
  }
  return b;
}

}  // namespace

FundamentalSolution1D::FundamentalSolution1D(const OperatorProfile& prof, const FundSolConfig& cfg)
    : prof_(prof), cfg_(cfg), A_(cfg.A.value_or(2.0)) {
  if (prof.d != 1) throw Error(ErrorKind::DimensionMismatch, "fundamental solution is implemented for d = 1 only");
  if (prof.m < 1) throw Error(ErrorKind::OrderTooSmall, "P must contain t");
  if (!(A_ > 0)) throw Error(ErrorKind::AdmissibilityFailure, "contour shift A must be positive");
  // roots must stay off the contour for large |xi|, or the xi integral never settles
  for (double xi : {-1e3, -1e2, 1e2, 1e3})
    for (cd z : t_roots(prof_, {xi}))
      if (std::abs(z.imag() + A_) < 0.5) {
        std::ostringstream os;
        os << "root " << z << " of P(" << xi << ", .) lies within 0.5 of Im tau = -" << A_;
        throw Error(ErrorKind::AdmissibilityFailure, os.str());
      }
  cross_ = crossings(1e3);
}

FundamentalSolution1D::Residues FundamentalSolution1D::residues(double xi) const {
  Residues r;
  r.tau = t_roots(prof_, {xi});
  const int m = static_cast<int>(r.tau.size());
  for (cd z : r.tau) r.side.push_back(z.imag() > -A_ ? 1 : -1);
  // group near-coincident roots on the same side; their residues are summed by a contour integral
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      if (r.side[a] == r.side[b] && std::abs(r.tau[a] - r.tau[b]) < 1e-3 * std::max(1.0, std::abs(r.tau[a])))
        parent[find(a)] = find(b);
  std::vector<std::vector<int>> groups(m);
  for (int a = 0; a < m; ++a) groups[find(a)].push_back(a);
  for (auto& g : groups)
    if (!g.empty()) r.clusters.push_back(g);
  r.w.assign(m, 0.0);
  for (const auto& g : r.clusters)
    if (g.size() == 1) {
      cd dp = 1.0;
      for (int s = 0; s < m; ++s)
        if (s != g[0]) dp *= r.tau[g[0]] - r.tau[s];
      r.w[g[0]] = 1.0 / dp;
    }
  return r;
}

cd FundamentalSolution1D::ehat_from(const Residues& r, double t) const {
  const int want = t > 0 ? 1 : -1;
  const int m = static_cast<int>(r.tau.size());
  cd s = 0;
  for (const auto& g : r.clusters) {
    if (r.side[g[0]] != want) continue;
    if (g.size() == 1) {
      s += r.w[g[0]] * std::exp(I * t * r.tau[g[0]]);
      continue;
    }
    cd c = 0;
    for (int a : g) c += r.tau[a];
    c /= static_cast<double>(g.size());
    double diam = 0, gap = std::numeric_limits<double>::infinity();
    for (int a : g) diam = std::max(diam, std::abs(r.tau[a] - c));
    for (int b = 0; b < m; ++b)
      if (std::find(g.begin(), g.end(), b) == g.end()) gap = std::min(gap, std::abs(r.tau[b] - c));
    double rho = std::min(std::max(4 * diam, 1e-4 * std::max(1.0, std::abs(c))), 0.5 * gap);
    const int N = 64;
    cd acc = 0;
    for (int k = 0; k < N; ++k) {
      cd u = std::polar(1.0, 2 * kPi * k / N), z = c + rho * u;
      cd P = 1.0;
      for (int b = 0; b < m; ++b) P *= z - r.tau[b];
      acc += std::exp(I * t * z) * rho * u / P;
    }
    s += acc / static_cast<double>(N);
  }
  // t > 0: close upwards, i sum Res; t < 0: close downwards, -i sum Res
  return (want > 0 ? I : -I) * s / prof_.scale.to_complex();
}

cd FundamentalSolution1D::Ehat(double xi, double t) const { return ehat_from(residues(xi), t); }

std::vector<double> FundamentalSolution1D::crossings(double lim) const {
  auto above = [&](double xi) {
    int n = 0;
    for (cd z : t_roots(prof_, {xi})) n += z.imag() > -A_;
    return n;
  };
  std::vector<double> out;
  const int G = std::max(4000, static_cast<int>(20 * lim));
  double x0 = -lim;
  int n0 = above(x0);
  for (int i = 1; i <= G; ++i) {
    double x1 = -lim + 2 * lim * i / G;
    int n1 = above(x1);
    if (n1 != n0) {
      double a = x0, b = x1;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (a + b);
        (above(mid) == n0 ? a : b) = mid;
      }
      out.push_back(0.5 * (a + b));
    }
    x0 = x1;
    n0 = n1;
  }
  return out;
}

cd FundamentalSolution1D::operator()(double x, double t) const {
  if (t == 0) throw Error(ErrorKind::SchemaError, "E is evaluated off t = 0");
  QuadConfig q = cfg_.quad;
  q.abs_tol = 1e-11;
  // the Gaussian mollifier perturbs the value by O(eps^2); extrapolate that away
  const double eps0 = std::min(1.0, std::abs(t));
  cd prev = 0, prev_ex = 0;
  for (int k = 0; k <= 20; ++k) {
    const double eps = eps0 * std::ldexp(1.0, -k), lim = 6.5 / eps;
    auto br = geometric_breaks(lim);
    for (double c : cross_)
      if (std::abs(c) < lim) br.push_back(c);
    cd v;
    try {
      v = integrate_checked(
              [&](double xi) {
                double mol = std::exp(-(eps * xi) * (eps * xi));
                return std::exp(I * x * xi) * Ehat(xi, t) * mol;
              },
              br, q, "E(x, t)") /
          (2 * kPi);
    } catch (const Error& e) {
      throw Error(ErrorKind::OscillatoryQuadratureFailure, e.what());
    }
    if (k > 0) {
      cd ex = (4.0 * v - prev) / 3.0;
      if (k > 1 && std::abs(ex - prev_ex) <= cfg_.point_tol * (1 + std::abs(ex))) return ex;
      prev_ex = ex;
    }
    prev = v;
  }
  std::ostringstream os;
  os << "mollified values at (" << x << ", " << t << ") did not settle";
  throw Error(ErrorKind::OscillatoryQuadratureFailure, os.str());
}

DeltaCheck FundamentalSolution1D::check_delta(const SymFun& phi, const TimeFactor& chi) const {
  if (phi.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "test function must be one-dimensional in x");
  if (chi.kind == TimeFactor::one) throw Error(ErrorKind::SchemaError, "time factor must decay");
  const int m = prof_.m;
  const cd c = prof_.scale.to_complex();
  DeltaCheck out;
  out.expected = NumSymFun::from(phi)(0.0) * chi.jet(0.0, 0)[0];
  if (phi.is_zero()) return out;

  // P^(D)(phi chi) = c sum_k Q_k(-D_x) phi . i^k chi^{(k)}
  std::vector<NumSymFun> psi;
  double R = 0, a_max = 0;
  int deg = 0;
  for (int k = 0; k <= m; ++k) {
    psi.push_back(NumSymFun::from(apply_operator(reflect(prof_.Q[k]), phi)));
    if (!psi.back().empty()) R = std::max(R, psi.back().envelope_radius());
  }
  for (const auto& [key, p] : phi.parts()) {
    a_max = std::max(a_max, key.width.get_d());
    deg = std::max(deg, p.total_degree());
  }
  deg += std::max(0, prof_.P.total_degree());
  const double Xi = cfg_.xi_max > 0 ? cfg_.xi_max : std::sqrt(4 * a_max * (45.0 + 2 * deg));

  // t window: the Gaussian has to beat exp(A |t|) from roots between the contour and the real axis
  std::vector<double> tb;
  if (chi.kind == TimeFactor::gaussian) {
    const double b = chi.width;
    const double T = std::abs(chi.center) + (A_ + std::sqrt(A_ * A_ + 160 * b)) / (2 * b);
    tb = {-T, 0.0, T};
  } else {
    tb = {-chi.cut.r2, -chi.cut.r1, 0.0, chi.cut.r1, chi.cut.r2};
  }

  QuadConfig inner = cfg_.quad;
  inner.abs_tol = 1e-13;
  inner.rel_tol = 1e-12;
  std::vector<double> xb{-R, 0.0, R};
  std::vector<double> xib{-Xi, 0.0, Xi};
  for (double v : crossings(Xi)) xib.push_back(v);

  auto integrand = [&](double xi) {
    Residues r = residues(xi);
    cd s = 0;
    for (int k = 0; k <= m; ++k) {
      if (psi[k].empty()) continue;
      cd F = integrate_checked([&](double x) { return std::exp(I * x * xi) * psi[k](x); }, xb, inner, "delta check (x)");
      cd G = integrate_checked([&](double t) { return ehat_from(r, t) * chi.jet(t, k)[k]; }, tb, inner,
                               "delta check (t)");
      s += F * G * i_pow(k);
    }
    return c * s / (2 * kPi);
  };
  double err = 0;
  try {
    out.pairing = integrate_checked(integrand, xib, cfg_.quad, "delta check (xi)", &err);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::QuadratureNoConvergence) throw Error(ErrorKind::OscillatoryQuadratureFailure, e.what());
    throw;
  }
  out.quad_error = err;
  out.abs_err = std::abs(out.pairing - out.expected);
  return out;
}

RegularityFit FundamentalSolution1D::regularity(int k_max, double x_radius, int x_points) const {
  RegularityFit fit;
  for (int k = 0; k <= k_max; ++k) {
    const double t = std::ldexp(1.0, -k);
    double s = 0;
    for (int i = 0; i < x_points; ++i) {
      double x = x_points == 1 ? 0.0 : -x_radius + 2 * x_radius * i / (x_points - 1);
      s = std::max({s, std::abs((*this)(x, t)), std::abs((*this)(x, -t))});
    }
    fit.t.push_back(t);
    fit.sup.push_back(s);
  }
  const size_t n = fit.t.size();
  if (n >= 3 && fit.sup[n - 1] > 0 && fit.sup[n - 3] > 0) {
    double slope = std::log(fit.sup[n - 1] / fit.sup[n - 3]) / std::log(fit.t[n - 1] / fit.t[n - 3]);
    fit.S = std::max(0.0, -slope);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (size_t i = 0; i < n; ++i) {
    double v = fit.sup[i] * std::pow(fit.t[i], fit.S);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  fit.bounded = hi > 0 && hi <= 10 * lo;
  return fit;
}

}  // namespace hypobv
