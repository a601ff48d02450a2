#include "hypobv/boundary.hpp"

#include "hypobv/errors.hpp"
#include "hypobv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hypobv {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

cd minus_i_pow(int k) {
  static const cd cyc[4] = {1.0, -I, -1.0, I};
  return cyc[((k % 4) + 4) % 4];
}

cd i_pow(int k) {
  static const cd cyc[4] = {1.0, I, -1.0, -I};
  return cyc[((k % 4) + 4) % 4];
}

Jet2 jet_pow(const Jet2& x, int e) {
  Jet2 r(x.order(), 1.0);
  for (int i = 0; i < e; ++i) r = r * x;
  return r;
}

// Kernels peak at x = 0 with widths t and sqrt(t); put breakpoints there.
std::vector<double> x_breaks(double R, double t) {
  std::vector<double> b{-R, 0.0, R};
  for (double w : {std::abs(t), std::sqrt(std::abs(t))})
    if (w > 0 && w < R) {
      b.push_back(-w);
      b.push_back(w);
    }
  return b;
}

}  // namespace

Jet2 Field::jet(double x, double t, int order) const {
  return jet_(Jet2::var_x(order, x), Jet2::var_t(order, t));
}

cd Field::apply(const MultiPoly& Q, double x, double t) const {
  if (Q.is_zero()) return 0.0;
  if (Q.nvars() != 2) throw Error(ErrorKind::DimensionMismatch, "field operators act on (x, t)");
  Jet2 j = jet(x, t, std::max(0, Q.total_degree()));
  cd s = 0;
  for (const auto& [e, c] : Q.terms()) s += c.to_complex() * minus_i_pow(e[0] + e[1]) * j.derivative(e[0], e[1]);
  return s;
}

Field polynomial_field(const MultiPoly& p) {
  if (p.nvars() != 2) throw Error(ErrorKind::DimensionMismatch, "polynomial field needs variables (x, t)");
  auto value = [p](double x, double t) { return poly_eval(p, std::vector<cd>{x, t}); };
  auto jet = [p](const Jet2& x, const Jet2& t) {
    Jet2 s(x.order(), 0.0);
    for (const auto& [e, c] : p.terms()) s += jet_pow(x, e[0]) * jet_pow(t, e[1]) * c.to_complex();
    return s;
  };
  return Field("polynomial " + to_string(p), value, jet);
}

Field derived_field(const Field& f, const MultiPoly& Q) {
  if (Q.nvars() != 2) throw Error(ErrorKind::DimensionMismatch, "field operators act on (x, t)");
  const int deg = std::max(0, Q.total_degree());
  auto value = [f, Q](double x, double t) { return f.apply(Q, x, t); };
  // Field::jet passes plain coordinate jets, so the base point and order can be read off them.
  auto jet = [f, Q, deg](const Jet2& x, const Jet2& t) {
    const int K = x.order();
    Jet2 base = f.jet(x.value().real(), t.value().real(), K + deg);
    Jet2 out(K, 0.0);
    for (const auto& [e, c] : Q.terms()) {
      const cd w = c.to_complex() * minus_i_pow(e[0] + e[1]);
      for (int a = 0; a <= K; ++a)
        for (int b = 0; a + b <= K; ++b) {
          double fa = 1, fb = 1;
          for (int i = 1; i <= e[0]; ++i) fa *= a + i;
          for (int i = 1; i <= e[1]; ++i) fb *= b + i;
          out.at(a, b) += w * base.at(a + e[0], b + e[1]) * (fa * fb);
        }
    }
    return out;
  };
  return Field("(" + to_string(Q) + ")(D) " + f.name(), value, jet);
}

const char* kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::heat_kernel: return "heat";
    case KernelKind::poisson_kernel: return "poisson";
    case KernelKind::cauchy_kernel: return "cauchy";
    case KernelKind::heat_gaussian: return "heat_gaussian";
  }
  return "?";
}

KernelKind kernel_from_name(const std::string& s) {
  for (auto k : {KernelKind::heat_kernel, KernelKind::poisson_kernel, KernelKind::cauchy_kernel, KernelKind::heat_gaussian})
    if (s == kernel_name(k)) return k;
  throw Error(ErrorKind::SchemaError, "unknown kernel '" + s + "'");
}

MultiPoly kernel_operator(KernelKind k) {
  switch (k) {
    case KernelKind::heat_kernel:
    case KernelKind::heat_gaussian: return parse_poly("t - i*x^2", {"x", "t"});
    case KernelKind::poisson_kernel: return parse_poly("x^2 + t^2", {"x", "t"});
    case KernelKind::cauchy_kernel: return parse_poly("t - i*x", {"x", "t"});
  }
  return {};
}

ZeroSolution make_kernel(KernelKind kind, const OperatorProfile& prof) {
  if (prof.d != 1 || decompose_t(kernel_operator(kind)).P != prof.P)
    throw Error(ErrorKind::KindProfileMismatch,
                std::string(kernel_name(kind)) + " kernel does not solve " + to_string(prof.P));
  const double pi = std::numbers::pi;
  Field f;
  switch (kind) {
    case KernelKind::heat_kernel:
      f = Field(
          "heat kernel",
          [pi](double x, double t) -> cd { return t > 0 ? std::exp(-x * x / (4 * t)) / std::sqrt(4 * pi * t) : 0.0; },
          [pi](const Jet2& x, const Jet2& t) {
            if (t.value().real() <= 0) return Jet2(x.order(), 0.0);
            return exp(-(x * x) / (4.0 * t)) * pow(4 * pi * t, -0.5);
          });
      break;
    case KernelKind::poisson_kernel:
      f = Field(
          "poisson kernel", [pi](double x, double t) -> cd { return t / (pi * (x * x + t * t)); },
          [pi](const Jet2& x, const Jet2& t) { return t / (pi * (x * x + t * t)); });
      break;
    case KernelKind::cauchy_kernel:
      f = Field(
          "cauchy kernel", [](double x, double t) { return 1.0 / cd(x, t); },
          [](const Jet2& x, const Jet2& t) { return 1.0 / (x + I * t); });
      break;
    case KernelKind::heat_gaussian:
      f = Field(
          "heat flow of exp(-x^2/8)",
          [](double x, double t) -> cd { return std::exp(-x * x / (8 + 4 * t)) / std::sqrt(1 + 0.5 * t); },
          [](const Jet2& x, const Jet2& t) {
            return exp(-(x * x) / (8.0 + 4.0 * t)) * pow(1.0 + 0.5 * t, -0.5);
          });
      break;
  }
  return {prof, kind, f};
}

ZeroSolution make_kernel(KernelKind kind) { return make_kernel(kind, decompose_t(kernel_operator(kind))); }

double zero_solution_residual(const Field& f, const OperatorProfile& prof, double x, double t) {
  const MultiPoly& P = prof.P;
  Jet2 j = f.jet(x, t, P.total_degree());
  cd s = 0;
  double scale = 0;
  for (const auto& [e, c] : P.terms()) {
    cd v = c.to_complex() * minus_i_pow(e[0] + e[1]) * j.derivative(e[0], e[1]);
    s += v;
    scale += std::abs(v);
  }
  return scale > 0 ? std::abs(s) / scale : 0.0;
}

double verify_zero_solution(const ZeroSolution& zs) {
  double worst = 0;
  for (int k = 1; k <= 6; ++k)
    for (double sg : {1.0, -1.0})
      for (int i = 0; i <= 16; ++i) {
        double x = -2.0 + 0.25 * i, t = sg * std::ldexp(1.0, -k);
        worst = std::max(worst, zero_solution_residual(zs.f, zs.profile, x, t));
      }
  return worst;
}

std::vector<double> TimeFactor::jet(double t, int k) const {
  std::vector<double> out(k + 1, 0.0);
  switch (kind) {
    case one:
      out[0] = 1;
      break;
    case bump:
      out = bump_jet(cut, t, k);
      break;
    case gaussian: {
      // d^j exp(-u^2) = (-1)^j H_j(u) exp(-u^2), u = sqrt(b) (t - c)
      const double sb = std::sqrt(width), u = sb * (t - center), g = std::exp(-u * u);
      double h0 = 1, h1 = 2 * u, f = 1;
      for (int j = 0; j <= k; ++j) {
        double hj = j == 0 ? h0 : h1;
        out[j] = f * hj * g;
        f *= -sb;
        if (j >= 1) {
          double h2 = 2 * u * h1 - 2 * j * h0;
          h0 = h1;
          h1 = h2;
        }
      }
      break;
    }
  }
  return out;
}

double TimeFactor::support_radius() const {
  switch (kind) {
    case one: return std::numeric_limits<double>::infinity();
    case bump: return cut.r2;
    case gaussian: return std::abs(center) + std::sqrt(40.0 / width);
  }
  return 0;
}

StokesResult stokes_check(const Field& f, const OperatorProfile& prof, const ProductTest& Phi, double a, double b,
                          const StokesConfig& cfg) {
  if (prof.d != 1 || Phi.phi.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "stokes_check works in one space dimension");
  if (!(a < b)) throw Error(ErrorKind::SchemaError, "stokes_check needs a < b");
  const int m = prof.m;
  StokesResult out;
  if (Phi.phi.is_zero()) return out;

  // P^(D) Phi = sum_k [Q_k(-D_x) phi] [(-D_t)^k chi], and (-D_t)^k = i^k d_t^k
  std::vector<NumSymFun> psi;
  double R = cfg.x_radius;
  for (int k = 0; k <= m; ++k) {
    psi.push_back(NumSymFun::from(apply_operator(reflect(prof.Q[k]), Phi.phi)));
    if (cfg.x_radius == 0 && !psi.back().empty()) R = std::max(R, psi.back().envelope_radius());
  }
  NumSymFun phin = NumSymFun::from(Phi.phi);
  if (cfg.x_radius == 0) R = std::max(R, phin.envelope_radius());

  QuadConfig inner = cfg.quad;
  inner.abs_tol = cfg.quad.abs_tol * 0.1 / std::max(1.0, b - a);
  double err = 0;

  auto lhs_t = [&](double t) {
    auto chi = Phi.chi.jet(t, m);
    return integrate_checked(
        [&](double x) {
          cd s = 0;
          for (int k = 0; k <= m; ++k)
            if (!psi[k].empty()) s += psi[k](x) * i_pow(k) * chi[k];
          return f(x, t) * s;
        },
        x_breaks(R, t), inner, "stokes lhs (x)");
  };
  out.lhs = integrate_checked(lhs_t, {a, b}, cfg.quad, "stokes lhs (t)", &err);
  out.quad_error += err;

  auto int_t = [&](double t) {
    double chi = Phi.chi.jet(t, 0)[0];
    if (chi == 0.0) return cd(0.0);
    return chi * integrate_checked([&](double x) { return f.apply(prof.P, x, t) * phin(x); }, x_breaks(R, t), inner,
                                   "stokes interior (x)");
  };
  out.interior = integrate_checked(int_t, {a, b}, cfg.quad, "stokes interior (t)", &err);
  out.quad_error += err;

  // i sum_j (-1)^j int [P_(j+1)(D) f . D_t^j Phi]_a^b dx, D_t^j Phi = phi (-i)^j chi^{(j)}
  auto trace_at = [&](double t) {
    auto chi = Phi.chi.jet(t, m - 1);
    cd s = 0;
    for (int j = 0; j < m; ++j) {
      if (chi[j] == 0.0) continue;
      double e = 0;
      cd v = integrate_checked([&](double x) { return f.apply(prof.Pfam[j], x, t) * phin(x); }, x_breaks(R, t), cfg.quad,
                               "stokes boundary", &e);
      out.quad_error += e;
      s += (j % 2 ? -1.0 : 1.0) * v * minus_i_pow(j) * chi[j];
    }
    return s;
  };
  out.boundary = I * (trace_at(b) - trace_at(a));
  out.rhs = out.interior + out.boundary;
  out.abs_diff = std::abs(out.lhs - out.rhs);
  return out;
}

const char* bv_method_name(BvMethod m) { return m == BvMethod::direct ? "direct" : "stokes"; }

namespace {

struct Extrapolated {
  cd value;
  double error;
  std::vector<double> orders;
};

// Repeated Richardson on a sequence sampled at t0 2^{-k}; each column's order is read off
// the ratio of its last two differences and rounded to a multiple of 1/2.
Extrapolated richardson(const std::vector<cd>& seq) {
  std::vector<cd> cur = seq;
  Extrapolated best{cur.back(), cur.size() >= 2 ? std::abs(cur.back() - cur[cur.size() - 2]) : 0.0, {}};
  std::vector<double> orders;
  while (cur.size() >= 3) {
    const size_t n = cur.size();
    cd d1 = cur[n - 2] - cur[n - 3], d2 = cur[n - 1] - cur[n - 2];
    if (std::abs(d2) == 0 || std::abs(d1) == 0) break;
    double p = std::round(2 * std::log2(std::abs(d1 / d2))) / 2;
    if (!(p >= 0.5 && p <= 12)) break;
    const double q = std::exp2(p) - 1;
    std::vector<cd> next(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) next[i] = cur[i + 1] + (cur[i + 1] - cur[i]) / q;
    orders.push_back(p);
    cur = std::move(next);
    double e = std::abs(cur.back() - cur[cur.size() - 2]);
    if (e < best.error) best = {cur.back(), e, orders};
  }
  return best;
}

}  // namespace

PairingResult bv_direct(const Field& f, const SymFun& phi, const BvSchedule& sched) {
  if (phi.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "bv_direct works in one space dimension");
  if (sched.steps < 3) throw Error(ErrorKind::SchemaError, "bv_direct needs at least 3 steps");
  PairingResult res;
  res.method = BvMethod::direct;
  const int K = sched.steps;
  if (phi.is_zero()) {
    for (int k = 0; k <= K; ++k) res.trail.push_back({k, sched.t0 * std::ldexp(1.0, -k), sched.t0 * std::ldexp(1.0, -k), 0.0});
    return res;
  }
  NumSymFun phin = NumSymFun::from(phi);
  const double R = phin.envelope_radius();

  // upper and lower traces separately, so that the staggered schedule reuses them
  std::vector<cd> up(K + 2), lo(K + 2);
  parallel_for(static_cast<size_t>(2 * (K + 2)), sched.threads, [&](size_t idx) {
    const int k = static_cast<int>(idx / 2);
    const double t = sched.t0 * std::ldexp(1.0, -k), sgn = idx % 2 ? -1.0 : 1.0;
    cd v = integrate_checked([&](double x) { return f(x, sgn * t) * phin(x); }, x_breaks(R, t), sched.quad,
                             "bv_direct pairing");
    (idx % 2 ? lo : up)[k] = v;
  });

  std::vector<cd> seq(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double t = sched.t0 * std::ldexp(1.0, -k);
    seq[k] = up[k] - lo[k];
    res.trail.push_back({k, t, t, seq[k]});
  }
  Extrapolated ex = richardson(seq);
  res.value = ex.value;
  res.error = ex.error;
  res.orders = ex.orders;

  // the raw trail must be Cauchy: last three differences shrink by at least 1.5 each
  const double floor = 1e-10 * (1 + std::abs(res.value));
  double d0 = std::abs(seq[K - 2] - seq[K - 3]), d1 = std::abs(seq[K - 1] - seq[K - 2]),
         d2 = std::abs(seq[K] - seq[K - 1]);
  bool cauchy = (d1 <= d0 / 1.5 || d1 < floor) && (d2 <= d1 / 1.5 || d2 < floor);
  if (!cauchy) {
    std::ostringstream os;
    os << "trail differences " << d0 << ", " << d1 << ", " << d2 << " do not decay";
    throw Error(ErrorKind::NoConvergence, os.str());
  }

  if (sched.staggered_probe) {
    std::vector<cd> st(K + 1);
    for (int k = 0; k <= K; ++k) st[k] = up[k] - lo[k + 1];
    Extrapolated es = richardson(st);
    res.staggered = es.value;
    const double gap = std::abs(es.value - res.value);
    const double tol = std::max(1e-6 * (1 + std::abs(res.value)), 10 * (es.error + res.error));
    if (gap > tol) {
      std::ostringstream os;
      os << "staggered schedule disagrees by " << gap;
      throw Error(ErrorKind::NoConvergence, os.str());
    }
  }
  return res;
}

PairingResult bv_stokes(const Field& f, const OperatorProfile& prof, const SymFun& phi, int j,
                        const StokesBvConfig& cfg) {
  if (prof.d != 1 || phi.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "bv_stokes works in one space dimension");
  const int m = prof.m;
  if (j < 0 || j >= m) throw Error(ErrorKind::SchemaError, "slot j out of range");
  PairingResult res;
  res.method = BvMethod::stokes;
  if (phi.is_zero()) return res;

  OperatorProfile check = decompose_t(reflect(prof.P));  // P^ = scale * check.P
  const cd scale = check.scale.to_complex();
  std::vector<SymFun> data(m, SymFun(1));
  data[j] = phi;
  ExtensionConfig ec;
  ec.mode = ExtMode::finite_order;
  ec.order = cfg.order;
  ec.bump = cfg.cut;
  ExtensionBuild ext(check, data, ec);
  const double R = ext.envelope_radius();

  // f must not outgrow the t^N decay of P^(D) Phi at s = 0
  auto sup_abs = [&](double s) {
    double v = 0;
    for (int i = 0; i <= 400; ++i) {
      double x = -R + 2 * R * i / 400.0;
      v = std::max({v, std::abs(f(x, s)), std::abs(f(x, -s))});
    }
    return std::max({v, std::abs(f(0.0, s)), std::abs(f(0.0, -s))});
  };
  const double s1 = std::ldexp(1.0, -12), s2 = std::ldexp(1.0, -14);
  const double g1 = sup_abs(s1), g2 = sup_abs(s2);
  if (g1 > 0 && g2 > 0) {
    double growth = std::log(g2 / g1) / std::log(s1 / s2);
    if (growth + 0.5 > cfg.order) {
      std::ostringstream os;
      os << "f grows like |t|^-" << growth << " but the extension residual is only O(|t|^" << cfg.order << ")";
      throw Error(ErrorKind::ResidualTooLarge, os.str());
    }
  }

  double err = 0;
  auto inner = [&](double s) {
    return integrate_checked([&](double x) { return f(x, s) * ext.residual(x, s); }, x_breaks(R, s), cfg.inner,
                             "bv_stokes (x)");
  };
  const double r1 = cfg.cut.r1, r2 = cfg.cut.r2;
  cd total = integrate_checked(inner, {-r2, -r1, 0.0, r1, r2}, cfg.outer, "bv_stokes (s)", &err);
  res.value = (j % 2 ? -1.0 : 1.0) * I * scale * total;
  res.error = err;
  return res;
}

std::vector<cd> bv_t_derivatives(const OperatorProfile& prof, const SymFun& phi, const PairingFn& pairing) {
  const int m = prof.m;
  // D_t^l = P_(m-l)(D) - sum_{k<l} Q_{k+m-l}(D_x) D_t^k; moving Q(D_x) onto phi gives Q(-D_x) phi
  std::function<cd(int, const SymFun&)> T = [&](int l, const SymFun& psi) -> cd {
    cd v = pairing(m - l - 1, psi);
    for (int k = 0; k < l; ++k) {
      const MultiPoly& Q = prof.Q[k + m - l];
      if (Q.is_zero()) continue;
      v -= T(k, apply_operator(reflect(Q), psi));
    }
    return v;
  };
  std::vector<cd> out;
  for (int l = 0; l < m; ++l) out.push_back(T(l, phi));
  return out;
}

GrowthFit growth_fit(const Field& f, const GrowthWindow& w, const WeightSeq* M, double b0) {
  GrowthFit g;
  for (int k = w.k_coarse; k <= w.k_fine; ++k) {
    const double t = std::ldexp(1.0, -k);
    double s = std::max(std::abs(f(0.0, t)), std::abs(f(0.0, -t)));
    for (int i = 0; i < w.x_points; ++i) {
      double x = -w.x_radius + 2 * w.x_radius * i / std::max(1, w.x_points - 1);
      s = std::max({s, std::abs(f(x, t)), std::abs(f(x, -t))});
    }
    g.t.push_back(t);
    g.sup.push_back(s);
  }
  const size_t n = g.t.size();

  std::vector<double> lx, ly;
  for (size_t i = 0; i < n; ++i)
    if (g.sup[i] > 0) {
      lx.push_back(std::log(g.t[i]));
      ly.push_back(std::log(g.sup[i]));
    }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size();
    my /= lx.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    g.slope = sxy / sxx;
    double ss = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      double r = ly[i] - (my + g.slope * (lx[i] - mx));
      ss += r * r;
    }
    g.fit_residual = std::sqrt(ss / lx.size());
  }

  auto nonincreasing = [&](const std::vector<double>& v) {
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1] * (1 + 1e-9)) return false;
    return true;
  };
  for (int N = 0; N <= 20 && g.N < 0; ++N) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = g.sup[i] * std::pow(g.t[i], N);
    if (nonincreasing(v)) g.N = N;
  }

  if (M) {
    WeightSeq Ms = transform(*M, b0, true);
    for (int e = 6; e >= -6 && !g.h_fit; --e) {
      const double h = std::ldexp(1.0, e);
      std::vector<double> v(n);
      bool finite = true;
      for (size_t i = 0; i < n; ++i) {
        double om = omega(Ms, 1.0 / (h * g.t[i])).value;
        finite = finite && std::isfinite(om);
        v[i] = g.sup[i] * std::exp(-om);
      }
      if (finite && nonincreasing(v)) g.h_fit = h;
    }
  }
  return g;
}

}  // namespace hypobv
