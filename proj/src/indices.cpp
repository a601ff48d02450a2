#include "hypobv/indices.hpp"

#include "hypobv/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace hypobv {

namespace {

double radical_inverse(unsigned long i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (i > 0) {
    r += f * (i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

std::vector<std::complex<double>> to_cpoint(const std::vector<double>& x) {
  return std::vector<std::complex<double>>(x.begin(), x.end());
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// Rescale xi anisotropically so that the dominant coordinate becomes +-1.
std::vector<double> normalize_anisotropic(std::vector<double> xi, const std::vector<int>& n) {
  double best = -1;
  for (size_t j = 0; j < xi.size(); ++j) best = std::max(best, std::pow(std::abs(xi[j]), n[j]));
  if (best <= 0) return xi;
  const double lambda = 1.0 / best;
  for (size_t j = 0; j < xi.size(); ++j) xi[j] *= std::pow(lambda, 1.0 / n[j]);
  return xi;
}

// Try small-denominator rational points near xi for an exact zero of p.
std::optional<std::vector<double>> exact_zero_near(const MultiPoly& p, const std::vector<double>& xi) {
  for (int q = 1; q <= 64; ++q) {
    std::vector<CRational> pt;
    std::vector<double> out;
    for (double v : xi) {
      long num = std::lround(v * q);
      pt.emplace_back(Rational(num, q));
      out.push_back(static_cast<double>(num) / q);
    }
    bool all_zero = std::all_of(out.begin(), out.end(), [](double v) { return v == 0.0; });
    if (all_zero) continue;
    for (auto& c : pt) c.re.canonicalize();
    if (poly_eval(p, pt).is_zero()) return out;
  }
  return std::nullopt;
}

}  // namespace

const char* semi_elliptic_name(SemiElliptic s) {
  switch (s) {
    case SemiElliptic::yes: return "yes";
    case SemiElliptic::no: return "no";
    case SemiElliptic::inconclusive: return "inconclusive";
  }
  return "?";
}

Rational b0_exact(const OperatorProfile& prof) {
  Rational best(0);
  for (int k = 0; k < prof.m; ++k) {
    if (prof.Q[k].is_zero()) continue;
    Rational r = make_rational(prof.Q[k].total_degree(), prof.m - k);
    if (r > best) best = r;
  }
  return best;
}

IndexReport semi_elliptic_analyze(const OperatorProfile& prof, const SemiEllipticConfig& cfg) {
  const int d = prof.d, D = d + 1;
  IndexReport rep;
  rep.b0 = b0_exact(prof);
  rep.degQ_bounded = prof.degQ_bounded;
  rep.seed = cfg.seed;
  rep.principal = MultiPoly(D);
  for (int j = 0; j < D; ++j) rep.n.push_back(std::max(0, prof.P.degree_in(j)));

  for (int j = 0; j < D; ++j)
    if (rep.n[j] == 0) {
      rep.semi_elliptic = SemiElliptic::no;
      rep.witness.assign(D, 0.0);
      rep.witness[j] = 1.0;
      rep.note = "P does not depend on variable " + std::to_string(j + 1);
      return rep;
    }

  for (const auto& [e, c] : prof.P.terms()) {
    Rational w(0);
    for (int j = 0; j < D; ++j) w += make_rational(e[j], rep.n[j]);
    if (w == 1) rep.principal.add_term(e, c);
    if (w > 1) {
      rep.semi_elliptic = SemiElliptic::no;
      rep.note = "term of anisotropic weight above 1";
      return rep;
    }
  }

  // Sample the anisotropic unit sphere sum |xi_j|^{n_j} = 1.
  double scale = 0;
  for (const auto& [e, c] : rep.principal.terms()) scale = std::max(scale, std::abs(c.to_complex()));
  rep.threshold = cfg.rel_threshold * scale;
  auto project = [&](std::vector<double> y) {
    double s = 0;
    for (int j = 0; j < D; ++j) s += std::pow(std::abs(y[j]), rep.n[j]);
    if (s <= 0) return y;
    for (int j = 0; j < D; ++j) y[j] *= std::pow(1.0 / s, 1.0 / rep.n[j]);
    return y;
  };
  auto value = [&](const std::vector<double>& xi) { return std::abs(poly_eval(rep.principal, to_cpoint(xi))); };

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> arg(D, 0.0), y(D);
  int used = 0;
  for (int i = 0; i < cfg.points; ++i) {
    unsigned long idx = static_cast<unsigned long>(cfg.seed) + i;
    bool zero = true;
    for (int j = 0; j < D; ++j) {
      y[j] = 2.0 * radical_inverse(idx, kPrimes[j % 12]) - 1.0;
      if (y[j] != 0.0) zero = false;
    }
    if (zero) continue;
    ++used;
    auto xi = project(y);
    double v = value(xi);
    if (v < best) {
      best = v;
      arg = xi;
    }
  }
  rep.grid_points = used;

  // Polish the sampled minimum with a pattern search before judging it.
  std::vector<double> cur = arg;
  double fcur = value(cur);
  for (double step = 1e-2; step > 1e-13; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int j = 0; j < D; ++j)
        for (double sgn : {1.0, -1.0}) {
          auto trial = cur;
          trial[j] += sgn * step;
          trial = project(trial);
          double ft = value(trial);
          if (ft < fcur) {
            fcur = ft;
            cur = trial;
            improved = true;
          }
        }
    }
  }
  rep.principal_min = std::min(best, fcur);

  if (rep.principal_min <= rep.threshold || scale == 0) {
    if (auto z = exact_zero_near(rep.principal, normalize_anisotropic(cur, rep.n))) {
      rep.semi_elliptic = SemiElliptic::no;
      rep.witness = *z;
      rep.note = "exact real zero of the principal part";
    } else {
      rep.semi_elliptic = SemiElliptic::inconclusive;
      rep.witness = cur;
      rep.note = "principal part nearly vanishes; no exact zero certificate";
    }
    return rep;
  }

  rep.semi_elliptic = SemiElliptic::yes;
  const int m = prof.m;
  const int degP = prof.P.total_degree();
  int nmin = rep.n[0], nmax = rep.n[0];
  for (int j = 0; j < d; ++j) {
    nmin = std::min(nmin, rep.n[j]);
    nmax = std::max(nmax, rep.n[j]);
  }
  int nall_max = std::max(nmax, m);
  if (degP != nall_max) rep.note = "deg P differs from the largest partial degree";
  auto q = [](int a, int b) { return make_rational(a, b); };
  rep.a0 = q(nmin, m);
  rep.gamma0 = q(nmin, degP);
  rep.mu0 = q(m, degP);
  if (q(nmax, m) != rep.b0) rep.note += (rep.note.empty() ? "" : "; ") + std::string("b0 from degrees differs from the Q_k formula");
  bool all_equal = nmin == nmax && nmax == m;
  if (all_equal)
    rep.case_tag = "elliptic";
  else if (m < degP)
    rep.case_tag = "parabolic_like";
  else
    rep.case_tag = "case_iii";
  return rep;
}

std::vector<std::complex<double>> t_roots(const OperatorProfile& prof, const std::vector<double>& x) {
  const int m = prof.m;
  if (m < 1) throw Error(ErrorKind::OrderTooSmall, "root margin needs m >= 1");
  if (static_cast<int>(x.size()) != prof.d) throw Error(ErrorKind::DimensionMismatch, "root margin point");
  auto pt = to_cpoint(x);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 1; i < m; ++i) C(i, i - 1) = 1.0;
  for (int k = 0; k < m; ++k) C(k, m - 1) = -poly_eval(prof.Q[k], pt);
  if (!C.allFinite()) throw Error(ErrorKind::RootSolverFailed, "non-finite companion matrix");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::RootSolverFailed, "eigenvalue iteration failed");
  std::vector<std::complex<double>> roots(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

RootMargin root_margin(const OperatorProfile& prof, const std::vector<double>& x) {
  RootMargin rm;
  rm.x = x;
  rm.roots = t_roots(prof, x);
  rm.value = std::numeric_limits<double>::infinity();
  for (auto z : rm.roots) rm.value = std::min(rm.value, std::abs(z.imag()));
  return rm;
}

A0Trace a0_trace(const OperatorProfile& prof, double a, const A0ProbeConfig& cfg) {
  const int d = prof.d, m = prof.m;
  std::vector<std::vector<double>> rays;
  for (int j = 0; j < d; ++j)
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(d, 0.0);
      e[j] = s;
      rays.push_back(e);
    }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;
  for (int r = 0; r < cfg.random_rays; ++r) {
    std::vector<double> e(d);
    double norm = 0;
    for (auto& v : e) {
      v = nd(rng);
      norm += v * v;
    }
    for (auto& v : e) v /= std::sqrt(norm);
    rays.push_back(e);
  }

  std::vector<MultiPoly> dtP;
  for (int l = 0; l <= m; ++l) {
    MultiIndex ord(d + 1, 0);
    ord[d] = l;
    dtP.push_back(poly_derivative(prof.P, ord));
  }
  double b0 = b0_exact(prof).get_d();
  if (b0 <= 0) b0 = 1;

  A0Trace tr;
  for (int i = 0; i < cfg.radii; ++i) {
    double r = cfg.R_min * std::pow(cfg.R_max / cfg.R_min, cfg.radii > 1 ? double(i) / (cfg.radii - 1) : 0.0);
    double ci = 0, cii = 0;
    for (const auto& ray : rays) {
      std::vector<double> x(d);
      for (int j = 0; j < d; ++j) x[j] = r * ray[j];
      RootMargin rm = root_margin(prof, x);
      if (rm.value > 0) cii = std::max(cii, std::pow(r, a) / rm.value);
      else cii = std::numeric_limits<double>::infinity();
      std::vector<double> ts = {0.0};
      for (auto z : rm.roots) ts.push_back(z.real());
      for (double s = -3; s <= 3.0001; s += 0.5)
        for (double sg : {1.0, -1.0}) ts.push_back(sg * std::pow(r, b0) * std::pow(10.0, s));
      auto pt = to_cpoint(x);
      pt.push_back(0.0);
      for (double t : ts) {
        pt[d] = t;
        double p0 = std::abs(poly_eval(dtP[0], pt));
        if (p0 == 0) continue;
        for (int l = 1; l <= m; ++l) ci = std::max(ci, std::pow(r, a * l) * std::abs(poly_eval(dtP[l], pt)) / p0);
      }
    }
    tr.radius.push_back(r);
    tr.C_i.push_back(ci);
    tr.C_ii.push_back(cii);
  }
  std::vector<double> lx, ly;
  double run = 0, first = 0;
  for (size_t i = 0; i < tr.radius.size(); ++i) {
    double v = std::max(tr.C_i[i], tr.C_ii[i]);
    if (i == 0) first = v;
    run = std::max(run, v);
    if (i >= tr.radius.size() / 2) {
      lx.push_back(std::log(tr.radius[i]));
      ly.push_back(std::log(v));
    }
  }
  tr.C_fit = run;
  tr.slope = least_squares_slope(lx, ly);
  tr.growth = first > 0 ? run / first : std::numeric_limits<double>::infinity();
  tr.bounded = std::isfinite(run) && tr.growth <= 2.0 && tr.slope <= 0.02;
  return tr;
}

A0Probe verify_a0_numeric(const OperatorProfile& prof, double a, const A0ProbeConfig& cfg) {
  A0Probe pr;
  pr.a = a;
  pr.R = cfg.R_min;
  pr.at_a = a0_trace(prof, a, cfg);
  pr.perturbed = a0_trace(prof, a * (1 + cfg.eps), cfg);
  pr.maximal = pr.perturbed.slope > 0.5 * cfg.eps * a;
  pr.pass = pr.at_a.bounded && pr.maximal;
  return pr;
}

}  // namespace hypobv
