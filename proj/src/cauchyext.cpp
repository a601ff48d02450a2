#include "hypobv/cauchyext.hpp"

#include "hypobv/errors.hpp"
#include "hypobv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace hypobv {

namespace {

void require_table_args(const OperatorProfile& prof, int L_max) {
  if (prof.m < 1) throw Error(ErrorKind::OrderTooSmall, "Cauchy table needs m >= 1");
  if (L_max < prof.m) throw Error(ErrorKind::OrderTooSmall, "L_max must be at least m");
}

// C_p(phi) for p = 0..L through the same recursion, applied to a function.
std::vector<SymFun> cauchy_apply(const OperatorProfile& prof, const SymFun& phi, int L) {
  const int m = prof.m;
  std::vector<SymFun> out;
  for (int l = 0; l <= L; ++l) {
    if (l < m - 1) {
      out.emplace_back(phi.dim());
    } else if (l == m - 1) {
      out.push_back(phi);
    } else {
      SymFun acc(phi.dim());
      for (int k = 0; k < m; ++k) {
        int idx = k + l - m;
        if (idx < 0 || prof.Q[k].is_zero() || out[idx].is_zero()) continue;
        acc -= apply_operator(prof.Q[k], out[idx]);
      }
      out.push_back(std::move(acc));
    }
  }
  return out;
}

Rational inv_factorial(int p) { return Rational(1) / factorial(p); }

double log_factorial(int p) { return std::lgamma(p + 1.0); }

std::complex<double> it_pow(double t, int p) {
  // (i t)^p
  double mag = std::pow(t, p);
  switch (((p % 4) + 4) % 4) {
    case 0: return {mag, 0};
    case 1: return {0, mag};
    case 2: return {-mag, 0};
    default: return {0, -mag};
  }
}

std::complex<double> minus_i_pow(int b) {
  switch (b % 4) {
    case 0: return {1, 0};
    case 1: return {0, -1};
    case 2: return {-1, 0};
    default: return {0, 1};
  }
}

double binom(int n, int k) { return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)); }

// p! / (p - a)!
double falling(int p, int a) {
  double r = 1;
  for (int i = 0; i < a; ++i) r *= p - i;
  return r;
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

}  // namespace

CauchyTable cauchy_recursive(const OperatorProfile& prof, int L_max) {
  require_table_args(prof, L_max);
  const int m = prof.m, d = prof.d;
  CauchyTable t;
  t.profile = prof;
  t.provenance = CauchyProvenance::recursive;
  for (int l = 0; l <= L_max; ++l) {
    if (l < m - 1) {
      t.ops.emplace_back(d);
    } else if (l == m - 1) {
      t.ops.push_back(MultiPoly::constant(d, CRational(1)));
    } else {
      MultiPoly acc(d);
      for (int k = 0; k < m; ++k) {
        int idx = k + l - m;
        if (idx >= 0) acc -= prof.Q[k] * t.ops[idx];
      }
      t.ops.push_back(std::move(acc));
    }
  }
  return t;
}

CauchyTable cauchy_explicit(const OperatorProfile& prof, int L_max) {
  require_table_args(prof, L_max);
  const int m = prof.m, d = prof.d;
  CauchyTable t;
  t.profile = prof;
  t.provenance = CauchyProvenance::explicit_formula;
  t.ops.assign(L_max + 1, MultiPoly(d));

  // powers[k][e] = Q_{m-k}^e, k = 1..m
  std::vector<std::vector<MultiPoly>> powers(m + 1);
  auto power = [&](int k, int e) -> const MultiPoly& {
    auto& v = powers[k];
    if (v.empty()) v.push_back(MultiPoly::constant(d, CRational(1)));
    while (static_cast<int>(v.size()) <= e) v.push_back(v.back() * prof.Q[m - k]);
    return v[e];
  };

  for (int l = 0; m - 1 + l <= L_max; ++l) {
    MultiPoly acc(d);
    std::vector<int> beta(m + 1, 0);
    // enumerate beta_1..beta_m with sum k beta_k = l
    std::function<void(int, int)> rec = [&](int k, int rest) {
      if (k == 0) {
        if (rest != 0) return;
        int total = 0;
        Rational coef(1);
        MultiPoly prod = MultiPoly::constant(d, CRational(1));
        for (int i = 1; i <= m; ++i) {
          total += beta[i];
          coef /= factorial(beta[i]);
          if (beta[i]) prod = prod * power(i, beta[i]);
        }
        coef *= factorial(total);
        if (total % 2) coef = -coef;
        acc += prod * CRational(coef);
        return;
      }
      for (int b = 0; b * k <= rest; ++b) {
        beta[k] = b;
        rec(k - 1, rest - b * k);
      }
      beta[k] = 0;
    };
    rec(m, l);
    t.ops[m - 1 + l] = std::move(acc);
  }
  return t;
}

bool cauchy_identity_holds(const CauchyTable& table) {
  const auto& prof = table.profile;
  for (int l = 0; l + prof.m <= table.L_max(); ++l) {
    MultiPoly acc(prof.d);
    for (int k = 0; k <= prof.m; ++k) acc += prof.Q[k] * table.ops[k + l];
    if (!acc.is_zero()) return false;
  }
  return true;
}

SymFun trace_combination(const CauchyTable& table, const std::vector<SymFun>& phis, int n) {
  const auto& prof = table.profile;
  const int m = prof.m;
  if (static_cast<int>(phis.size()) != m) throw Error(ErrorKind::DimensionMismatch, "need m data functions");
  if (n + m - 1 > table.L_max()) throw Error(ErrorKind::OrderTooHigh, "Cauchy table too short");
  SymFun acc(prof.d);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k <= m - 1 - j; ++k) {
      MultiPoly op = prof.Q[j + k + 1] * table.ops[k + n];
      if (!op.is_zero()) acc += apply_operator(op, phis[j]);
    }
  return acc;
}

FormalSolution::FormalSolution(const CauchyTable& table, const SymFun& phi, int n) {
  if (n > table.L_max()) throw Error(ErrorKind::OrderTooHigh, "formal solution order exceeds the table");
  for (int p = 0; p <= n; ++p) {
    coeffs_.push_back(apply_operator(table.ops[p], phi));
    scaled_.push_back(NumSymFun::from(coeffs_.back() * CRational(inv_factorial(p))));
  }
}

std::complex<double> FormalSolution::operator()(const double* x, double t) const {
  std::complex<double> s = 0;
  for (int p = static_cast<int>(scaled_.size()) - 1; p >= 0; --p) {
    if (scaled_[p].empty()) continue;
    s += scaled_[p](x) * it_pow(t, p);
  }
  return s;
}

FormalSolution formal_solution(const CauchyTable& table, const SymFun& phi, int n) {
  return FormalSolution(table, phi, n);
}

const char* ext_mode_name(ExtMode m) {
  switch (m) {
    case ExtMode::plain: return "plain";
    case ExtMode::finite_order: return "finite_order";
    case ExtMode::gevrey: return "gevrey";
    case ExtMode::convergent: return "convergent";
  }
  return "?";
}

// ---------------------------------------------------------------------------

ExtensionBuild::ExtensionBuild(const OperatorProfile& prof, const std::vector<SymFun>& phis,
                               const ExtensionConfig& cfg)
    : prof_(prof), phis_(phis), cfg_(cfg), mode_(cfg.mode) {
  const int m = prof_.m;
  if (m < 1) throw Error(ErrorKind::OrderTooSmall, "extension needs m >= 1");
  if (static_cast<int>(phis_.size()) != m) throw Error(ErrorKind::DimensionMismatch, "need m data functions");
  for (const auto& f : phis_)
    if (f.dim() != prof_.d) throw Error(ErrorKind::DimensionMismatch, "data dimension");
  b0_ = [&] {
    Rational best(0);
    for (int k = 0; k < m; ++k)
      if (!prof_.Q[k].is_zero()) best = std::max(best, make_rational(prof_.Q[k].total_degree(), m - k));
    return best.get_d();
  }();

  if (mode_ == ExtMode::gevrey || mode_ == ExtMode::convergent) {
    if (!cfg_.M) throw Error(ErrorKind::ConditionViolation, "gevrey mode needs a weight sequence");
    if (!(b0_ > 0)) throw Error(ErrorKind::ConditionViolation, "b0 must be positive");
    ConditionReport rep = check_conditions(*cfg_.M, b0_);
    if (mode_ == ExtMode::gevrey) {
      if (rep.M4a.verdict != Verdict::holds_on_truncation)
        throw Error(ErrorKind::ConditionViolation, "(M.4)_b0 does not hold on the truncation");
      if (!rep.weight_sequence()) throw Error(ErrorKind::ConditionViolation, "M is not a weight sequence on the truncation");
      if (rep.dichotomy && rep.dichotomy->relation == Relation::asymp) mode_ = ExtMode::convergent;
    }
    H_ = rep.M2_H > 0 ? rep.M2_H : 1.0;

    // L1 = max_p (sup|C_p(phi_j)| / (|phi_j|_{M,h} h^{b0 p} M^{b0}_p))^{1/p}
    const int p_top = 12;
    L1_ = 0;
    for (const auto& phi : phis_) {
      if (phi.is_zero()) continue;
      double R = phi.envelope_radius();
      SeminormQuery q;
      q.M = &*cfg_.M;
      q.h = cfg_.h;
      q.box.assign(prof_.d, {-R, R});
      q.a_max = 8;
      q.grid = prof_.d == 1 ? 201 : 41;
      double norm = seminorm(phi, q).value;
      auto cp = cauchy_apply(prof_, phi, p_top);
      for (int p = 1; p <= p_top; ++p) {
        if (cp[p].is_zero()) continue;
        NumSymFun nf = NumSymFun::from(cp[p]);
        double Rp = nf.envelope_radius(), sup = 0;
        const int G = prof_.d == 1 ? 401 : 41;
        std::vector<double> x(prof_.d);
        std::vector<int> idx(prof_.d, 0);
        while (true) {
          for (int j = 0; j < prof_.d; ++j) x[j] = -Rp + 2 * Rp * idx[j] / (G - 1);
          sup = std::max(sup, std::abs(nf(x.data())));
          int j = prof_.d - 1;
          while (j >= 0 && idx[j] == G - 1) idx[j--] = 0;
          if (j < 0) break;
          ++idx[j];
        }
        double logv = std::log(sup) - std::log(norm) - b0_ * p * std::log(cfg_.h) - b0_ * cfg_.M->log_M(p);
        L1_ = std::max(L1_, std::exp(logv / p));
      }
    }
    if (L1_ == 0) L1_ = 1;
    // Small enough that the cutoff keeps many terms on the probed t range.
    A_ = cfg_.A ? *cfg_.A : 1.0 / (8 * L1_ * std::pow(H_, b0_));
    if (!(A_ > 0)) throw Error(ErrorKind::ConditionViolation, "cutoff amplitude must be positive");
  }

  if (mode_ == ExtMode::gevrey) {
    build_gevrey();
  } else {
    build_series();
  }
}

double ExtensionBuild::lambda(int p) const {
  if (mode_ == ExtMode::gevrey) return std::exp(log_lambda_.at(p));
  if (mode_ == ExtMode::convergent) return A_ * std::pow(cfg_.h, b0_);
  return 1.0;
}

double ExtensionBuild::inner_window() const {
  switch (mode_) {
    case ExtMode::plain: return std::numeric_limits<double>::infinity();
    case ExtMode::finite_order: return cfg_.bump.r1;
    case ExtMode::convergent: return cfg_.bump.r1 / lambda(0);
    case ExtMode::gevrey: return cfg_.bump.r1 / lambda(n_);
  }
  return 0;
}

bool ExtensionBuild::traces_exact() const {
  for (int j = 0; j < prof_.m; ++j)
    if (traces_[j] != phis_[j]) return false;
  return true;
}

void ExtensionBuild::build_series() {
  const int m = prof_.m;
  if (mode_ == ExtMode::plain) {
    n_ = cfg_.order;
  } else if (mode_ == ExtMode::finite_order) {
    if (cfg_.order < 1) throw Error(ErrorKind::OrderTooSmall, "finite_order needs N >= 1");
    n_ = cfg_.order + m - 1;
  } else {
    n_ = cfg_.order > 0 ? cfg_.order : 60;
  }
  if (n_ < m) throw Error(ErrorKind::OrderTooSmall, "series order below m");

  // Phi_q = sum_j sum_k Q_{j+k+1} C_{k+q}(phi_j), q <= n + m
  const int L = n_ + 2 * m;
  std::vector<std::vector<SymFun>> cphi;
  for (const auto& phi : phis_) cphi.push_back(cauchy_apply(prof_, phi, L));
  std::vector<SymFun> Phi;
  for (int q = 0; q <= n_ + m; ++q) {
    SymFun acc(prof_.d);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k <= m - 1 - j; ++k)
        if (!prof_.Q[j + k + 1].is_zero() && !cphi[j][k + q].is_zero())
          acc += apply_operator(prof_.Q[j + k + 1], cphi[j][k + q]);
    Phi.push_back(std::move(acc));
  }
  traces_.assign(Phi.begin(), Phi.begin() + m);

  radius_ = 0;
  auto keep = [&](const SymFun& f, int q) {
    NumSymFun nf = NumSymFun::from(f * CRational(inv_factorial(q)));
    radius_ = std::max(radius_, nf.envelope_radius());
    return nf;
  };
  for (int q = 0; q <= n_; ++q) phi_q_.push_back(keep(Phi[q], q));
  G_.assign(m + 1, {});
  for (int r = 1; r <= m; ++r)
    for (int q = 0; q <= n_; ++q)
      G_[r].push_back(prof_.Q[r].is_zero() ? NumSymFun(prof_.d) : keep(apply_operator(prof_.Q[r], Phi[q]), q));
  for (int q = std::max(0, n_ - m + 1); q <= n_; ++q) {
    SymFun rho(prof_.d);
    for (int r = 0; r <= m; ++r)
      if (q + r > n_ && !prof_.Q[r].is_zero()) rho -= apply_operator(prof_.Q[r], Phi[q + r]);
    rho_.push_back(keep(rho, q));
  }
}

void ExtensionBuild::build_gevrey() {
  const int m = prof_.m;
  const WeightSeq Mstar = transform(*cfg_.M, b0_, true);
  const double base = std::log(A_) + b0_ * std::log(cfg_.h);
  const double target = std::log(cfg_.bump.r2 / cfg_.t_min);
  n_ = -1;
  for (int p = 0; p + 1 <= Mstar.p_max(); ++p) {
    log_lambda_.push_back(base + Mstar.log_m(p + 1));
    if (log_lambda_.back() >= target) {
      n_ = p;
      break;
    }
  }
  if (n_ < 0) throw Error(ErrorKind::TruncationExceeded, "cutoff index beyond the weight truncation");

  const int L = n_ + m;
  std::vector<std::vector<SymFun>> cphi;
  for (const auto& phi : phis_) cphi.push_back(cauchy_apply(prof_, phi, L + m));
  traces_.clear();
  for (int q = 0; q < m; ++q) {
    SymFun acc(prof_.d);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k <= m - 1 - j; ++k)
        if (!prof_.Q[j + k + 1].is_zero()) acc += apply_operator(prof_.Q[j + k + 1], cphi[j][k + q]);
    traces_.push_back(std::move(acc));
  }

  radius_ = 0;
  for (int j = 0; j < m; ++j)
    for (int k = 0; k <= m - 1 - j; ++k) {
      const MultiPoly& Qjk = prof_.Q[j + k + 1];
      if (Qjk.is_zero() || phis_[j].is_zero()) continue;
      JK e{j, k, {}, {}};
      e.H.assign(m + 1, {});
      for (int p = 0; p <= L; ++p) {
        SymFun K = apply_operator(Qjk, cphi[j][p]);
        CRational w(inv_factorial(p));
        if (p <= n_) {
          e.K.push_back(NumSymFun::from(K * w));
          radius_ = std::max(radius_, e.K.back().envelope_radius());
        }
        for (int r = 0; r <= m; ++r) {
          if (prof_.Q[r].is_zero()) {
            e.H[r].emplace_back(prof_.d);
            continue;
          }
          e.H[r].push_back(NumSymFun::from(apply_operator(prof_.Q[r], K) * w));
          radius_ = std::max(radius_, e.H[r].back().envelope_radius());
        }
      }
      jk_.push_back(std::move(e));
    }
}

std::complex<double> ExtensionBuild::weight_derivative(int b, double t) const {
  if (mode_ == ExtMode::plain) return b == 0 ? 1.0 : 0.0;
  double lam = mode_ == ExtMode::convergent ? lambda(0) : 1.0;
  double v = bump(cfg_.bump, lam * t, b);
  if (v == 0.0) return 0.0;
  return minus_i_pow(b) * std::pow(lam, b) * v;
}

std::complex<double> ExtensionBuild::cutoff_derivative(int p, int b, double t) const {
  if (p > n_) return 0.0;
  double lam = std::exp(log_lambda_[p]);
  double v = bump(cfg_.bump, lam * t, b);
  if (v == 0.0) return 0.0;
  return minus_i_pow(b) * std::exp(b * log_lambda_[p]) * v;
}

std::complex<double> ExtensionBuild::value(const double* x, double t) const {
  if (mode_ != ExtMode::gevrey) {
    std::complex<double> w = weight_derivative(0, t);
    if (w == 0.0) return 0.0;
    std::complex<double> s = 0;
    for (int q = n_; q >= 0; --q) s += phi_q_[q](x) * it_pow(t, q);
    return w * s;
  }
  std::complex<double> s = 0;
  for (const auto& e : jk_)
    for (int p = 0; p <= n_; ++p) {
      std::complex<double> inner = 0;
      for (int a = 0; a <= std::min(e.k, p); ++a) {
        auto cd = cutoff_derivative(p, e.k - a, t);
        if (cd == 0.0) continue;
        inner += binom(e.k, a) * falling(p, a) * it_pow(t, p - a) * cd;
      }
      if (inner != 0.0) s += e.K[p](x) * inner;
    }
  return s;
}

std::complex<double> ExtensionBuild::residual(const double* x, double t) const {
  const int m = prof_.m;
  if (mode_ != ExtMode::gevrey) {
    std::complex<double> res = 0;
    std::complex<double> w = weight_derivative(0, t);
    if (w != 0.0) {
      const int q0 = std::max(0, n_ - m + 1);
      for (size_t i = 0; i < rho_.size(); ++i) res += w * rho_[i](x) * it_pow(t, q0 + static_cast<int>(i));
    }
    for (int r = 1; r <= m; ++r) {
      if (prof_.Q[r].is_zero()) continue;
      for (int a = 0; a < r; ++a) {
        auto dw = weight_derivative(r - a, t);
        if (dw == 0.0) continue;
        std::complex<double> s = 0;
        for (int q = a; q <= n_; ++q) s += G_[r][q](x) * falling(q, a) * it_pow(t, q - a);
        res += binom(r, a) * dw * s;
      }
    }
    return res;
  }

  // Cutoff values psi~_p(t), zero beyond the cutoff index.
  std::vector<double> psi(n_ + 2 * m + 2, 0.0);
  for (int p = 0; p <= n_; ++p) psi[p] = bump(cfg_.bump, std::exp(log_lambda_[p]) * t, 0);

  std::complex<double> res = 0;
  for (const auto& e : jk_) {
    // terms without derivatives on the cutoffs, grouped so that exact cancellation is explicit
    for (int q = 0; q + e.k <= n_; ++q) {
      std::complex<double> s = 0;
      for (int r = 0; r <= m; ++r) {
        int p = q + e.k + r;
        double diff = psi[p] - psi[q + e.k];
        if (diff == 0.0 || e.H[r][p].empty()) continue;
        s += e.H[r][p](x) * (falling(p, e.k + r) * diff);
      }
      if (s != 0.0) res += s * it_pow(t, q);
    }
    // terms with at least one derivative on psi(lambda_p t)
    for (int p = 0; p <= n_; ++p) {
      double lt = std::exp(log_lambda_[p]) * std::abs(t);
      if (lt <= cfg_.bump.r1 || lt >= cfg_.bump.r2) continue;
      for (int r = 0; r <= m; ++r) {
        if (e.H[r][p].empty()) continue;
        const int K = r + e.k;
        std::complex<double> inner = 0;
        for (int a = 0; a < K && a <= p; ++a)
          inner += binom(K, a) * falling(p, a) * it_pow(t, p - a) * cutoff_derivative(p, K - a, t);
        if (inner != 0.0) res += e.H[r][p](x) * inner;
      }
    }
  }
  return res;
}

double residual_sup(const ExtensionBuild& ext, double t, const ExtensionReportConfig& cfg) {
  const int d = ext.profile().d;
  const double R = cfg.x_radius > 0 ? cfg.x_radius : ext.envelope_radius();
  const int G = d == 1 ? cfg.x_points : std::max(11, std::min(cfg.x_points, 41));
  size_t total = 1;
  for (int j = 0; j < d; ++j) total *= G;
  std::vector<double> vals(total, 0.0);
  parallel_for(total, cfg.threads, [&](size_t i) {
    std::vector<double> x(d);
    size_t rem = i;
    for (int j = d - 1; j >= 0; --j) {
      x[j] = -R + 2 * R * static_cast<double>(rem % G) / (G - 1);
      rem /= G;
    }
    vals[i] = std::abs(ext.residual(x.data(), t));
  });
  return *std::max_element(vals.begin(), vals.end());
}

ExtensionReport verify_extension(const ExtensionBuild& ext, const ExtensionReportConfig& cfg) {
  ExtensionReport rep;
  rep.mode = ext.mode();
  rep.trace_exact = ext.traces_exact();
  rep.series_order = ext.series_order();
  rep.A = ext.A();
  rep.inner_window = ext.inner_window();
  for (int k = cfg.k_coarse; k <= cfg.k_fine; ++k) {
    double t = std::ldexp(1.0, -k);
    rep.t.push_back(t);
    rep.residual.push_back(residual_sup(ext, t, cfg));
  }
  std::vector<double> lx, ly;
  for (size_t i = cfg.discard; i < rep.t.size(); ++i)
    if (rep.residual[i] > 0) {
      lx.push_back(std::log(rep.t[i]));
      ly.push_back(std::log(rep.residual[i]));
    }
  rep.slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;

  if (ext.mode() == ExtMode::gevrey || ext.mode() == ExtMode::convergent) {
    const auto& ecfg = ext.config();
    const WeightSeq Mstar = transform(*ecfg.M, ext.b0(), true);
    const double hb = std::pow(ecfg.h, ext.b0());
    for (int k = cfg.L_low; k <= cfg.L_high; ++k) {
      double L = ext.A() * std::ldexp(1.0, k);
      std::vector<double> W;
      bool ok = true;
      try {
        for (size_t i = 0; i < rep.t.size(); ++i)
          W.push_back(rep.residual[i] * std::exp(omega(Mstar, 1.0 / (L * hb * rep.t[i])).value));
      } catch (const Error&) {
        ok = false;
      }
      // nonincreasing as t decreases, starting from the first nonzero point
      double prev = -1;
      for (size_t i = 0; ok && i < W.size(); ++i) {
        if (rep.residual[i] == 0) continue;
        if (prev >= 0 && W[i] > prev * (1 + 1e-9)) ok = false;
        prev = W[i];
      }
      rep.sweep.emplace_back(L, ok);
      if (ok && !rep.fitted_L) {
        rep.fitted_L = L;
        rep.weighted = W;
      }
    }
    if (ext.mode() == ExtMode::convergent) {
      for (double f : {0.9, 0.5, 0.1, 0.01}) {
        double t = f * rep.inner_window;
        rep.inner_residual = std::max(rep.inner_residual, residual_sup(ext, t, cfg));
      }
    }
  }
  return rep;
}

}  // namespace hypobv
