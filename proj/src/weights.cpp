#include "hypobv/weights.hpp"

#include "hypobv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hypobv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
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

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds_on_truncation: return "holds-on-truncation";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::subset: return "subset";
    case Relation::prec: return "prec";
    case Relation::asymp: return "asymp";
    case Relation::none: return "none";
    case Relation::inconclusive: return "inconclusive";
  }
  return "?";
}

WeightSeq WeightSeq::gevrey(double sigma, int p_max) {
  if (!(sigma > 0)) throw Error(ErrorKind::InvalidSequence, "gevrey exponent must be positive");
  if (p_max < 1) throw Error(ErrorKind::InvalidSequence, "P_max must be at least 1");
  WeightSeq w;
  w.logM_.resize(p_max + 1);
  for (int p = 0; p <= p_max; ++p) w.logM_[p] = sigma * std::lgamma(p + 1.0);
  w.label_ = "gevrey(" + fmt_double(sigma) + ")";
  w.sigma_ = sigma;
  return w;
}

WeightSeq WeightSeq::from_table(const std::vector<double>& values, std::string label) {
  if (values.size() < 2) throw Error(ErrorKind::InvalidSequence, "need at least M_0 and M_1");
  std::vector<double> lg;
  for (size_t p = 0; p < values.size(); ++p) {
    if (!(values[p] > 0) || !std::isfinite(values[p]))
      throw Error(ErrorKind::InvalidSequence, "entry " + std::to_string(p) + " is not positive and finite");
    lg.push_back(std::log(values[p]));
  }
  if (std::abs(lg[0]) > 1e-12 || std::abs(lg[1]) > 1e-12)
    throw Error(ErrorKind::InvalidSequence, "M_0 = M_1 = 1 required");
  lg[0] = lg[1] = 0.0;
  return from_log_table(std::move(lg), std::move(label));
}

WeightSeq WeightSeq::from_log_table(std::vector<double> log_values, std::string label) {
  WeightSeq w;
  w.logM_ = std::move(log_values);
  w.label_ = std::move(label);
  return w;
}

WeightSeq WeightSeq::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileError, "cannot open " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    long idx;
    double v;
    if (!(ls >> idx)) continue;  // header line
    if (!(ls >> v)) throw Error(ErrorKind::SchemaError, "bad CSV line: " + line);
    if (idx != static_cast<long>(vals.size())) throw Error(ErrorKind::SchemaError, "CSV indices must be 0..n-1 in order");
    vals.push_back(v);
  }
  return from_table(vals, path);
}

double WeightSeq::M(int p) const { return std::exp(logM_.at(p)); }

bool WeightSeq::asymptotic_to_one() const {
  const double lim = std::log(10.0);
  return std::all_of(logM_.begin(), logM_.end(), [&](double v) { return std::abs(v) <= lim; });
}

bool WeightSeq::log_convex(double tol) const {
  for (int p = 1; p < p_max(); ++p)
    if (2 * logM_[p] > logM_[p - 1] + logM_[p + 1] + tol * (1 + std::abs(logM_[p]))) return false;
  return true;
}

WeightSeq transform(const WeightSeq& M, double a, bool star) {
  if (!(a > 0)) throw Error(ErrorKind::InvalidSequence, "transform exponent must be positive");
  std::vector<double> lg(M.p_max() + 1);
  for (int p = 0; p <= M.p_max(); ++p) lg[p] = a * M.log_M(p) - (star ? std::lgamma(p + 1.0) : 0.0);
  std::string label = M.label() + "^" + fmt_double(a) + (star ? ",*" : "");
  return WeightSeq::from_log_table(std::move(lg), label);
}

bool ConditionReport::weight_sequence() const {
  return M1.verdict == Verdict::holds_on_truncation && M2.verdict == Verdict::holds_on_truncation &&
         M3prime.verdict == Verdict::holds_on_truncation;
}

ConditionReport check_conditions(const WeightSeq& M, std::optional<double> a) {
  ConditionReport rep;
  const int n = std::min(M.p_max(), 1000);
  if (n < 50) throw Error(ErrorKind::InvalidSequence, "check_conditions needs P_max >= 50");
  rep.scanned = n;
  const auto& lg = M.log_values();

  // (M.1)
  rep.M1.verdict = Verdict::holds_on_truncation;
  for (int p = 1; p < n; ++p)
    if (2 * lg[p] > lg[p - 1] + lg[p + 1] + 1e-10 * (1 + std::abs(lg[p]))) {
      rep.M1.verdict = Verdict::fails;
      rep.M1.witness = {p};
      break;
    }

  // (M.2): g(k) = max_{p+q=k} log(M_k / (M_p M_q)); fit the smallest H on a grid whose
  // constant is not attained in the last tenth of the range.
  std::vector<double> g(n + 1);
  std::vector<int> gp(n + 1);
  for (int k = 0; k <= n; ++k) {
    g[k] = -kInf;
    for (int p = 0; 2 * p <= k; ++p) {
      double v = lg[k] - lg[p] - lg[k - p];
      if (v > g[k]) {
        g[k] = v;
        gp[k] = p;
      }
    }
  }
  rep.M2.verdict = Verdict::fails;
  int last_arg = n;
  for (int step = 0; step <= 320; ++step) {
    double logH = step * std::log(2.0) / 16;
    double best = -kInf;
    int arg = 0;
    for (int k = 0; k <= n; ++k)
      if (g[k] - k * logH > best) {
        best = g[k] - k * logH;
        arg = k;
      }
    last_arg = arg;
    if (arg <= 0.9 * n) {
      rep.M2.verdict = Verdict::holds_on_truncation;
      rep.M2_H = std::exp(logH);
      rep.M2_C = std::exp(best);
      break;
    }
  }
  if (rep.M2.verdict == Verdict::fails) rep.M2.witness = {gp[last_arg], last_arg - gp[last_arg]};

  // (M.2)*: 2 m_p <= m_{Np} for p >= p0
  rep.M2star.verdict = Verdict::fails;
  int worst_p = 1;
  for (int N = 2; N <= 16; ++N) {
    int top = n / N;
    if (top < 4) break;
    int last_bad = 0;
    for (int p = 1; p <= top; ++p)
      if (std::log(2.0) + M.log_m(p) > M.log_m(N * p) + 1e-12) last_bad = p;
    if (last_bad + 1 <= top / 2) {
      rep.M2star.verdict = Verdict::holds_on_truncation;
      rep.M2star_p0 = last_bad + 1;
      rep.M2star_N = N;
      break;
    }
    worst_p = last_bad;
  }
  if (rep.M2star.verdict == Verdict::fails) rep.M2star.witness = {worst_p};

  // (M.3)': sum 1/M_p^{1/p}
  {
    double sum = 0;
    std::vector<double> xs, ys;
    int next = 1;
    for (int p = 1; p <= n; ++p) {
      double lt = -lg[p] / p;
      sum += std::exp(lt);
      if (p == next || p == n) {
        rep.M3prime_trace.push_back({p, sum});
        next *= 2;
      }
      if (p >= n / 2) {
        xs.push_back(std::log(p));
        ys.push_back(lt);
      }
    }
    rep.M3prime_slope = ls_slope(xs, ys);
    const double delta = 0.02;
    if (rep.M3prime_slope <= -1 - delta) {
      rep.M3prime.verdict = Verdict::holds_on_truncation;
    } else if (rep.M3prime_slope >= -1 + delta) {
      rep.M3prime.verdict = Verdict::fails;
      rep.M3prime.witness = {n};
      rep.M3prime.note = "terms decay like p^" + fmt_double(rep.M3prime_slope);
    } else if (std::exp(-lg[n] / n) * n >= 0.999 * std::exp(-lg[n / 2] / (n / 2)) * (n / 2)) {
      // p * term does not decay: harmonic-type divergence
      rep.M3prime.verdict = Verdict::fails;
      rep.M3prime.witness = {n};
      rep.M3prime.note = "p-th term is at least c/p on the tail";
    } else {
      rep.M3prime.verdict = Verdict::inconclusive;
      rep.M3prime.note = "tail slope " + fmt_double(rep.M3prime_slope) + " too close to -1";
    }
  }

  // (M.4)_a: quotients of M^a_p/p! almost nondecreasing
  if (a) {
    rep.a = *a;
    std::vector<double> lq(n + 1);
    for (int p = 1; p <= n; ++p) lq[p] = *a * (lg[p] - lg[p - 1]) - std::log(static_cast<double>(p));
    auto worst_drop = [&](int upto, int& wp, int& wq) {
      double runmax = -kInf, D = 0;
      int argmax = 1;
      wp = wq = 1;
      for (int q = 1; q <= upto; ++q) {
        if (lq[q] > runmax) {
          runmax = lq[q];
          argmax = q;
        }
        if (runmax - lq[q] > D) {
          D = runmax - lq[q];
          wp = argmax;
          wq = q;
        }
      }
      return D;
    };
    int hp, hq, fp, fq;
    double Dh = worst_drop(n / 2, hp, hq);
    double Df = worst_drop(n, fp, fq);
    rep.M4a_C = std::exp(Df);
    if (Df <= Dh + 1e-9) {
      rep.M4a.verdict = Verdict::holds_on_truncation;
    } else {
      rep.M4a.verdict = Verdict::fails;
      rep.M4a.witness = {fp, fq};
      rep.M4a.note = "m*_p / m*_q grows with the truncation";
    }
    std::vector<double> sub(lg.begin(), lg.begin() + n + 1);
    rep.dichotomy = relation(WeightSeq::gevrey(1.0 / *a, n), WeightSeq::from_log_table(sub, M.label()));
  }
  return rep;
}

OmegaResult omega(const WeightSeq& M, double rho) {
  if (rho < 0) throw Error(ErrorKind::InvalidSequence, "omega needs rho >= 0");
  OmegaResult r;
  if (M.asymptotic_to_one()) {
    r.step_convention = true;
    r.value = rho <= 1 ? 0.0 : kInf;
    return r;
  }
  if (rho == 0) return r;
  const double lr = std::log(rho);
  const bool unimodal = M.log_convex();
  double best = -kInf;
  for (int p = 0; p <= M.p_max(); ++p) {
    double v = p * lr + M.log_M(0) - M.log_M(p);
    if (v > best) {
      best = v;
      r.argmax = p;
    } else if (unimodal && v < best) {
      break;
    }
  }
  r.value = best;
  if (r.argmax == M.p_max())
    throw Error(ErrorKind::TruncationSuspect, "omega maximizer at P_max for rho=" + fmt_double(rho));
  return r;
}

int gamma_cut(const WeightSeq& Mstar, double rho) {
  if (!(rho > 0)) throw Error(ErrorKind::InvalidSequence, "gamma_cut needs rho > 0");
  const double target = -std::log(rho);
  for (int p = 0; p + 1 <= Mstar.p_max(); ++p)
    if (Mstar.log_m(p + 1) >= target) return p;
  throw Error(ErrorKind::TruncationExceeded, "no quotient reaches 1/rho within P_max");
}

double gamma_identity_error(const WeightSeq& Mstar, double rho) {
  int G = gamma_cut(Mstar, rho);
  double lhs = G * std::log(rho) + Mstar.log_M(G) - Mstar.log_M(0);
  double rhs = -omega(Mstar, 1.0 / rho).value;
  return std::abs(std::expm1(lhs - rhs));
}

RelationResult relation(const WeightSeq& M, const WeightSeq& N) {
  const int P = std::min(M.p_max(), N.p_max());
  if (P < 8) throw Error(ErrorKind::InvalidSequence, "relation needs longer sequences");
  std::vector<double> s(P + 1, 0.0), xs, ys;
  for (int p = 1; p <= P; ++p) {
    s[p] = (N.log_M(p) - M.log_M(p)) / p;
    if (p >= P / 2) {
      xs.push_back(std::log(p));
      ys.push_back(s[p]);
    }
  }
  RelationResult r;
  r.slope = ls_slope(xs, ys);
  double smin = kInf, smax = -kInf;
  for (int p = P / 2; p <= P; ++p) {
    smin = std::min(smin, s[p]);
    smax = std::max(smax, s[p]);
  }
  auto fit_C = [&](double logL, int sign) {
    double best = -kInf;
    for (int p = 0; p <= P; ++p) {
      double v = sign * (M.log_M(p) - N.log_M(p)) - p * logL;
      best = std::max(best, v);
    }
    return std::exp(best);
  };
  const bool fwd = r.slope > -0.02, bwd = r.slope < 0.02;
  if (fwd) {
    r.L_forward = std::exp(-smin);
    r.C_forward = fit_C(-smin, 1);
  }
  if (bwd) {
    r.L_backward = std::exp(smax);
    r.C_backward = fit_C(smax, -1);
  }
  if (fwd && bwd)
    r.relation = Relation::asymp;
  else if (r.slope > 0.1)
    r.relation = Relation::prec;
  else if (r.slope >= 0.02)
    r.relation = Relation::subset;
  else if (r.slope < -0.1)
    r.relation = Relation::none;
  else
    r.relation = Relation::inconclusive;
  return r;
}

FloorPowerFit floor_power_fit(const WeightSeq& M, double a) {
  if (!(a > 0)) throw Error(ErrorKind::NoFit, "a must be positive");
  FloorPowerFit f;
  f.p_top = static_cast<int>(std::floor(M.p_max() / std::max(1.0, a)));
  std::vector<double> v(f.p_top + 1);
  for (int p = 0; p <= f.p_top; ++p) v[p] = M.log_M(static_cast<int>(std::floor(a * p))) - a * M.log_M(p);
  for (int step = -160; step <= 320; ++step) {
    double logL = step * std::log(2.0) / 16;
    double best = -kInf;
    int arg = 0;
    for (int p = 0; p <= f.p_top; ++p)
      if (v[p] - p * logL > best + 1e-12) {
        best = v[p] - p * logL;
        arg = p;
      }
    if (arg <= 0.9 * f.p_top) {
      f.C = std::exp(best);
      f.L = std::exp(logL);
      f.argmax = arg;
      return f;
    }
  }
  throw Error(ErrorKind::NoFit, "no (C, L) on the grid; check (M.1)/(M.2)");
}

}  // namespace hypobv
