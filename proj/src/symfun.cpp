#include "hypobv/symfun.hpp"

#include "hypobv/errors.hpp"

#include <cmath>
#include <functional>

namespace hypobv {

namespace {

// Decompose an exact rational into (mantissa, base-2 exponent) so that huge or tiny
// values survive until they are combined with compensating scale factors.
std::pair<double, long> split_rational(const Rational& r) {
  if (sgn(r) == 0) return {0.0, 0};
  mpf_class f(r, 96);
  long e = 0;
  double m = mpf_get_d_2exp(&e, f.get_mpf_t());
  return {m, e};
}

double scaled_value(const Rational& r, double log_scale) {
  auto [m, e] = split_rational(r);
  if (m == 0.0) return 0.0;
  return m * std::exp(e * std::log(2.0) + log_scale);
}

Rational double_factorial_odd(int k) {  // (k-1)!! for even k >= 0
  Rational r(1);
  for (int j = k - 1; j > 1; j -= 2) r *= j;
  return r;
}

// prod_j int y_j^{k_j} exp(-A y_j^2) dy_j without the (pi/A)^{d/2} factor.
bool gaussian_moment(const MultiIndex& k, const Rational& A, Rational& out) {
  out = 1;
  for (int kj : k) {
    if (kj % 2) return false;
    Rational twoA = 2 * A, pw(1);
    for (int i = 0; i < kj / 2; ++i) pw *= twoA;
    out *= double_factorial_odd(kj) / pw;
  }
  return true;
}

CRational moment_sum(const MultiPoly& p, const Rational& A) {
  CRational s;
  Rational mom;
  for (const auto& [e, c] : p.terms())
    if (gaussian_moment(e, A, mom)) s += c * CRational(mom);
  return s;
}

}  // namespace

bool GaussKey::operator<(const GaussKey& o) const {
  if (width != o.width) return width < o.width;
  return center < o.center;
}

SymFun SymFun::term(const CRational& coeff, const MultiIndex& exp, const Rational& width,
                    const std::vector<Rational>& center) {
  if (exp.size() != center.size()) throw Error(ErrorKind::DimensionMismatch, "term exponent vs center");
  if (sgn(width) <= 0) throw Error(ErrorKind::SchemaError, "width must be positive");
  SymFun f(static_cast<int>(exp.size()));
  GaussKey key{width, center};
  key.width.canonicalize();
  for (auto& c : key.center) c.canonicalize();
  CRational co = coeff;
  co.re.canonicalize();
  co.im.canonicalize();
  f.add_part(key, MultiPoly::monomial(f.dim_, exp, co));
  return f;
}

SymFun SymFun::gaussian(int dim, const Rational& width) {
  return term(CRational(1), MultiIndex(dim, 0), width, std::vector<Rational>(dim, Rational(0)));
}

void SymFun::add_part(const GaussKey& key, const MultiPoly& p) {
  if (p.nvars() != dim_ || static_cast<int>(key.center.size()) != dim_)
    throw Error(ErrorKind::DimensionMismatch, "SymFun part dimension");
  if (p.is_zero()) return;
  auto [it, inserted] = parts_.try_emplace(key, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) parts_.erase(it);
  }
}

SymFun& SymFun::operator+=(const SymFun& o) {
  if (o.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "SymFun add");
  for (const auto& [k, p] : o.parts_) add_part(k, p);
  return *this;
}

SymFun& SymFun::operator-=(const SymFun& o) {
  if (o.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "SymFun sub");
  for (const auto& [k, p] : o.parts_) add_part(k, -p);
  return *this;
}

SymFun& SymFun::operator*=(const CRational& c) {
  if (c.is_zero()) {
    parts_.clear();
    return *this;
  }
  for (auto& [k, p] : parts_) p *= c;
  return *this;
}

MultiPoly shift_poly(const MultiPoly& p, const std::vector<Rational>& delta) {
  if (static_cast<int>(delta.size()) != p.nvars()) throw Error(ErrorKind::DimensionMismatch, "shift length");
  MultiPoly cur = p;
  for (int j = 0; j < p.nvars(); ++j) {
    if (sgn(delta[j]) == 0) continue;
    MultiPoly next(p.nvars());
    for (const auto& [e, c] : cur.terms()) {
      MultiIndex ne = e;
      Rational dp(1);
      std::vector<Rational> pows(e[j] + 1);
      for (int k = 0; k <= e[j]; ++k) {
        pows[k] = dp;
        dp *= delta[j];
      }
      for (int k = 0; k <= e[j]; ++k) {
        ne[j] = k;
        next.add_term(ne, c * CRational(binomial(e[j], k) * pows[e[j] - k]));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

SymFun SymFun::times_poly(const MultiPoly& q) const {
  if (q.nvars() != dim_) throw Error(ErrorKind::DimensionMismatch, "times_poly");
  SymFun r(dim_);
  for (const auto& [k, p] : parts_) r.add_part(k, p * shift_poly(q, k.center));
  return r;
}

SymFun SymFun::shifted(const std::vector<Rational>& delta) const {
  SymFun r(dim_);
  for (const auto& [k, p] : parts_) {
    GaussKey nk = k;
    for (int j = 0; j < dim_; ++j) nk.center[j] += delta[j];
    r.add_part(nk, p);
  }
  return r;
}

std::complex<double> SymFun::operator()(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim_) throw Error(ErrorKind::DimensionMismatch, "SymFun evaluation point");
  return NumSymFun::from(*this)(x.data());
}

double SymFun::min_width() const {
  double w = 0;
  bool first = true;
  for (const auto& [k, p] : parts_) {
    double a = k.width.get_d();
    w = first ? a : std::min(w, a);
    first = false;
  }
  return w;
}

double SymFun::envelope_radius() const {
  double R = 0;
  for (const auto& [k, p] : parts_) {
    double a = k.width.get_d(), c = 0;
    for (const auto& cj : k.center) c = std::max(c, std::abs(cj.get_d()));
    int n = std::max(0, p.total_degree());
    R = std::max(R, c + std::sqrt((36.9 + n) / a) + std::sqrt(n / (2 * a)));
  }
  return R;
}

SymFun differentiate(const SymFun& f, int j) {
  if (j < 0 || j >= f.dim()) throw Error(ErrorKind::DimensionMismatch, "differentiation axis");
  SymFun r(f.dim());
  MultiIndex ej(f.dim(), 0);
  ej[j] = 1;
  MultiPoly yj = MultiPoly::monomial(f.dim(), ej);
  for (const auto& [k, p] : f.parts()) {
    MultiPoly dp = poly_derivative(p, ej);
    dp -= (yj * p) * CRational(2 * k.width);
    r.add_part(k, dp);
  }
  return r;
}

SymFun derivative(const SymFun& f, const MultiIndex& alpha) {
  SymFun r = f;
  for (int j = 0; j < static_cast<int>(alpha.size()); ++j)
    for (int k = 0; k < alpha[j]; ++k) r = differentiate(r, j);
  return r;
}

SymFun apply_operator(const MultiPoly& Qin, const SymFun& f) {
  MultiPoly Q = Qin;
  if (Q.nvars() == f.dim() + 1) {
    if (Q.degree_in(f.dim()) > 0) throw Error(ErrorKind::TDependence, "operator involves t");
    Q = drop_last(Q);
  }
  if (Q.nvars() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "operator vs function dimension");
  std::map<MultiIndex, SymFun> cache;
  cache.emplace(MultiIndex(f.dim(), 0), f);
  std::function<const SymFun&(const MultiIndex&)> get = [&](const MultiIndex& a) -> const SymFun& {
    auto it = cache.find(a);
    if (it != cache.end()) return it->second;
    MultiIndex prev = a;
    int j = 0;
    while (prev[j] == 0) ++j;
    --prev[j];
    SymFun d = differentiate(get(prev), j);
    return cache.emplace(a, std::move(d)).first->second;
  };
  SymFun r(f.dim());
  for (const auto& [e, c] : Q.terms()) {
    int deg = 0;
    for (int v : e) deg += v;
    r += get(e) * (c * CRational::minus_i_pow(deg));
  }
  return r;
}

std::complex<double> integrate_product(const SymFun& f, const SymFun& g) {
  if (f.dim() != g.dim()) throw Error(ErrorKind::DimensionMismatch, "integrate_product");
  const int d = f.dim();
  std::complex<double> total = 0;
  for (const auto& [kf, pf] : f.parts())
    for (const auto& [kg, pg] : g.parts()) {
      Rational A = kf.width + kg.width;
      Rational ab = kf.width * kg.width / A;
      std::vector<Rational> cc(d), df(d), dg(d);
      Rational dist2(0);
      for (int j = 0; j < d; ++j) {
        cc[j] = (kf.width * kf.center[j] + kg.width * kg.center[j]) / A;
        df[j] = cc[j] - kf.center[j];
        dg[j] = cc[j] - kg.center[j];
        Rational dc = kf.center[j] - kg.center[j];
        dist2 += dc * dc;
      }
      MultiPoly prod = shift_poly(pf, df) * shift_poly(pg, dg);
      CRational s = moment_sum(prod, A);
      double factor = std::pow(M_PI / A.get_d(), 0.5 * d) * std::exp(-Rational(ab * dist2).get_d());
      total += s.to_complex() * factor;
    }
  return total;
}

std::complex<double> integrate(const SymFun& f) {
  std::complex<double> total = 0;
  for (const auto& [k, p] : f.parts()) {
    CRational s = moment_sum(p, k.width);
    total += s.to_complex() * std::pow(M_PI / k.width.get_d(), 0.5 * f.dim());
  }
  return total;
}

// ---------------------------------------------------------------------------

NumSymFun NumSymFun::from(const SymFun& f) {
  NumSymFun nf(f.dim());
  const int d = f.dim();
  for (const auto& [key, poly] : f.parts()) {
    Part part;
    const Rational& a = key.width;
    part.width = a.get_d();
    for (const auto& c : key.center) part.center.push_back(c.get_d());
    part.extent.assign(d, 1);
    for (const auto& [e, c] : poly.terms())
      for (int j = 0; j < d; ++j) part.extent[j] = std::max(part.extent[j], e[j] + 1);
    size_t total = 1;
    for (int v : part.extent) total *= v;

    // Exact coefficients R_n in z^k = sum_i k!/(2^k i!(k-2i)!) H_{k-2i}(z), with y = z / sqrt(a).
    std::vector<CRational> R(total);
    std::vector<Rational> inv_a_pow(1, Rational(1));
    auto index_of = [&](const MultiIndex& n) {
      size_t idx = 0;
      for (int j = 0; j < d; ++j) idx = idx * part.extent[j] + n[j];
      return idx;
    };
    for (const auto& [e, c] : poly.terms()) {
      // Enumerate i_j in [0, e_j/2] for every axis.
      MultiIndex i(d, 0);
      while (true) {
        MultiIndex n(d);
        int isum = 0;
        Rational w(1);
        for (int j = 0; j < d; ++j) {
          n[j] = e[j] - 2 * i[j];
          isum += i[j];
          mpz_class two_k = mpz_class(1) << e[j];
          w *= factorial(e[j]) / (Rational(two_k) * factorial(i[j]) * factorial(n[j]));
        }
        while (static_cast<int>(inv_a_pow.size()) <= isum) inv_a_pow.push_back(inv_a_pow.back() / a);
        R[index_of(n)] += c * CRational(w * inv_a_pow[isum]);
        int j = d - 1;
        while (j >= 0 && i[j] == e[j] / 2) i[j--] = 0;
        if (j < 0) break;
        ++i[j];
      }
    }
    // Numeric coefficient: R_n a^{-|n|/2} prod sqrt(2^{n_j} n_j! sqrt(pi)).
    part.coeffs.assign(total, {0.0, 0.0});
    const double log_a = std::log(part.width);
    for (size_t idx = 0; idx < total; ++idx) {
      if (R[idx].is_zero()) continue;
      size_t rem = idx;
      double log_scale = 0;
      for (int j = d - 1; j >= 0; --j) {
        int nj = static_cast<int>(rem % part.extent[j]);
        rem /= part.extent[j];
        log_scale += -0.5 * nj * log_a + 0.5 * (nj * std::log(2.0) + std::lgamma(nj + 1.0) + 0.5 * std::log(M_PI));
      }
      part.coeffs[idx] = {scaled_value(R[idx].re, log_scale), scaled_value(R[idx].im, log_scale)};
    }
    nf.parts_.push_back(std::move(part));
  }
  return nf;
}

bool NumSymFun::same_key(const Part& a, const Part& b) { return a.width == b.width && a.center == b.center; }

void NumSymFun::axpy(std::complex<double> a, const NumSymFun& o) {
  if (o.parts_.empty() || a == 0.0) return;
  if (dim_ != o.dim_) throw Error(ErrorKind::DimensionMismatch, "NumSymFun axpy");
  for (const auto& op : o.parts_) {
    Part* target = nullptr;
    for (auto& p : parts_)
      if (same_key(p, op)) target = &p;
    if (!target) {
      Part np = op;
      for (auto& c : np.coeffs) c *= a;
      parts_.push_back(std::move(np));
      continue;
    }
    bool same_extent = target->extent == op.extent;
    if (same_extent) {
      for (size_t i = 0; i < op.coeffs.size(); ++i) target->coeffs[i] += a * op.coeffs[i];
      continue;
    }
    std::vector<int> ext(dim_);
    size_t total = 1;
    for (int j = 0; j < dim_; ++j) {
      ext[j] = std::max(target->extent[j], op.extent[j]);
      total *= ext[j];
    }
    std::vector<std::complex<double>> merged(total, 0.0);
    auto scatter = [&](const Part& src, std::complex<double> w) {
      std::vector<int> n(dim_, 0);
      for (size_t idx = 0; idx < src.coeffs.size(); ++idx) {
        size_t rem = idx;
        for (int j = dim_ - 1; j >= 0; --j) {
          n[j] = static_cast<int>(rem % src.extent[j]);
          rem /= src.extent[j];
        }
        size_t to = 0;
        for (int j = 0; j < dim_; ++j) to = to * ext[j] + n[j];
        merged[to] += w * src.coeffs[idx];
      }
    };
    scatter(*target, 1.0);
    scatter(op, a);
    target->extent = ext;
    target->coeffs = std::move(merged);
  }
}

NumSymFun NumSymFun::scaled(std::complex<double> a) const {
  NumSymFun r(dim_);
  r.axpy(a, *this);
  return r;
}

std::complex<double> NumSymFun::operator()(const double* x) const {
  std::complex<double> total = 0;
  thread_local std::vector<double> phi;
  for (const auto& p : parts_) {
    const double sa = std::sqrt(p.width);
    double z2 = 0;
    size_t offset = 0;
    std::vector<size_t> offs(dim_);
    for (int j = 0; j < dim_; ++j) {
      offs[j] = offset;
      offset += p.extent[j];
    }
    phi.assign(offset, 0.0);
    for (int j = 0; j < dim_; ++j) {
      double z = sa * (x[j] - p.center[j]);
      z2 += z * z;
      double* f = phi.data() + offs[j];
      f[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * z * z);
      if (p.extent[j] > 1) f[1] = std::sqrt(2.0) * z * f[0];
      for (int n = 1; n + 1 < p.extent[j]; ++n)
        f[n + 1] = std::sqrt(2.0 / (n + 1)) * z * f[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * f[n - 1];
    }
    std::complex<double> s = 0;
    if (dim_ == 1) {
      for (int n = 0; n < p.extent[0]; ++n) s += p.coeffs[n] * phi[n];
    } else {
      std::vector<int> n(dim_, 0);
      for (size_t idx = 0; idx < p.coeffs.size(); ++idx) {
        size_t rem = idx;
        double prod = 1;
        for (int j = dim_ - 1; j >= 0; --j) {
          n[j] = static_cast<int>(rem % p.extent[j]);
          rem /= p.extent[j];
          prod *= phi[offs[j] + n[j]];
        }
        if (p.coeffs[idx] != 0.0) s += p.coeffs[idx] * prod;
      }
    }
    total += s * std::exp(-0.5 * z2);
  }
  return total;
}

double NumSymFun::envelope_radius() const {
  double R = 0;
  for (const auto& p : parts_) {
    double c = 0;
    for (double v : p.center) c = std::max(c, std::abs(v));
    int n = 0;
    for (int e : p.extent) n = std::max(n, e - 1);
    R = std::max(R, c + std::sqrt((36.9 + n) / p.width) + std::sqrt(n / (2 * p.width)));
  }
  return R;
}

double NumSymFun::center_bound() const {
  double c = 0;
  for (const auto& p : parts_)
    for (double v : p.center) c = std::max(c, std::abs(v));
  return c;
}

// ---------------------------------------------------------------------------

namespace {

using Jet = std::vector<double>;

Jet jet_div(const Jet& a, const Jet& b) {
  Jet q(a.size(), 0.0);
  for (size_t k = 0; k < a.size(); ++k) {
    double s = a[k];
    for (size_t j = 1; j <= k; ++j) s -= b[j] * q[k - j];
    q[k] = s / b[0];
  }
  return q;
}

Jet jet_exp(const Jet& x) {
  Jet e(x.size(), 0.0);
  e[0] = std::exp(x[0]);
  for (size_t k = 1; k < x.size(); ++k) {
    double s = 0;
    for (size_t j = 1; j <= k; ++j) s += j * x[j] * e[k - j];
    e[k] = s / k;
  }
  return e;
}

// Taylor coefficients of exp(-1/u) for u = u0 + du*s.
Jet glue(double u0, double du, int K) {
  Jet u(K + 1, 0.0), one(K + 1, 0.0);
  u[0] = u0;
  if (K >= 1) u[1] = du;
  one[0] = 1.0;
  Jet inv = jet_div(one, u);
  for (auto& v : inv) v = -v;
  return jet_exp(inv);
}

}  // namespace

std::vector<double> bump_jet(const BumpFun& b, double t, int k) {
  if (k > b.k_max) throw Error(ErrorKind::OrderTooHigh, "bump derivative order " + std::to_string(k));
  if (k < 0) throw Error(ErrorKind::OrderTooSmall, "negative derivative order");
  std::vector<double> out(k + 1, 0.0);
  const double s = std::abs(t);
  if (s <= b.r1) {
    out[0] = 1.0;
    return out;
  }
  if (s >= b.r2) return out;
  Jet g1 = glue(b.r2 - s, -1.0, k);
  Jet g2 = glue(s - b.r1, 1.0, k);
  Jet den(k + 1);
  for (int j = 0; j <= k; ++j) den[j] = g1[j] + g2[j];
  Jet q = jet_div(g1, den);
  double fact = 1, sign = 1;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) fact *= j;
    out[j] = q[j] * fact * (t < 0 ? sign : 1.0);
    sign = -sign;
  }
  return out;
}

double bump(const BumpFun& b, double t, int k) { return bump_jet(b, t, k)[k]; }

SeminormResult seminorm(const SymFun& f, const SeminormQuery& q) {
  if (!q.M) throw Error(ErrorKind::InvalidSequence, "seminorm needs a weight sequence");
  if (static_cast<int>(q.box.size()) != f.dim()) throw Error(ErrorKind::DimensionMismatch, "seminorm box");
  SeminormResult res;
  res.alpha.assign(f.dim(), 0);
  res.x.assign(f.dim(), 0.0);
  if (f.is_zero()) return res;
  const int d = f.dim();
  const int npts = d == 1 ? q.grid : std::min(q.grid, 81);
  std::vector<std::vector<double>> axes(d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < npts; ++i)
      axes[j].push_back(q.box[j].first + (q.box[j].second - q.box[j].first) * i / (npts - 1));

  std::map<MultiIndex, SymFun> cache;
  cache.emplace(MultiIndex(d, 0), f);
  MultiIndex alpha(d, 0);
  while (true) {
    int deg = 0;
    for (int v : alpha) deg += v;
    if (deg <= q.a_max) {
      if (!cache.count(alpha)) {
        MultiIndex prev = alpha;
        int j = 0;
        while (prev[j] == 0) ++j;
        --prev[j];
        cache.emplace(alpha, differentiate(cache.at(prev), j));
      }
      NumSymFun nf = NumSymFun::from(cache.at(alpha));
      double denom = std::exp(deg * std::log(q.h) + q.M->log_M(deg));
      std::vector<int> idx(d, 0);
      std::vector<double> x(d);
      while (true) {
        for (int j = 0; j < d; ++j) x[j] = axes[j][idx[j]];
        double v = std::abs(nf(x.data())) / denom;
        if (v > res.value) {
          res.value = v;
          res.alpha = alpha;
          res.x = x;
        }
        int j = d - 1;
        while (j >= 0 && idx[j] == npts - 1) idx[j--] = 0;
        if (j < 0) break;
        ++idx[j];
      }
    }
    // next multi-index in the box [0, a_max]^d
    int j = d - 1;
    while (j >= 0 && alpha[j] == q.a_max) alpha[j--] = 0;
    if (j < 0) break;
    ++alpha[j];
  }
  return res;
}

}  // namespace hypobv
