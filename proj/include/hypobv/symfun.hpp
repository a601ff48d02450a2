#pragma once

#include "hypobv/polyops.hpp"
#include "hypobv/weights.hpp"

#include <complex>
#include <map>
#include <vector>

namespace hypobv {

struct GaussKey {
  Rational width;                 // a > 0
  std::vector<Rational> center;   // c
  bool operator<(const GaussKey& o) const;
  bool operator==(const GaussKey& o) const { return width == o.width && center == o.center; }
};

// Finite sum of p(x - c) exp(-a |x - c|^2), grouped by (a, c); p has dim() variables.
class SymFun {
 public:
  using PartMap = std::map<GaussKey, MultiPoly>;

  SymFun() = default;
  explicit SymFun(int dim) : dim_(dim) {}

  // coeff * (x - c)^exp * exp(-width |x - c|^2)
  static SymFun term(const CRational& coeff, const MultiIndex& exp, const Rational& width,
                     const std::vector<Rational>& center);
  static SymFun gaussian(int dim, const Rational& width = Rational(1));

  int dim() const { return dim_; }
  const PartMap& parts() const { return parts_; }
  bool is_zero() const { return parts_.empty(); }
  void add_part(const GaussKey& key, const MultiPoly& p);

  SymFun& operator+=(const SymFun& o);
  SymFun& operator-=(const SymFun& o);
  SymFun& operator*=(const CRational& c);
  friend SymFun operator+(SymFun a, const SymFun& b) { return a += b; }
  friend SymFun operator-(SymFun a, const SymFun& b) { return a -= b; }
  friend SymFun operator*(SymFun a, const CRational& c) { return a *= c; }
  friend SymFun operator*(const CRational& c, SymFun a) { return a *= c; }
  friend bool operator==(const SymFun& a, const SymFun& b) { return a.dim_ == b.dim_ && a.parts_ == b.parts_; }
  friend bool operator!=(const SymFun& a, const SymFun& b) { return !(a == b); }

  // Multiply by a polynomial in the (unshifted) x variables.
  SymFun times_poly(const MultiPoly& q) const;
  // f(x - delta)
  SymFun shifted(const std::vector<Rational>& delta) const;
  std::complex<double> operator()(const std::vector<double>& x) const;
  // Radius around the centers beyond which every Gaussian envelope is below 1e-16.
  double envelope_radius() const;
  double min_width() const;

 private:
  int dim_ = 0;
  PartMap parts_;
};

// p(y + delta) for a polynomial p(y).
MultiPoly shift_poly(const MultiPoly& p, const std::vector<Rational>& delta);

// Exact d/dx_j, j zero-based.
SymFun differentiate(const SymFun& f, int j);
SymFun derivative(const SymFun& f, const MultiIndex& alpha);
// Q(D_x) f with D = -i d. Q may carry a trailing t slot, which must be unused.
SymFun apply_operator(const MultiPoly& Q, const SymFun& f);
// Exact Gaussian-moment integral of f g over R^d (final transcendental factors in double).
std::complex<double> integrate_product(const SymFun& f, const SymFun& g);
std::complex<double> integrate(const SymFun& f);

// Double-precision evaluator. Each part is expanded exactly in a tensor Hermite basis
// and evaluated with the normalized Hermite-function recurrence.
class NumSymFun {
 public:
  NumSymFun() = default;
  explicit NumSymFun(int dim) : dim_(dim) {}
  static NumSymFun from(const SymFun& f);

  int dim() const { return dim_; }
  bool empty() const { return parts_.empty(); }
  void axpy(std::complex<double> a, const NumSymFun& o);
  NumSymFun scaled(std::complex<double> a) const;
  std::complex<double> operator()(const double* x) const;
  std::complex<double> operator()(double x) const { return (*this)(&x); }
  double envelope_radius() const;
  double center_bound() const;

 private:
  struct Part {
    double width = 1;
    std::vector<double> center;
    std::vector<int> extent;                    // max degree + 1 per axis
    std::vector<std::complex<double>> coeffs;   // dense, row-major over extent
  };
  static bool same_key(const Part& a, const Part& b);
  int dim_ = 0;
  std::vector<Part> parts_;
};

struct BumpFun {
  double r1 = 1;
  double r2 = 2;
  int k_max = 12;
};

// psi^{(k)}(t)
double bump(const BumpFun& b, double t, int k);
// psi^{(j)}(t) for j = 0..k in one pass.
std::vector<double> bump_jet(const BumpFun& b, double t, int k);

struct SeminormQuery {
  const WeightSeq* M = nullptr;
  double h = 1;
  std::vector<std::pair<double, double>> box;  // K, one interval per axis
  int a_max = 8;
  int grid = 401;  // points per axis
};

struct SeminormResult {
  double value = 0;
  MultiIndex alpha;
  std::vector<double> x;
};

SeminormResult seminorm(const SymFun& f, const SeminormQuery& q);

}  // namespace hypobv
