#pragma once

#include "hypobv/rational.hpp"

#include <complex>
#include <map>
#include <vector>

namespace hypobv {

using MultiIndex = std::vector<int>;

// Sparse polynomial with complex-rational coefficients in nvars variables.
// In an operator profile the last variable is t.
class MultiPoly {
 public:
  using TermMap = std::map<MultiIndex, CRational>;

  MultiPoly() = default;
  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  static MultiPoly constant(int nvars, const CRational& c);
  static MultiPoly monomial(int nvars, const MultiIndex& e, const CRational& c = CRational(1));
  static MultiPoly variable(int nvars, int j);

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int total_degree() const;  // -1 for the zero polynomial
  int degree_in(int j) const;
  CRational coeff(const MultiIndex& e) const;

  void add_term(const MultiIndex& e, const CRational& c);

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const CRational& c);

  MultiPoly pow(unsigned k) const;

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator-(MultiPoly a) { return a *= CRational(-1); }
  friend MultiPoly operator*(MultiPoly a, const CRational& c) { return a *= c; }
  friend MultiPoly operator*(const CRational& c, MultiPoly a) { return a *= c; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b);
  friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

 private:
  int nvars_ = 0;
  TermMap terms_;
};

// Plain partial derivative (no -i factors).
MultiPoly poly_derivative(const MultiPoly& p, const MultiIndex& order);
CRational poly_eval(const MultiPoly& p, const std::vector<CRational>& point);
std::complex<double> poly_eval(const MultiPoly& p, const std::vector<std::complex<double>>& point);

// p(-x)
MultiPoly reflect(const MultiPoly& p);
// Embed a polynomial in the first nvars variables into nvars+extra variables.
MultiPoly widen(const MultiPoly& p, int extra);
// Drop the last variable; requires it to be absent.
MultiPoly drop_last(const MultiPoly& p);
// Variables print as x1..xd, with the last one as t when last_is_t is set.
std::string to_string(const MultiPoly& p, bool last_is_t = true);
// Parses expressions such as "t - i*x^2" or "(x1 + 2/3*t)^2" over the given variable names.
MultiPoly parse_poly(const std::string& text, const std::vector<std::string>& vars);

struct OperatorProfile {
  MultiPoly P;            // normalized so that Q_m = 1, variables (x_1..x_d, t)
  CRational scale{1};     // the input polynomial equals scale * P
  int d = 0;
  int m = 0;
  std::vector<MultiPoly> Q;     // Q_0..Q_m, in x only (d variables)
  std::vector<MultiPoly> Pfam;  // Pfam[j-1] = P_(j), j = 1..m
  MultiPoly Pcheck;             // P(-x,-t)
  bool degQ_bounded = true;     // deg Q_k <= deg Q_0 for k >= 1

  MultiPoly reassemble() const;
  MultiPoly t_power(int k) const;
};

OperatorProfile decompose_t(const MultiPoly& P);

struct PFamily {
  std::vector<MultiPoly> Pj;  // P_(1)..P_(m)
  MultiPoly Pcheck;
  bool recursion_check = false;
};

PFamily p_family(const OperatorProfile& prof);

}  // namespace hypobv
