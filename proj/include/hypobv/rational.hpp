#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

namespace hypobv {

using Rational = mpq_class;

// Exact complex number with rational real and imaginary parts.
struct CRational {
  Rational re{0};
  Rational im{0};

  CRational() = default;
  CRational(long v) : re(v) {}
  CRational(Rational r) : re(std::move(r)) {}
  CRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
  std::complex<long double> to_complex_ld() const;

  static CRational i() { return {Rational(0), Rational(1)}; }
  // (-i)^k
  static CRational minus_i_pow(int k);
  static CRational i_pow(int k);

  CRational& operator+=(const CRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  CRational& operator-=(const CRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  CRational& operator*=(const CRational& o);
  CRational& operator/=(const CRational& o);
};

CRational operator+(CRational a, const CRational& b);
CRational operator-(CRational a, const CRational& b);
CRational operator-(const CRational& a);
CRational operator*(CRational a, const CRational& b);
CRational operator/(CRational a, const CRational& b);
bool operator==(const CRational& a, const CRational& b);
inline bool operator!=(const CRational& a, const CRational& b) { return !(a == b); }

// "p/q" (or "p" when q = 1), canonical form.
std::string rational_to_string(const Rational& r);
// Accepts "p/q", "p", or a finite decimal like "-0.25".
Rational rational_from_string(const std::string& s);
std::string to_string(const CRational& c);

// num/den in canonical form; GMP arithmetic assumes canonical operands.
inline Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational factorial(unsigned n);
Rational binomial(unsigned n, unsigned k);

}  // namespace hypobv
