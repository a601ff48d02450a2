#include "hypobv/rational.hpp"

#include "hypobv/errors.hpp"

#include <cctype>

namespace hypobv {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonConstantLeading: return "NonConstantLeading";
    case ErrorKind::ConstantPoly: return "ConstantPoly";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TDependence: return "TDependence";
    case ErrorKind::OrderTooHigh: return "OrderTooHigh";
    case ErrorKind::OrderTooSmall: return "OrderTooSmall";
    case ErrorKind::TruncationSuspect: return "TruncationSuspect";
    case ErrorKind::TruncationExceeded: return "TruncationExceeded";
    case ErrorKind::NoFit: return "NoFit";
    case ErrorKind::InvalidSequence: return "InvalidSequence";
    case ErrorKind::RootSolverFailed: return "RootSolverFailed";
    case ErrorKind::ConditionViolation: return "ConditionViolation";
    case ErrorKind::KindProfileMismatch: return "KindProfileMismatch";
    case ErrorKind::QuadratureNoConvergence: return "QuadratureNoConvergence";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::OscillatoryQuadratureFailure: return "OscillatoryQuadratureFailure";
    case ErrorKind::AdmissibilityFailure: return "AdmissibilityFailure";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::FileError: return "FileError";
  }
  return "Unknown";
}

std::complex<long double> CRational::to_complex_ld() const {
  // mpq -> long double via string-free path: divide mpf values.
  mpf_class r(re, 128), i(im, 128);
  return {static_cast<long double>(r.get_d()) +
              static_cast<long double>(mpf_class(r - mpf_class(r.get_d(), 128)).get_d()),
          static_cast<long double>(i.get_d()) +
              static_cast<long double>(mpf_class(i - mpf_class(i.get_d(), 128)).get_d())};
}

CRational CRational::i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {Rational(1), Rational(0)};
    case 1: return {Rational(0), Rational(1)};
    case 2: return {Rational(-1), Rational(0)};
    default: return {Rational(0), Rational(-1)};
  }
}

CRational CRational::minus_i_pow(int k) { return i_pow(-k); }

CRational& CRational::operator*=(const CRational& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

CRational& CRational::operator/=(const CRational& o) {
  Rational den = o.re * o.re + o.im * o.im;
  Rational r = (re * o.re + im * o.im) / den;
  Rational i = (im * o.re - re * o.im) / den;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

CRational operator+(CRational a, const CRational& b) { return a += b; }
CRational operator-(CRational a, const CRational& b) { return a -= b; }
CRational operator-(const CRational& a) { return {Rational(-a.re), Rational(-a.im)}; }
CRational operator*(CRational a, const CRational& b) { return a *= b; }
CRational operator/(CRational a, const CRational& b) { return a /= b; }
bool operator==(const CRational& a, const CRational& b) { return a.re == b.re && a.im == b.im; }

std::string rational_to_string(const Rational& r) {
  Rational c(r);
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw Error(ErrorKind::SchemaError, "empty rational");
  auto dot = s.find('.');
  auto exp = s.find_first_of("eE");
  if (dot == std::string::npos && exp == std::string::npos) {
    for (char ch : s)
      if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+' || ch == '/'))
        throw Error(ErrorKind::SchemaError, "bad rational '" + s + "'");
    try {
      std::string t = s[0] == '+' ? s.substr(1) : s;
      Rational r(t, 10);
      if (r.get_den() == 0) throw Error(ErrorKind::SchemaError, "zero denominator in '" + s + "'");
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::SchemaError, "bad rational '" + s + "'");
    }
  }
  if (exp != std::string::npos) throw Error(ErrorKind::SchemaError, "exponent notation not accepted: '" + s + "'");
  // finite decimal
  bool neg = s[0] == '-';
  std::string body = (s[0] == '-' || s[0] == '+') ? s.substr(1) : s;
  dot = body.find('.');
  std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
  if (ip.empty()) ip = "0";
  for (char ch : ip + fp)
    if (!std::isdigit(static_cast<unsigned char>(ch))) throw Error(ErrorKind::SchemaError, "bad decimal '" + s + "'");
  mpz_class num(ip + fp, 10), den = 1;
  for (size_t k = 0; k < fp.size(); ++k) den *= 10;
  Rational r(num, den);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

std::string to_string(const CRational& c) {
  return rational_to_string(c.re) + (sgn(c.im) < 0 ? " - " : " + ") +
         rational_to_string(abs(c.im)) + "i";
}

Rational factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f);
}

Rational binomial(unsigned n, unsigned k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

}  // namespace hypobv
