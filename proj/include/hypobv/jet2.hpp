#pragma once

#include <complex>
#include <vector>

namespace hypobv {

// Truncated Taylor expansion in (x, t) about a point: c(a, b) is the coefficient of
// dx^a dt^b, kept for a + b <= order.
class Jet2 {
 public:
  using C = std::complex<double>;

  Jet2() = default;
  Jet2(int order, C value) : K_(order), c_((order + 1) * (order + 1), 0.0) { c_[0] = value; }
  static Jet2 var_x(int order, double x0);
  static Jet2 var_t(int order, double t0);

  int order() const { return K_; }
  C& at(int a, int b) { return c_[a * (K_ + 1) + b]; }
  C at(int a, int b) const { return c_[a * (K_ + 1) + b]; }
  C value() const { return c_[0]; }
  // d_x^a d_t^b of the expanded function at the base point
  C derivative(int a, int b) const;

  Jet2& operator+=(const Jet2& o);
  Jet2& operator-=(const Jet2& o);
  Jet2& operator*=(C s);
  Jet2& operator+=(C s) { c_[0] += s; return *this; }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator-(Jet2 a) { return a *= -1.0; }
  friend Jet2 operator*(Jet2 a, C s) { return a *= s; }
  friend Jet2 operator*(C s, Jet2 a) { return a *= s; }
  friend Jet2 operator+(Jet2 a, C s) { return a += s; }
  friend Jet2 operator+(C s, Jet2 a) { return a += s; }
  friend Jet2 operator-(C s, const Jet2& a) { return -a + s; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b);
  friend Jet2 operator/(const Jet2& a, const Jet2& b);
  friend Jet2 operator/(C s, const Jet2& b);
  friend Jet2 operator/(Jet2 a, C s) { return a *= 1.0 / s; }

  friend Jet2 exp(const Jet2& g);
  friend Jet2 pow(const Jet2& g, double p);  // principal branch at the base value
  friend Jet2 sqrt(const Jet2& g) { return pow(g, 0.5); }

 private:
  int K_ = 0;
  std::vector<C> c_;
};

}  // namespace hypobv
