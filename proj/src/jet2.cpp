#include "hypobv/jet2.hpp"

#include <cmath>

namespace hypobv {

namespace {

double fact(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Jet2 Jet2::var_x(int order, double x0) {
  Jet2 j(order, x0);
  if (order >= 1) j.at(1, 0) = 1.0;
  return j;
}

Jet2 Jet2::var_t(int order, double t0) {
  Jet2 j(order, t0);
  if (order >= 1) j.at(0, 1) = 1.0;
  return j;
}

Jet2::C Jet2::derivative(int a, int b) const {
  if (a + b > K_) return 0.0;
  return at(a, b) * (fact(a) * fact(b));
}

Jet2& Jet2::operator+=(const Jet2& o) {
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet2& Jet2::operator*=(C s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet2 operator*(const Jet2& f, const Jet2& g) {
  const int K = f.K_;
  Jet2 h(K, 0.0);
  for (int a = 0; a <= K; ++a)
    for (int b = 0; a + b <= K; ++b) {
      Jet2::C s = 0;
      for (int i = 0; i <= a; ++i)
        for (int j = 0; j <= b; ++j) s += f.at(i, j) * g.at(a - i, b - j);
      h.at(a, b) = s;
    }
  return h;
}

Jet2 operator/(Jet2::C s, const Jet2& g) {
  // h g = s, solved in increasing total degree
  const int K = g.K_;
  Jet2 h(K, 0.0);
  for (int n = 0; n <= K; ++n)
    for (int a = 0; a <= n; ++a) {
      const int b = n - a;
      Jet2::C acc = n == 0 ? s : 0.0;
      for (int i = 0; i <= a; ++i)
        for (int j = 0; j <= b; ++j)
          if (i + j > 0) acc -= g.at(i, j) * h.at(a - i, b - j);
      h.at(a, b) = acc / g.at(0, 0);
    }
  return h;
}

Jet2 operator/(const Jet2& f, const Jet2& g) { return f * (1.0 / g); }

// h = exp(g): d h = h d g, taken along x when a > 0 and along t otherwise.
Jet2 exp(const Jet2& g) {
  const int K = g.K_;
  Jet2 h(K, std::exp(g.at(0, 0)));
  for (int n = 1; n <= K; ++n)
    for (int a = 0; a <= n; ++a) {
      const int b = n - a;
      Jet2::C acc = 0;
      if (a > 0) {
        for (int i = 1; i <= a; ++i)
          for (int j = 0; j <= b; ++j) acc += static_cast<double>(i) * g.at(i, j) * h.at(a - i, b - j);
        h.at(a, b) = acc / static_cast<double>(a);
      } else {
        for (int j = 1; j <= b; ++j) acc += static_cast<double>(j) * g.at(0, j) * h.at(0, b - j);
        h.at(0, b) = acc / static_cast<double>(b);
      }
    }
  return h;
}

// h = g^p: g d h = p h d g.
Jet2 pow(const Jet2& g, double p) {
  const int K = g.K_;
  Jet2 h(K, std::pow(g.at(0, 0), p));
  for (int n = 1; n <= K; ++n)
    for (int a = 0; a <= n; ++a) {
      const int b = n - a;
      Jet2::C acc = 0;
      if (a > 0) {
        for (int i = 0; i <= a; ++i)
          for (int j = 0; j <= b; ++j)
            if (i + j > 0) acc += (p * i - (a - i)) * g.at(i, j) * h.at(a - i, b - j);
        h.at(a, b) = acc / (static_cast<double>(a) * g.at(0, 0));
      } else {
        for (int j = 1; j <= b; ++j) acc += (p * j - (b - j)) * g.at(0, j) * h.at(0, b - j);
        h.at(0, b) = acc / (static_cast<double>(b) * g.at(0, 0));
      }
    }
  return h;
}

}  // namespace hypobv
