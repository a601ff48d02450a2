#include "hypobv/polyops.hpp"

#include "hypobv/errors.hpp"

#include <cctype>
#include <sstream>

namespace hypobv {

MultiPoly MultiPoly::constant(int nvars, const CRational& c) {
  MultiPoly p(nvars);
  p.add_term(MultiIndex(nvars, 0), c);
  return p;
}

MultiPoly MultiPoly::monomial(int nvars, const MultiIndex& e, const CRational& c) {
  if (static_cast<int>(e.size()) != nvars) throw Error(ErrorKind::DimensionMismatch, "monomial exponent length");
  MultiPoly p(nvars);
  p.add_term(e, c);
  return p;
}

MultiPoly MultiPoly::variable(int nvars, int j) {
  MultiIndex e(nvars, 0);
  e.at(j) = 1;
  return monomial(nvars, e);
}

bool MultiPoly::is_constant() const {
  for (const auto& [e, c] : terms_)
    for (int v : e)
      if (v != 0) return false;
  return true;
}

int MultiPoly::total_degree() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    deg = std::max(deg, s);
  }
  return deg;
}

int MultiPoly::degree_in(int j) const {
  int deg = -1;
  for (const auto& [e, c] : terms_) deg = std::max(deg, e.at(j));
  return deg;
}

CRational MultiPoly::coeff(const MultiIndex& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? CRational() : it->second;
}

void MultiPoly::add_term(const MultiIndex& e, const CRational& c) {
  if (static_cast<int>(e.size()) != nvars_) throw Error(ErrorKind::DimensionMismatch, "term exponent length");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (o.nvars_ != nvars_) throw Error(ErrorKind::DimensionMismatch, "poly add");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (o.nvars_ != nvars_) throw Error(ErrorKind::DimensionMismatch, "poly sub");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const CRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_) throw Error(ErrorKind::DimensionMismatch, "poly mul");
  MultiPoly r(a.nvars_);
  MultiIndex e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (int j = 0; j < a.nvars_; ++j) e[j] = ea[j] + eb[j];
      r.add_term(e, ca * cb);
    }
  return r;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
}

MultiPoly MultiPoly::pow(unsigned k) const {
  MultiPoly result = constant(nvars_, CRational(1));
  MultiPoly base = *this;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

MultiPoly poly_derivative(const MultiPoly& p, const MultiIndex& order) {
  if (static_cast<int>(order.size()) != p.nvars()) throw Error(ErrorKind::DimensionMismatch, "derivative order length");
  MultiPoly r(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    MultiIndex ne = e;
    Rational f(1);
    bool zero = false;
    for (int j = 0; j < p.nvars(); ++j) {
      if (order[j] > e[j]) {
        zero = true;
        break;
      }
      for (int k = 0; k < order[j]; ++k) f *= e[j] - k;
      ne[j] -= order[j];
    }
    if (!zero) r.add_term(ne, c * CRational(f));
  }
  return r;
}

CRational poly_eval(const MultiPoly& p, const std::vector<CRational>& point) {
  if (static_cast<int>(point.size()) != p.nvars()) throw Error(ErrorKind::DimensionMismatch, "evaluation point length");
  CRational s;
  for (const auto& [e, c] : p.terms()) {
    CRational v = c;
    for (int j = 0; j < p.nvars(); ++j)
      for (int k = 0; k < e[j]; ++k) v *= point[j];
    s += v;
  }
  return s;
}

std::complex<double> poly_eval(const MultiPoly& p, const std::vector<std::complex<double>>& point) {
  if (static_cast<int>(point.size()) != p.nvars()) throw Error(ErrorKind::DimensionMismatch, "evaluation point length");
  std::complex<double> s = 0;
  for (const auto& [e, c] : p.terms()) {
    std::complex<double> v = c.to_complex();
    for (int j = 0; j < p.nvars(); ++j)
      if (e[j]) v *= std::pow(point[j], e[j]);
    s += v;
  }
  return s;
}

MultiPoly reflect(const MultiPoly& p) {
  MultiPoly r(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    int deg = 0;
    for (int v : e) deg += v;
    r.add_term(e, deg % 2 ? -c : c);
  }
  return r;
}

MultiPoly widen(const MultiPoly& p, int extra) {
  MultiPoly r(p.nvars() + extra);
  for (const auto& [e, c] : p.terms()) {
    MultiIndex ne = e;
    ne.resize(e.size() + extra, 0);
    r.add_term(ne, c);
  }
  return r;
}

MultiPoly drop_last(const MultiPoly& p) {
  MultiPoly r(p.nvars() - 1);
  for (const auto& [e, c] : p.terms()) {
    if (e.back() != 0) throw Error(ErrorKind::TDependence, "polynomial depends on the last variable");
    r.add_term(MultiIndex(e.begin(), e.end() - 1), c);
  }
  return r;
}

std::string to_string(const MultiPoly& p, bool last_is_t) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(c) << ")";
    for (size_t j = 0; j < e.size(); ++j)
      if (e[j]) {
        os << "*" << (j + 1 == e.size() && last_is_t && p.nvars() > 1 ? std::string("t") : "x" + std::to_string(j + 1));
        if (e[j] > 1) os << "^" << e[j];
      }
  }
  return os.str();
}

namespace {

class PolyParser {
 public:
  PolyParser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  MultiPoly parse() {
    MultiPoly p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SchemaError, "polynomial '" + s_ + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int n() const { return static_cast<int>(vars_.size()); }

  MultiPoly expr() {
    MultiPoly acc(n());
    bool neg = eat('-');
    if (!neg) eat('+');
    acc = neg ? -term() : term();
    while (true) {
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        return acc;
    }
  }
  MultiPoly term() {
    MultiPoly acc = power();
    while (true) {
      skip();
      if (eat('*')) {
        acc = acc * power();
      } else if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '(')) {
        acc = acc * power();  // implicit multiplication
      } else {
        return acc;
      }
    }
  }
  MultiPoly power() {
    MultiPoly base = atom();
    if (eat('^')) {
      skip();
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a nonnegative integer");
      base = base.pow(static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return base;
  }
  MultiPoly atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      MultiPoly p = expr();
      if (!eat(')')) fail("missing ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' || s_[pos_] == '/'))
        ++pos_;
      return MultiPoly::constant(n(), CRational(rational_from_string(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      for (int j = 0; j < n(); ++j)
        if (vars_[j] == name) return MultiPoly::variable(n(), j);
      if (name == "i") return MultiPoly::constant(n(), CRational::i());
      fail("unknown symbol '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::vector<std::string> vars_;
  size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(const std::string& text, const std::vector<std::string>& vars) {
  return PolyParser(text, vars).parse();
}

MultiPoly OperatorProfile::t_power(int k) const {
  MultiIndex e(d + 1, 0);
  e[d] = k;
  return MultiPoly::monomial(d + 1, e);
}

MultiPoly OperatorProfile::reassemble() const {
  MultiPoly r(d + 1);
  for (int k = 0; k <= m; ++k) r += widen(Q[k], 1) * t_power(k);
  return r;
}

OperatorProfile decompose_t(const MultiPoly& input) {
  if (input.nvars() < 1) throw Error(ErrorKind::DimensionMismatch, "polynomial needs at least the t variable");
  if (input.is_constant()) throw Error(ErrorKind::ConstantPoly, "P is constant");
  OperatorProfile prof;
  prof.d = input.nvars() - 1;
  const int d = prof.d;
  prof.m = std::max(0, input.degree_in(d));
  const int m = prof.m;

  std::vector<MultiPoly> raw(m + 1, MultiPoly(d));
  for (const auto& [e, c] : input.terms()) raw[e[d]].add_term(MultiIndex(e.begin(), e.end() - 1), c);
  if (!raw[m].is_constant())
    throw Error(ErrorKind::NonConstantLeading, "leading t-coefficient depends on x: " + to_string(raw[m], false));
  prof.scale = raw[m].coeff(MultiIndex(d, 0));
  CRational inv = CRational(1) / prof.scale;

  prof.P = input * inv;
  prof.Q.resize(m + 1, MultiPoly(d));
  for (int k = 0; k <= m; ++k) prof.Q[k] = raw[k] * inv;

  int deg0 = prof.Q[0].total_degree();
  for (int k = 1; k <= m; ++k)
    if (prof.Q[k].total_degree() > deg0) prof.degQ_bounded = false;

  PFamily fam = p_family(prof);
  prof.Pfam = fam.Pj;
  prof.Pcheck = fam.Pcheck;
  return prof;
}

PFamily p_family(const OperatorProfile& prof) {
  const int d = prof.d, m = prof.m;
  PFamily fam;
  for (int j = 1; j <= m; ++j) {
    MultiPoly pj(d + 1);
    for (int k = j; k <= m; ++k) pj += widen(prof.Q[k], 1) * prof.t_power(k - j);
    fam.Pj.push_back(pj);
  }
  fam.Pcheck = reflect(prof.P);

  // t^0 = P_(m); t^j = P_(m-j) - sum_{k<j} Q_{k+m-j} t^k
  bool ok = m == 0 || fam.Pj[m - 1] == prof.t_power(0);
  for (int j = 1; j < m && ok; ++j) {
    MultiPoly rhs = fam.Pj[m - j - 1];
    for (int k = 0; k < j; ++k) rhs -= widen(prof.Q[k + m - j], 1) * prof.t_power(k);
    ok = rhs == prof.t_power(j);
  }
  fam.recursion_check = ok;
  return fam;
}

}  // namespace hypobv
