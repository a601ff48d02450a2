#include "hypobv/jsonio.hpp"

#include "hypobv/errors.hpp"

#include <fstream>
#include <regex>
#include <set>

namespace hypobv {

namespace fs = std::filesystem;

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  }
}

Rational rational_from_json(const json& j, const std::string& what) {
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) {
    std::string s = j.dump();
    if (s.find_first_of("eE") != std::string::npos)
      throw Error(ErrorKind::SchemaError, what + ": write " + s + " as \"p/q\"");
    return rational_from_string(s);
  }
  throw Error(ErrorKind::SchemaError, what + ": expected a rational, got " + j.dump());
}

CRational crational_from_json(const json& j, const std::string& what) {
  if (!j.is_object()) return CRational(rational_from_json(j, what));
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "re" && it.key() != "im") throw Error(ErrorKind::SchemaError, what + ": unknown key " + it.key());
  CRational c;
  if (j.contains("re")) c.re = rational_from_json(j["re"], what + ".re");
  if (j.contains("im")) c.im = rational_from_json(j["im"], what + ".im");
  return c;
}

json to_json(const Rational& r) { return rational_to_string(r); }
json to_json(const CRational& c) { return {{"re", rational_to_string(c.re)}, {"im", rational_to_string(c.im)}}; }
json to_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

namespace {

std::vector<int> int_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::SchemaError, what + " must be an array");
  std::vector<int> v;
  for (const auto& e : j) {
    if (!e.is_number_integer() || e.get<long>() < 0)
      throw Error(ErrorKind::SchemaError, what + " entries must be nonnegative integers");
    v.push_back(e.get<int>());
  }
  return v;
}

}  // namespace

MultiPoly poly_from_text(const std::string& text, int d) {
  if (d < 0) {
    static const std::regex ident("[A-Za-z_][A-Za-z_0-9]*");
    std::set<std::string> names;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), ident); it != std::sregex_iterator(); ++it)
      names.insert(it->str());
    int top = 0;
    bool bare = names.count("x") > 0;
    for (const auto& n : names)
      if (n.size() > 1 && n[0] == 'x' && n.find_first_not_of("0123456789", 1) == std::string::npos)
        top = std::max(top, std::stoi(n.substr(1)));
    if (bare && top > 0) throw Error(ErrorKind::SchemaError, "mixes x with indexed variables x1, x2, ...");
    d = std::max(1, top);
  }
  std::vector<std::string> vars;
  if (d == 1) {
    vars = {"x", "t"};
  } else {
    for (int j = 1; j <= d; ++j) vars.push_back("x" + std::to_string(j));
    vars.push_back("t");
  }
  return parse_poly(text, vars);
}

MultiPoly poly_from_json(const json& j) {
  if (j.is_string()) return poly_from_text(j.get<std::string>());
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, "polynomial must be a string or an object");
  if (j.contains("text")) {
    int d = j.contains("d") ? j["d"].get<int>() : -1;
    return poly_from_text(j["text"].get<std::string>(), d);
  }
  if (!j.contains("d") || !j["d"].is_number_integer() || j["d"].get<int>() < 0)
    throw Error(ErrorKind::SchemaError, "polynomial needs an integer \"d\"");
  if (!j.contains("terms") || !j["terms"].is_array()) throw Error(ErrorKind::SchemaError, "polynomial needs \"terms\"");
  const int d = j["d"].get<int>();
  MultiPoly p(d + 1);
  for (const auto& t : j["terms"]) {
    if (!t.is_object() || !t.contains("exp")) throw Error(ErrorKind::SchemaError, "term needs \"exp\"");
    auto e = int_list(t["exp"], "exp");
    if (static_cast<int>(e.size()) != d + 1)
      throw Error(ErrorKind::SchemaError, "exp has " + std::to_string(e.size()) + " entries, expected d + 1");
    CRational c;
    if (t.contains("re")) c.re = rational_from_json(t["re"], "re");
    if (t.contains("im")) c.im = rational_from_json(t["im"], "im");
    p.add_term(e, c);
  }
  return p;
}

json poly_to_json(const MultiPoly& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms())
    terms.push_back({{"exp", e}, {"re", rational_to_string(c.re)}, {"im", rational_to_string(c.im)}});
  return {{"d", p.nvars() - 1}, {"terms", terms}, {"text", to_string(p)}};
}

SymFun symfun_from_json(const json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
    throw Error(ErrorKind::SchemaError, "test function needs a nonempty \"terms\" array");
  int dim = j.contains("dim") ? j["dim"].get<int>() : -1;
  SymFun f;
  bool first = true;
  for (const auto& t : j["terms"]) {
    if (!t.is_object() || !t.contains("exp")) throw Error(ErrorKind::SchemaError, "test function term needs \"exp\"");
    auto e = int_list(t["exp"], "exp");
    if (dim < 0) dim = static_cast<int>(e.size());
    if (static_cast<int>(e.size()) != dim) throw Error(ErrorKind::SchemaError, "inconsistent exp lengths");
    CRational c = t.contains("coeff") ? crational_from_json(t["coeff"], "coeff") : CRational(1);
    Rational w = t.contains("width") ? rational_from_json(t["width"], "width") : Rational(1);
    if (sgn(w) <= 0) throw Error(ErrorKind::SchemaError, "width must be positive");
    std::vector<Rational> center(dim, Rational(0));
    if (t.contains("center")) {
      if (!t["center"].is_array() || static_cast<int>(t["center"].size()) != dim)
        throw Error(ErrorKind::SchemaError, "center must have one entry per dimension");
      for (int k = 0; k < dim; ++k) center[k] = rational_from_json(t["center"][k], "center");
    }
    SymFun term = SymFun::term(c, e, w, center);
    if (first) {
      f = term;
      first = false;
    } else {
      f += term;
    }
  }
  return f;
}

json symfun_to_json(const SymFun& f) {
  json terms = json::array();
  for (const auto& [key, p] : f.parts()) {
    json center = json::array();
    for (const auto& c : key.center) center.push_back(rational_to_string(c));
    for (const auto& [e, c] : p.terms())
      terms.push_back({{"coeff", to_json(c)}, {"exp", e}, {"width", rational_to_string(key.width)}, {"center", center}});
  }
  return {{"dim", f.dim()}, {"terms", terms}};
}

WeightSeq weightseq_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, "sequence must be an object");
  if (j.contains("csv")) {
    fs::path p = j["csv"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    if (!fs::exists(p)) throw Error(ErrorKind::FileError, "cannot open " + p.string());
    return WeightSeq::from_csv(p.string());
  }
  if (j.contains("values")) {
    if (!j["values"].is_array()) throw Error(ErrorKind::SchemaError, "values must be an array");
    std::vector<double> v;
    for (const auto& e : j["values"]) {
      if (!e.is_number()) throw Error(ErrorKind::SchemaError, "values must be numbers");
      v.push_back(e.get<double>());
    }
    return WeightSeq::from_table(v, j.value("label", std::string("table")));
  }
  if (j.value("kind", std::string()) == "gevrey") {
    if (!j.contains("sigma") || !j["sigma"].is_number()) throw Error(ErrorKind::SchemaError, "gevrey needs sigma");
    return WeightSeq::gevrey(j["sigma"].get<double>(), j.value("p_max", 400));
  }
  throw Error(ErrorKind::SchemaError, "sequence needs \"kind\": \"gevrey\", \"csv\" or \"values\"");
}

}  // namespace hypobv
