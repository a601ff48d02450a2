#pragma once

#include "hypobv/polyops.hpp"
#include "hypobv/symfun.hpp"
#include "hypobv/weights.hpp"

#include <json.hpp>

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace hypobv {

using json = nlohmann::json;

json load_json_file(const std::filesystem::path& path);

// "p/q" strings, or JSON numbers for convenience (finite decimals only).
Rational rational_from_json(const json& j, const std::string& what);
CRational crational_from_json(const json& j, const std::string& what);  // {"re", "im"}
json to_json(const Rational& r);
json to_json(const CRational& c);
json to_json(std::complex<double> z);

// {"d": int, "terms": [{"exp": [e_1..e_d, e_t], "re": "p/q", "im": "p/q"}]}, or a
// string such as "t - i*x^2". Strings use x, t when d = 1 and x1..xd, t otherwise;
// d is inferred from the variable names unless given.
MultiPoly poly_from_json(const json& j);
MultiPoly poly_from_text(const std::string& text, int d = -1);
json poly_to_json(const MultiPoly& p);

// {"terms": [{"coeff": {"re", "im"}, "exp": [...], "width": "p/q", "center": [...]}]}
SymFun symfun_from_json(const json& j);
json symfun_to_json(const SymFun& f);

// {"kind": "gevrey", "sigma": s, "p_max": n} | {"csv": path} | {"values": [...]}
WeightSeq weightseq_from_json(const json& j, const std::filesystem::path& base_dir);

}  // namespace hypobv
