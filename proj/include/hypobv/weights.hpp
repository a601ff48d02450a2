#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hypobv {

// Positive sequence M_0..M_{P_max}, stored as log M_p.
class WeightSeq {
 public:
  static WeightSeq gevrey(double sigma, int p_max = 400);
  // Requires M_0 = M_1 = 1 (relative 1e-12) and positive entries.
  static WeightSeq from_table(const std::vector<double>& values, std::string label = "table");
  static WeightSeq from_log_table(std::vector<double> log_values, std::string label);
  // Reads "index,value" lines; indices must be 0..n-1 in order.
  static WeightSeq from_csv(const std::string& path);

  int p_max() const { return static_cast<int>(logM_.size()) - 1; }
  double log_M(int p) const { return logM_.at(p); }
  double M(int p) const;
  // log m_p = log M_p - log M_{p-1}, p >= 1
  double log_m(int p) const { return logM_.at(p) - logM_.at(p - 1); }
  const std::vector<double>& log_values() const { return logM_; }
  const std::string& label() const { return label_; }
  std::optional<double> gevrey_sigma() const { return sigma_; }
  // All entries within a factor 10 of 1.
  bool asymptotic_to_one() const;
  bool log_convex(double tol = 1e-10) const;

 private:
  std::vector<double> logM_;
  std::string label_;
  std::optional<double> sigma_;
};

// M^a (star = false) or M^{a,*} = M^a_p / p! (star = true); no normalization.
WeightSeq transform(const WeightSeq& M, double a, bool star);

enum class Verdict { holds_on_truncation, fails, inconclusive };
const char* verdict_name(Verdict v);

struct ConditionVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::vector<int> witness;  // p or (p, q) for fails
  std::string note;
};

enum class Relation { subset, prec, asymp, none, inconclusive };
const char* relation_name(Relation r);

struct RelationResult {
  Relation relation = Relation::inconclusive;
  double slope = 0;       // fitted slope of s_p = log(N_p/M_p)/p against log p
  double L_forward = 0;   // M_p <= C L^p N_p
  double C_forward = 0;
  double L_backward = 0;  // N_p <= C L^p M_p
  double C_backward = 0;
};

struct ConditionReport {
  ConditionVerdict M1;
  ConditionVerdict M2;
  double M2_C = 0, M2_H = 0;
  ConditionVerdict M2star;
  int M2star_p0 = 0, M2star_N = 0;
  ConditionVerdict M3prime;
  double M3prime_slope = 0;
  std::vector<std::pair<int, double>> M3prime_trace;  // (p, partial sum)
  std::optional<double> a;
  ConditionVerdict M4a;
  double M4a_C = 0;
  std::optional<RelationResult> dichotomy;  // p!^{1/a} vs M
  int scanned = 0;                          // entries used by the checks
  bool weight_sequence() const;             // M1, M2, M3' hold
};

ConditionReport check_conditions(const WeightSeq& M, std::optional<double> a = std::nullopt);

struct OmegaResult {
  double value = 0;  // may be +inf
  int argmax = 0;
  bool step_convention = false;
};

OmegaResult omega(const WeightSeq& M, double rho);
int gamma_cut(const WeightSeq& Mstar, double rho);
// Relative error of rho^Gamma M*_Gamma = exp(-omega_{M*}(1/rho)).
double gamma_identity_error(const WeightSeq& Mstar, double rho);

RelationResult relation(const WeightSeq& M, const WeightSeq& N);

struct FloorPowerFit {
  double C = 0;
  double L = 0;
  int argmax = 0;
  int p_top = 0;
};

FloorPowerFit floor_power_fit(const WeightSeq& M, double a);

}  // namespace hypobv
