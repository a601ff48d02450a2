#include "hypobv/jobs.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace hypobv;
namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("HYPOBV_CLI");
  return p ? p : "hypobv_cli";
}

fs::path corpus() {
  const char* p = std::getenv("HYPOBV_CORPUS");
  return p ? p : "tools/corpus";
}

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun sh(const std::string& args) {
  CliRun r;
  std::string cmd = "'" + cli() + "' " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("hypobv_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, HeatIndicesJob) {
  CliRun r = sh("run '" + (corpus() / "indices_heat.json").string() + "'");
  ASSERT_EQ(r.code, 0) << r.out;
  json rep = json::parse(r.out);
  EXPECT_EQ(rep["schema"], kReportSchema);
  EXPECT_EQ(rep["results"]["a0"], "2");
  EXPECT_EQ(rep["results"]["b0"], "2");
  EXPECT_EQ(rep["status"], "ok");
  EXPECT_TRUE(rep["provenance"]["seeds"].contains("halton_start"));
}

TEST(Cli, CauchyKernelBv) {
  CliRun r = sh("bv --kernel cauchy --method both");
  ASSERT_EQ(r.code, 0) << r.out;
  json v = json::parse(r.out)["results"]["value"];
  EXPECT_NEAR(v["re"].get<double>(), 0.0, 1e-3);
  EXPECT_NEAR(v["im"].get<double>(), -2 * std::numbers::pi, 1e-3);
}

TEST(Cli, MalformedPolynomialIsSchemaError) {
  fs::path d = scratch("malformed");
  std::ofstream(d / "bad.json") << R"({"command": "indices", "poly": {"d": 1, "terms": [{"exp": [1, 0, 2], "re": "1"}]}})";
  CliRun r = sh("run '" + (d / "bad.json").string() + "'");
  EXPECT_EQ(r.code, 64);
  EXPECT_EQ(json::parse(r.out)["error"]["kind"], "SchemaError");
  EXPECT_EQ(sh("indices --poly 't - i*x^'").code, 64);
  std::ofstream(d / "broken.json") << "{\"command\": ";
  EXPECT_EQ(sh("run '" + (d / "broken.json").string() + "'").code, 64);
  EXPECT_EQ(sh("run '" + (d / "missing.json").string() + "'").code, 66);
}

TEST(Cli, ExitCodesForVerdictAndNumericFailures) {
  fs::path d = scratch("codes");
  // the planted expectation is wrong on purpose
  std::ofstream(d / "verdict.json") << R"({"command": "indices", "poly": "x^2 + t^2", "expect": {"a0": "2"}})";
  CliRun v = sh("run '" + (d / "verdict.json").string() + "'");
  EXPECT_EQ(v.code, 2);
  EXPECT_EQ(json::parse(v.out)["status"], "verdict_failure");
  // root of t + i sits on the shifted contour
  std::ofstream(d / "numeric.json") << R"({"command": "fundsol", "poly": "t + i", "A": 1.2})";
  EXPECT_EQ(sh("run '" + (d / "numeric.json").string() + "'").code, 3);
}

TEST(Cli, ReportsAreByteIdentical) {
  for (const char* job : {"bv_poisson.json", "weights_gevrey2.json", "indices_anisotropic.json"}) {
    CliRun a = sh("run '" + (corpus() / job).string() + "'");
    CliRun b = sh("run '" + (corpus() / job).string() + "'");
    EXPECT_EQ(a.code, 0) << job;
    EXPECT_EQ(a.out, b.out) << job;
    EXPECT_EQ(a.out.find("time"), std::string::npos);
  }
}

TEST(Cli, ShippedCorpusPasses) {
  fs::path out = scratch("suite") / "suite.json";
  CliRun r = sh("suite '" + corpus().string() + "' --threads 4 --out '" + out.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  json rep = json::parse(std::ifstream(out));
  EXPECT_EQ(rep["passed"], rep["total"]);
  bool saw_planted = false;
  for (const auto& j : rep["jobs"])
    if (j["expect_fail"].get<bool>()) {
      saw_planted = true;
      EXPECT_EQ(j["exit_code"], 2);
      EXPECT_EQ(j["report"]["results"]["conditions"]["M1"]["witness"], json::array({2}));
    }
  EXPECT_TRUE(saw_planted);
}

TEST(Cli, SuiteFailsWhenAJobFails) {
  fs::path d = scratch("failing");
  fs::copy_file(corpus() / "indices_heat.json", d / "a.json");
  std::ofstream(d / "b.json") << R"({"command": "indices", "poly": "x^2 + t^2", "expect": {"b0": "3"}})";
  EXPECT_NE(sh("suite '" + d.string() + "'").code, 0);
  // an expected failure that does not fail is a failure too
  std::ofstream(d / "b.json") << R"({"command": "indices", "poly": "x^2 + t^2", "expect_fail": true})";
  EXPECT_NE(sh("suite '" + d.string() + "'").code, 0);
  std::ofstream(d / "b.json") << R"({"command": "indices", "poly": "x^2 + t^2", "expect": {"b0": "3"}, "expect_fail": true})";
  EXPECT_EQ(sh("suite '" + d.string() + "'").code, 0);
}

TEST(Cli, EmptyCorpusWarnsAndSucceeds) {
  fs::path d = scratch("empty");
  std::string cmd = "'" + cli() + "' suite '" + d.string() + "' 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  ASSERT_NE(f, nullptr);
  std::string text;
  char buf[512];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  int st = pclose(f);
  EXPECT_EQ(WEXITSTATUS(st), 0);
  EXPECT_NE(text.find("warning"), std::string::npos);
}

TEST(Cli, SubcommandsBuildJobs) {
  fs::path d = scratch("sub");
  std::ofstream(d / "phi.json") << R"({"terms": [{"coeff": {"re": "1"}, "exp": [0], "width": "1", "center": ["0"]}]})";
  CliRun f = sh("fundsol --poly 't - i*x^2' --check-delta '" + (d / "phi.json").string() + "'");
  EXPECT_EQ(f.code, 0);
  EXPECT_LT(json::parse(f.out)["results"]["delta"]["abs_err"].get<double>(), 1e-3);
  CliRun w = sh("weights --sigma 1.5 --a 0.5");
  EXPECT_EQ(w.code, 0);
  EXPECT_EQ(json::parse(w.out)["results"]["conditions"]["M4a"]["verdict"], "fails");
  CliRun c = sh("cauchy --poly 't^2 + x^2' --order 6");
  EXPECT_EQ(c.code, 0);
  EXPECT_TRUE(json::parse(c.out)["results"]["tables_equal"].get<bool>());
  fs::path csv = d / "trail.csv";
  CliRun b = sh("bv --kernel heat --method direct --csv '" + csv.string() + "'");
  EXPECT_EQ(b.code, 0);
  EXPECT_TRUE(fs::exists(csv));
  CliRun s = sh("stokes --field 'x^2*t' --poly 'x^2 + t^2' --phi '" + (d / "phi.json").string() + "' --a 0.1 --b 1");
  EXPECT_EQ(s.code, 0);
  CliRun e = sh("extend --poly 't - i*x^2' --mode finite_order --order 3");
  EXPECT_EQ(e.code, 0);
  EXPECT_NEAR(json::parse(e.out)["results"]["slope"].get<double>(), 3.0, 0.2);
}

TEST(JsonIo, RoundTrips) {
  MultiPoly p = poly_from_text("t^2 - i*x1*x2 + 3/4*x2^4");
  EXPECT_EQ(p.nvars(), 3);
  EXPECT_EQ(poly_from_json(poly_to_json(p)), p);
  EXPECT_EQ(poly_from_text("t - i*x^2").nvars(), 2);
  EXPECT_THROW(poly_from_text("x + x1 + t"), Error);
  SymFun f = SymFun::term(CRational(Rational(1, 2), Rational(-3)), {2}, Rational(3, 2), {Rational(-1, 4)}) +
             SymFun::gaussian(1);
  EXPECT_EQ(symfun_from_json(symfun_to_json(f)), f);
  EXPECT_EQ(rational_from_json(json(0.25), "x"), Rational(1, 4));
  EXPECT_THROW(rational_from_json(json(1e-30), "x"), Error);
  EXPECT_THROW(symfun_from_json(json::parse(R"({"terms": [{"exp": [0], "width": "-1"}]})")), Error);
  WeightSeq g = weightseq_from_json(json::parse(R"({"kind": "gevrey", "sigma": 2, "p_max": 60})"), ".");
  EXPECT_EQ(g.p_max(), 60);
  EXPECT_THROW(weightseq_from_json(json::parse(R"({"csv": "nope.csv"})"), "."), Error);
}

TEST(JsonIo, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::QuadratureNoConvergence), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::NoConvergence), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::SchemaError), 64);
  EXPECT_EQ(exit_code_for(ErrorKind::KindProfileMismatch), 64);
  EXPECT_EQ(exit_code_for(ErrorKind::FileError), 66);
  EXPECT_EQ(exit_code_for(ErrorKind::ConditionViolation), 2);
}
