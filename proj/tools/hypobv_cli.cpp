#include "hypobv/jobs.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace hypobv;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string out;
  int threads = 1;
  bool seed_echo = false;
  std::optional<double> tol;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "write the JSON report here instead of stdout");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "tolerance for the asserted identity");
  app->add_flag("--seed-echo", c.seed_echo, "print the seeds used to stderr");
}

// Writes the report and returns its exit code.
int emit(const JobOutcome& o, const Common& c) {
  const std::string text = o.report.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out);
    if (!f) {
      std::cerr << "cannot write " << c.out << "\n";
      return exit_file;
    }
    f << text;
  }
  if (c.seed_echo && o.report.contains("provenance"))
    for (const auto& [k, v] : o.report["provenance"]["seeds"].items()) std::cerr << "seed " << k << " = " << v << "\n";
  if (o.report.contains("error")) std::cerr << o.report["error"]["message"].get<std::string>() << "\n";
  return o.exit_code;
}

// --poly and --phi take a file or inline text.
json poly_arg(const std::string& s) { return s; }

json file_or_inline(const std::string& s) {
  if (fs::exists(s)) return fs::absolute(s).string();
  try {
    return json::parse(s);
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::FileError, "cannot open " + s);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypobv: indices, weights, extensions and boundary values of hypoelliptic operators"};
  app.set_help_flag("--help", "print help");  // -h would clash with --h
  app.require_subcommand(1);
  Common com;
  json job;

  std::string job_path, corpus;
  auto* run = app.add_subcommand("run", "run a job file");
  run->add_option("job", job_path, "job JSON")->required();
  add_common(run, com);

  auto* suite = app.add_subcommand("suite", "run every job file in a directory");
  suite->add_option("dir", corpus, "corpus directory")->required();
  add_common(suite, com);

  std::string poly, phi, sequence, mode = "finite_order", kernel = "heat", method = "both", data, csv;
  double sigma = 2, h = 1, t0 = 0.25, probe = 0, a_ab = 0.1, b_ab = 1.0, A = 0;
  std::optional<double> a_param;
  int order = -1, steps = 12;

  auto* ind = app.add_subcommand("indices", "hypoellipticity indices of P");
  ind->add_option("--poly", poly, "polynomial text or JSON file")->required();
  auto* probe_opt = ind->add_option("--probe", probe, "numeric a0 probe at this a");
  add_common(ind, com);

  auto* wts = app.add_subcommand("weights", "condition report for a weight sequence");
  auto* seq_opt = wts->add_option("--sequence", sequence, "CSV of (index, value)");
  wts->add_option("--sigma", sigma, "Gevrey exponent")->excludes(seq_opt);
  wts->add_option("--a", a_param, "exponent for (M.4)_a");
  add_common(wts, com);

  auto* cau = app.add_subcommand("cauchy", "Cauchy operator tables, both constructions");
  cau->add_option("--poly", poly, "polynomial")->required();
  cau->add_option("--order", order, "L_max");
  add_common(cau, com);

  auto* ext = app.add_subcommand("extend", "build and verify an extension");
  ext->add_option("--poly", poly, "polynomial")->required();
  ext->add_option("--data,--phi", data, "JSON array of m test functions");
  ext->add_option("--mode", mode, "plain | finite_order | gevrey | convergent");
  ext->add_option("--sigma", sigma, "Gevrey exponent of M");
  ext->add_option("--sequence", sequence, "CSV weight sequence");
  ext->add_option("--h", h, "h");
  ext->add_option("--A", A, "cutoff amplitude");
  ext->add_option("--order", order, "series or residual order");
  ext->add_option("--csv", csv, "residual profile CSV");
  add_common(ext, com);

  int slot = -1;
  bool tder = false;
  auto* bvc = app.add_subcommand("bv", "boundary value pairing of a reference kernel");
  bvc->add_option("--kernel", kernel, "heat | poisson | cauchy | heat_gaussian");
  bvc->add_option("--phi", phi, "test function JSON");
  bvc->add_option("--method", method, "direct | stokes | both");
  bvc->add_option("--t0", t0, "first t of the schedule");
  bvc->add_option("--steps", steps, "schedule length");
  bvc->add_option("--order", order, "residual order of the Stokes extension");
  bvc->add_option("--j", slot, "Stokes slot");
  bvc->add_flag("--t-derivatives", tder, "also pair bv(D_t^l f)");
  bvc->add_option("--csv", csv, "trail CSV");
  add_common(bvc, com);

  std::string field;
  auto* stk = app.add_subcommand("stokes", "integration by parts identity on a slab");
  auto* kopt = stk->add_option("--kernel", kernel, "reference kernel for f");
  stk->add_option("--field", field, "polynomial f(x, t)")->excludes(kopt);
  stk->add_option("--poly", poly, "operator (defaults to the kernel's)");
  stk->add_option("--phi", phi, "test function JSON");
  stk->add_option("--a", a_ab, "lower t");
  stk->add_option("--b", b_ab, "upper t");
  add_common(stk, com);

  auto* fs_ = app.add_subcommand("fundsol", "fundamental solution delta check, d = 1");
  fs_->add_option("--poly", poly, "polynomial")->required();
  fs_->add_option("--check-delta,--phi", phi, "test function JSON");
  fs_->add_option("--A", A, "contour shift");
  add_common(fs_, com);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      JobOutcome o = run_job_file(job_path);
      return emit(o, com);
    }
    if (*suite) {
      SuiteOutcome s = run_suite(corpus, com.threads);
      if (s.empty) std::cerr << "warning: no job files in " << corpus << "\n";
      std::cout << s.table;
      if (!com.out.empty()) {
        std::ofstream f(com.out);
        f << s.report.dump(2) << "\n";
      }
      return s.exit_code;
    }
    if (*ind) {
      job = {{"command", "indices"}, {"poly", poly_arg(poly)}};
      if (*probe_opt) job["probe"] = probe;
    } else if (*wts) {
      job = {{"command", "weights"}};
      if (!sequence.empty()) job["sequence"] = {{"csv", fs::absolute(sequence).string()}};
      else job["sigma"] = sigma;
      if (a_param) job["a"] = *a_param;
    } else if (*cau) {
      job = {{"command", "cauchy"}, {"poly", poly_arg(poly)}};
      if (order >= 0) job["order"] = order;
    } else if (*ext) {
      job = {{"command", "extend"}, {"poly", poly_arg(poly)}, {"mode", mode}, {"h", h}};
      if (!data.empty()) job["data"] = file_or_inline(data);
      if (order >= 0) job["order"] = order;
      if (!sequence.empty()) job["sequence"] = {{"csv", fs::absolute(sequence).string()}};
      else if (mode == "gevrey" || mode == "convergent") job["sigma"] = sigma;
      if (A > 0) job["A"] = A;
      if (!csv.empty()) job["csv"] = fs::absolute(csv).string();
    } else if (*bvc) {
      job = {{"command", "bv"}, {"kernel", kernel}, {"method", method}, {"t0", t0}, {"steps", steps}};
      if (slot >= 0) job["j"] = slot;
      if (!phi.empty()) job["phi"] = file_or_inline(phi);
      if (order >= 0) job["order"] = order;
      if (tder) job["t_derivatives"] = true;
      if (!csv.empty()) job["csv"] = fs::absolute(csv).string();
    } else if (*stk) {
      job = {{"command", "stokes"}, {"a", a_ab}, {"b", b_ab}};
      if (!field.empty()) job["field"] = field;
      else job["kernel"] = kernel;
      if (!poly.empty()) job["poly"] = poly_arg(poly);
      if (!phi.empty()) job["phi"] = file_or_inline(phi);
    } else if (*fs_) {
      job = {{"command", "fundsol"}, {"poly", poly_arg(poly)}};
      if (!phi.empty()) job["phi"] = file_or_inline(phi);
      if (A > 0) job["A"] = A;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  if (com.tol) job["tol"] = *com.tol;
  if (com.threads > 1) job["threads"] = com.threads;
  return emit(run_job(job, fs::current_path()), com);
}
