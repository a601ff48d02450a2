#pragma once

#include "hypobv/errors.hpp"
#include "hypobv/jsonio.hpp"

#include <filesystem>
#include <string>

namespace hypobv {

inline constexpr const char* kReportSchema = "hypobv-report/1";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_verdict = 2,   // an asserted identity or expectation failed
  exit_numeric = 3,   // quadrature, extrapolation or root finding did not converge
  exit_input = 64,    // malformed job or invalid input
  exit_file = 66,
};

int exit_code_for(ErrorKind k);

struct JobOutcome {
  json report;
  int exit_code = exit_ok;
};

// Runs one job object. Relative paths inside the job resolve against base_dir.
JobOutcome run_job(const json& job, const std::filesystem::path& base_dir);
JobOutcome run_job_file(const std::filesystem::path& path);

struct SuiteOutcome {
  json report;
  int exit_code = exit_ok;
  std::string table;  // one line per job
  bool empty = false;
};

// Every *.json in dir, sorted by name; jobs run concurrently on `threads` workers.
SuiteOutcome run_suite(const std::filesystem::path& dir, int threads = 1);

}  // namespace hypobv
