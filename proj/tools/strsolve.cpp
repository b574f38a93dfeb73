// SPDX-License-Identifier: Apache-2.0
// Command-line driver: solve one script, or benchmark a set of scripts.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "strsolve/bench.hpp"

namespace fs = std::filesystem;
using namespace strsolve::bench;

int main(int argc, char** argv) {
  CLI::App app{"strsolve: string constraint solver"};
  std::vector<std::string> inputs;
  RunOptions opts;
  bool no_tb = false, no_cs = false, stats = false, compare = false;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::string csv;

  app.add_option("inputs", inputs, "SMT-LIB files or directories of .smt2 files")->required();
  app.add_option("--timeout", opts.timeout_s, "wall-clock budget per file in seconds")->capture_default_str();
  app.add_flag("--no-theory-branching", no_tb, "ignore theory activities when branching");
  app.add_flag("--no-case-split", no_cs, "encode exclusive choices with pairwise clauses");
  app.add_flag("--validate-model", opts.validate_model, "check sat models against the assertions");
  app.add_flag("--stats", stats, "print engine counters");
  app.add_flag("--model", opts.produce_model, "print the model after sat");
  app.add_flag("--compare", compare, "run with theory-aware features off and on");
  app.add_option("--jobs", jobs, "worker threads for multiple inputs")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "seed for initial phases");
  app.add_option("--csv", csv, "write per-file results as CSV");
  CLI11_PARSE(app, argc, argv);

  try {
    opts.alphabet = strsolve::Alphabet::from_env();
  } catch (const std::exception& e) {
    std::cerr << "strsolve: STRSOLVE_ALPHABET: " << e.what() << "\n";
    return 3;
  }
  opts.theory_branching = !no_tb;
  opts.case_split = !no_cs;
  if (*seed_opt) opts.seed = seed;

  std::vector<fs::path> files;
  bool suite = inputs.size() > 1;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      suite = true;
      auto more = list_scripts(in);
      files.insert(files.end(), more.begin(), more.end());
    } else {
      files.emplace_back(in);
    }
  }

  if (compare) {
    auto rows = run_compare(files, opts, jobs);
    std::cout << format_compare(rows, stats);
    return 0;
  }

  if (!suite) {
    RunReport r = run_file(files.at(0), opts);
    std::cout << outcome_name(r.verdict) << "\n";
    if (r.verdict == Outcome::Unknown) std::cout << "(:reason-unknown \"" << r.reason << "\")\n";
    if (r.verdict == Outcome::Error || r.verdict == Outcome::Crash) std::cout << "(error \"" << r.reason << "\")\n";
    if (!r.model.empty()) std::cout << r.model;
    if (r.validation && !*r.validation) std::cout << "(error \"model validation failed: " << r.validation_message << "\")\n";
    if (stats) std::cout << emit_stats(r);
    if (!csv.empty()) std::ofstream(csv) << to_csv({r});
    return exit_code(r);
  }

  auto reports = run_files(files, opts, jobs);
  for (const auto& r : reports) {
    std::cout << r.file << " " << outcome_name(r.verdict);
    char t[32];
    std::snprintf(t, sizeof t, " %.2f", r.time_s);
    std::cout << t << "\n";
    if (stats) std::cout << emit_stats(r);
  }
  SuiteSummary s = summarize(reports, opts.timeout_s);
  std::cout << format_summary(s);
  if (!csv.empty()) std::ofstream(csv) << to_csv(reports);
  return s.validation_failures ? 5 : 0;
}
