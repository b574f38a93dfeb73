// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "strsolve/string_theory.hpp"
#include "strsolve/term.hpp"

namespace strsolve::bench {

enum class Outcome : std::uint8_t { Sat, Unsat, Unknown, Timeout, Error, Crash };

inline constexpr std::array<Outcome, 6> kOutcomes = {Outcome::Sat,     Outcome::Unsat, Outcome::Unknown,
                                                     Outcome::Timeout, Outcome::Error, Outcome::Crash};

const char* outcome_name(Outcome o);

struct RunOptions {
  double timeout_s = 20.0;
  bool theory_branching = true;
  bool case_split = true;
  bool validate_model = false;
  /// Render the model after a sat answer even without (get-model).
  bool produce_model = false;
  bool debug_checks = false;
  std::optional<std::uint64_t> seed;
  Alphabet alphabet = Alphabet::from_env();
  TheoryOptions theory;
};

struct RunReport {
  std::string file;
  Outcome verdict = Outcome::Error;
  std::string reason;  // unknown reason or error message
  double time_s = 0.0;
  std::map<std::string, std::uint64_t> stats;
  std::optional<bool> validation;  // set when validation ran
  std::string validation_message;
  std::string model;  // SMT-LIB model text when requested and sat
  std::uint64_t case_split_violations = 0;
  std::uint64_t invariant_checks = 0;  // debug checker passes
};

/// Parses and solves one script. Never throws.
RunReport run_script(std::string_view text, const RunOptions& opts, std::string name = "");
RunReport run_file(const std::filesystem::path& path, const RunOptions& opts);

struct SuiteSummary {
  std::map<Outcome, std::size_t> counts;
  double total_time_s = 0.0;
  double total_without_timeouts_s = 0.0;
  std::size_t validation_failures = 0;
};

SuiteSummary summarize(const std::vector<RunReport>& reports, double timeout_s);

/// .smt2 files directly under dir, sorted by name.
std::vector<std::filesystem::path> list_scripts(const std::filesystem::path& dir);

/// Runs files on `jobs` worker threads; reports keep the input order.
std::vector<RunReport> run_files(const std::vector<std::filesystem::path>& files, const RunOptions& opts,
                                 unsigned jobs = 1);

struct SuiteResult {
  std::vector<RunReport> reports;
  SuiteSummary summary;
};
SuiteResult run_suite(const std::filesystem::path& dir, const RunOptions& opts, unsigned jobs = 1);

std::string format_summary(const SuiteSummary& s);
std::string to_csv(const std::vector<RunReport>& reports);
/// Stable key=value lines for the six engine counters.
std::string emit_stats(const RunReport& r);

struct CompareRow {
  RunReport baseline;  // theory-aware branching and case splits off
  RunReport enabled;   // both on
};
std::vector<CompareRow> run_compare(const std::vector<std::filesystem::path>& files, const RunOptions& opts,
                                    unsigned jobs = 1);
std::string format_compare(const std::vector<CompareRow>& rows, bool with_stats);

/// 0 sat/unsat/unknown, 2 timeout, 3 error, 4 crash, 5 failed model validation.
int exit_code(const RunReport& r);

inline constexpr const char* kStatKeys[] = {"decisions", "conflicts", "propagations", "restarts",
                                            "case_split_decisions", "theory_activity_overrides"};

}  // namespace strsolve::bench
