// SPDX-License-Identifier: Apache-2.0
#include "strsolve/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "strsolve/smtlib.hpp"
#include "strsolve/solver.hpp"
#include "strsolve/validator.hpp"

namespace strsolve::bench {

namespace fs = std::filesystem;

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Sat: return "sat";
    case Outcome::Unsat: return "unsat";
    case Outcome::Unknown: return "unknown";
    case Outcome::Timeout: return "timeout";
    case Outcome::Error: return "error";
    case Outcome::Crash: return "crash";
  }
  return "?";
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Outcome from_verdict(sat::Verdict v) {
  switch (v) {
    case sat::Verdict::Sat: return Outcome::Sat;
    case sat::Verdict::Unsat: return Outcome::Unsat;
    case sat::Verdict::Unknown: return Outcome::Unknown;
    case sat::Verdict::Timeout: return Outcome::Timeout;
  }
  return Outcome::Crash;
}

void solve_into(RunReport& rep, std::string_view text, const RunOptions& opts) {
  TermManager tm(opts.alphabet);
  smtlib::Elaborated el;
  try {
    el = smtlib::load(tm, text);
  } catch (const smtlib::ParseError& e) {
    rep.verdict = Outcome::Error;
    rep.reason = e.what();
    return;
  }
  for (const char* k : kStatKeys) rep.stats[k] = 0;
  if (el.unsupported) {
    rep.verdict = Outcome::Unknown;
    rep.reason = "unsupported operator " + *el.unsupported;
    return;
  }

  SolverOptions so;
  so.theory_branching = opts.theory_branching;
  so.case_split = opts.case_split;
  so.debug_checks = opts.debug_checks;
  so.seed = opts.seed;
  so.theory = opts.theory;

  auto start = std::chrono::steady_clock::now();
  sat::Budget budget;
  budget.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(opts.timeout_s));
  Solver solver(tm, so);
  for (Term a : el.assertions) solver.assert_formula(a);
  sat::SolveResult res = solver.check(budget);
  rep.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  rep.verdict = from_verdict(res.verdict);
  rep.reason = res.reason;
  rep.stats = solver.stats();
  rep.case_split_violations = solver.engine().checker().case_split_violations;
  rep.invariant_checks = solver.engine().checker().checks;
  if (rep.verdict == Outcome::Timeout) rep.time_s = opts.timeout_s;
  if (rep.verdict != Outcome::Sat) return;

  std::vector<Term> vars;
  for (const auto& d : el.declarations) vars.push_back(d.second);
  Model m = solver.model(vars);
  if (opts.validate_model) {
    ValidationResult v = validate(tm, el.assertions, m);
    rep.validation = v.pass;
    rep.validation_message = v.message;
  }
  if (opts.produce_model || el.get_model) rep.model = smtlib::print_model(tm, el.declarations, m);
}

}  // namespace

RunReport run_script(std::string_view text, const RunOptions& opts, std::string name) {
  RunReport rep;
  rep.file = std::move(name);
  try {
    solve_into(rep, text, opts);
  } catch (const std::exception& e) {
    rep.verdict = Outcome::Crash;
    rep.reason = e.what();
  } catch (...) {
    rep.verdict = Outcome::Crash;
    rep.reason = "unknown exception";
  }
  return rep;
}

RunReport run_file(const fs::path& path, const RunOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    RunReport rep;
    rep.file = path.string();
    rep.verdict = Outcome::Error;
    rep.reason = "cannot read " + path.string();
    return rep;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_script(buf.str(), opts, path.string());
}

SuiteSummary summarize(const std::vector<RunReport>& reports, double timeout_s) {
  SuiteSummary s;
  for (Outcome o : kOutcomes) s.counts[o] = 0;
  for (const RunReport& r : reports) {
    ++s.counts[r.verdict];
    double t = r.verdict == Outcome::Timeout ? timeout_s : r.time_s;
    s.total_time_s += t;
    if (r.verdict != Outcome::Timeout) s.total_without_timeouts_s += t;
    if (r.validation && !*r.validation) ++s.validation_failures;
  }
  return s;
}

std::vector<fs::path> list_scripts(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".smt2") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RunReport> run_files(const std::vector<fs::path>& files, const RunOptions& opts, unsigned jobs) {
  std::vector<RunReport> out(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < files.size();) out[i] = run_file(files[i], opts);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(files.size(), 1))));
  if (jobs == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

SuiteResult run_suite(const fs::path& dir, const RunOptions& opts, unsigned jobs) {
  SuiteResult r;
  r.reports = run_files(list_scripts(dir), opts, jobs);
  r.summary = summarize(r.reports, opts.timeout_s);
  return r;
}

std::string format_summary(const SuiteSummary& s) {
  std::ostringstream os;
  char line[128];
  for (Outcome o : kOutcomes) {
    auto it = s.counts.find(o);
    std::snprintf(line, sizeof line, "%-34s %zu\n", outcome_name(o), it == s.counts.end() ? std::size_t(0) : it->second);
    os << line;
  }
  std::snprintf(line, sizeof line, "%-34s %s\n", "Total time (s)", fixed2(s.total_time_s).c_str());
  os << line;
  std::snprintf(line, sizeof line, "%-34s %s\n", "Total time without timeouts (s)",
                fixed2(s.total_without_timeouts_s).c_str());
  os << line;
  return os.str();
}

std::string to_csv(const std::vector<RunReport>& reports) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  auto stat = [](const RunReport& r, const char* k) {
    auto it = r.stats.find(k);
    return it == r.stats.end() ? std::uint64_t(0) : it->second;
  };
  std::ostringstream os;
  os << "file,verdict,time,decisions,conflicts\n";
  for (const RunReport& r : reports)
    os << field(r.file) << ',' << outcome_name(r.verdict) << ',' << fixed2(r.time_s) << ','
       << stat(r, "decisions") << ',' << stat(r, "conflicts") << '\n';
  return os.str();
}

std::string emit_stats(const RunReport& r) {
  std::ostringstream os;
  for (const char* k : kStatKeys) {
    auto it = r.stats.find(k);
    os << k << '=' << (it == r.stats.end() ? 0 : it->second) << '\n';
  }
  return os.str();
}

std::vector<CompareRow> run_compare(const std::vector<fs::path>& files, const RunOptions& opts, unsigned jobs) {
  RunOptions off = opts, on = opts;
  off.theory_branching = off.case_split = false;
  on.theory_branching = on.case_split = true;
  auto base = run_files(files, off, jobs);
  auto enabled = run_files(files, on, jobs);
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < files.size(); ++i) rows.push_back({std::move(base[i]), std::move(enabled[i])});
  return rows;
}

std::string format_compare(const std::vector<CompareRow>& rows, bool with_stats) {
  std::ostringstream os;
  os << "file,baseline_verdict,baseline_decisions,enabled_verdict,enabled_decisions\n";
  for (const CompareRow& r : rows) {
    auto dec = [](const RunReport& x) {
      auto it = x.stats.find("decisions");
      return it == x.stats.end() ? std::uint64_t(0) : it->second;
    };
    os << r.enabled.file << ',' << outcome_name(r.baseline.verdict) << ',' << dec(r.baseline) << ','
       << outcome_name(r.enabled.verdict) << ',' << dec(r.enabled) << '\n';
    if (with_stats) os << "[baseline]\n" << emit_stats(r.baseline) << "[enabled]\n" << emit_stats(r.enabled);
  }
  return os.str();
}

int exit_code(const RunReport& r) {
  if (r.validation && !*r.validation) return 5;
  switch (r.verdict) {
    case Outcome::Sat:
    case Outcome::Unsat:
    case Outcome::Unknown: return 0;
    case Outcome::Timeout: return 2;
    case Outcome::Error: return 3;
    case Outcome::Crash: return 4;
  }
  return 4;
}

}  // namespace strsolve::bench
