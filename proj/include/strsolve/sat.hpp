// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace strsolve::sat {

using Var = std::uint32_t;

class Lit {
 public:
  constexpr Lit() = default;
  static constexpr Lit pos(Var v) { return Lit(v << 1); }
  static constexpr Lit neg(Var v) { return Lit((v << 1) | 1u); }
  static constexpr Lit from_index(std::uint32_t i) { return Lit(i); }

  constexpr Var var() const { return x_ >> 1; }
  /// True for the negative literal.
  constexpr bool negative() const { return (x_ & 1u) != 0; }
  constexpr std::uint32_t index() const { return x_; }
  constexpr bool valid() const { return x_ != kUndef; }
  constexpr Lit operator~() const { return Lit(x_ ^ 1u); }

  friend constexpr auto operator<=>(Lit, Lit) = default;

 private:
  static constexpr std::uint32_t kUndef = 0xffffffffu;
  constexpr explicit Lit(std::uint32_t x) : x_(x) {}
  std::uint32_t x_ = kUndef;
};

enum class LBool : std::uint8_t { False, True, Undef };

enum class ClauseOrigin : std::uint8_t {
  Original,
  Lemma,      // theory lemma or theory conflict
  Exclusion,  // pairwise at-most-one clause of an exclusive group
  Learned,
};

enum class Verdict : std::uint8_t { Sat, Unsat, Unknown, Timeout };

const char* verdict_name(Verdict v);

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  std::string reason;
};

struct Budget {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::optional<std::uint64_t> max_conflicts;

  bool expired() const { return deadline && std::chrono::steady_clock::now() >= *deadline; }
};

struct Stats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t case_split_decisions = 0;
  std::uint64_t theory_activity_overrides = 0;
};

struct CheckerReport {
  std::uint64_t checks = 0;
  std::uint64_t case_split_violations = 0;
  std::uint64_t maximality_violations = 0;
};

struct EngineOptions {
  bool theory_branching = true;
  bool case_split = true;
  bool debug_checks = false;
  std::optional<std::uint64_t> seed;
  double decay = 0.95;
  std::uint64_t restart_unit = 128;
};

class Engine;

/// Outcome of a final check on a total assignment.
struct FinalCheck {
  enum class Kind : std::uint8_t { Sat, Lemmas, Unknown, Timeout };
  Kind kind = Kind::Sat;
  std::vector<std::vector<Lit>> lemmas;
  std::string reason;
};

/// Callbacks through which the engine drives a theory solver.
class Theory {
 public:
  virtual ~Theory() = default;
  /// Literals newly assigned since the last call, in trail order. A returned
  /// clause must be falsified by the current assignment.
  virtual std::optional<std::vector<Lit>> on_assign(std::span<const Lit> lits) = 0;
  virtual void on_new_level() = 0;
  virtual void on_backjump(unsigned level) = 0;
  virtual FinalCheck final_check() = 0;
};

class CaseSplitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Engine {
 public:
  explicit Engine(EngineOptions opts = {});

  Var new_var();
  std::size_t num_vars() const { return assigns_.size(); }

  /// Adds a clause at any point; during search this may backjump.
  void add_clause(std::span<const Lit> lits, ClauseOrigin origin = ClauseOrigin::Original);
  void add_clause(std::initializer_list<Lit> lits, ClauseOrigin origin = ClauseOrigin::Original) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()), origin);
  }

  void set_theory_activity(Lit lit, double value);
  double theory_activity(Var v) const { return theory_act_[v]; }
  double base_activity(Var v) const { return base_act_[v]; }
  double activity_increment() const { return inc_; }
  /// Test hook.
  void set_base_activity(Var v, double value);

  /// Registers mutually exclusive literals: a case-split set, or pairwise
  /// exclusion clauses when case splits are disabled.
  void add_exclusive_group(std::span<const Lit> lits);
  /// Registers a case-split set regardless of configuration.
  std::size_t register_case_split(std::span<const Lit> lits);
  std::size_t num_case_split_sets() const { return sets_.size(); }
  const std::vector<Lit>& case_split_set(std::size_t id) const { return sets_[id]; }
  std::optional<std::size_t> case_split_of(Lit l) const;

  void set_theory(Theory* t) { theory_ = t; }
  SolveResult solve(const Budget& budget = {});

  LBool value(Lit l) const;
  LBool value(Var v) const { return assigns_[v]; }
  unsigned level_of(Var v) const { return level_[v]; }
  unsigned decision_level() const { return static_cast<unsigned>(trail_lim_.size()); }
  const std::vector<Lit>& trail() const { return trail_; }
  bool inconsistent() const { return unsat_; }

  const Stats& stats() const { return stats_; }
  const CheckerReport& checker() const { return checker_; }
  std::size_t num_clauses(ClauseOrigin origin) const;
  std::vector<std::vector<Lit>> clauses(ClauseOrigin origin) const;
  const EngineOptions& options() const { return opts_; }
  const Budget& budget() const { return budget_; }

  /// Called after each conflict with the learned clause and the increment
  /// used to bump it.
  using ConflictObserver = std::function<void(const std::vector<Lit>& learned, double bump)>;
  void set_conflict_observer(ConflictObserver f) { observer_ = std::move(f); }

 private:
  struct Clause {
    std::vector<Lit> lits;
    ClauseOrigin origin;
  };
  struct Reason {
    static constexpr std::uint32_t kNone = 0xffffffffu;
    std::uint32_t clause = kNone;
    Lit other;  // binary reason (l or other) when valid
  };

  double key(Var v) const;
  bool heap_less(Var a, Var b) const;
  void heap_insert(Var v);
  void heap_update(Var v);
  void heap_sift_up(std::size_t i);
  void heap_sift_down(std::size_t i);
  Var heap_pop();
  void heap_rebuild();

  void enqueue(Lit l, Reason r);
  std::optional<std::vector<Lit>> propagate();
  void backjump(unsigned level);
  void handle_conflict(std::vector<Lit> conflict);
  std::uint32_t attach(std::vector<Lit> lits, ClauseOrigin origin);
  std::vector<Lit> reason_lits(Lit p) const;
  void bump(Var v);
  std::optional<Lit> pick_branch();
  void decide(Lit l);
  void check_invariants();
  static double luby(double y, std::uint64_t x);

  EngineOptions opts_;
  Budget budget_;
  Theory* theory_ = nullptr;
  std::mt19937_64 rng_;

  std::vector<LBool> assigns_;
  std::vector<unsigned> level_;
  std::vector<Reason> reason_;
  std::vector<bool> saved_phase_;  // true = last value was True
  std::vector<double> base_act_;
  std::vector<double> theory_act_;
  double inc_ = 1.0;

  std::vector<Var> heap_;
  std::vector<std::int64_t> heap_pos_;

  std::vector<Clause> clauses_;
  std::vector<std::vector<std::uint32_t>> watches_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::size_t theory_head_ = 0;
  bool unsat_ = false;

  std::vector<std::vector<Lit>> sets_;
  std::vector<std::int64_t> set_of_;  // by literal index
  std::vector<Lit> true_member_;

  std::vector<bool> seen_;
  Stats stats_;
  CheckerReport checker_;
  ConflictObserver observer_;
};

}  // namespace strsolve::sat
