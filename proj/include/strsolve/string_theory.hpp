// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "strsolve/eq_state.hpp"
#include "strsolve/length_arith.hpp"
#include "strsolve/regex.hpp"
#include "strsolve/sat.hpp"
#include "strsolve/term.hpp"

namespace strsolve {

/// Why the theory knows about an atom. Original atoms come from the input
/// and count under both polarities; the others are introduced by the theory
/// and only count when true.
enum class AtomRole : std::uint8_t { Original, Derived, Implied, LengthGuard, Unfold };

enum class ArrangementKind : std::uint8_t { AlignNoFresh, SplitLeft, SplitRight, ConstSplit };

const char* arrangement_name(ArrangementKind k);

struct Arrangement {
  ArrangementKind kind = ArrangementKind::AlignNoFresh;
  std::size_t index = 0;  // cut position for ConstSplit
  std::vector<std::pair<Term, Term>> implied;
  std::vector<Term> fresh;
  sat::Lit guard;
  double activity = 0.0;
};

struct SplitRecord {
  Term equation;
  std::vector<Arrangement> arrangements;
  std::optional<std::size_t> case_split_set;
};

struct LengthRound {
  Term var;
  std::int64_t lo = 0, hi = 0;
  std::vector<sat::Lit> guards;  // |var| = lo .. hi
  sat::Lit more;                 // |var| > hi
  std::optional<std::size_t> case_split_set;
};

struct TheoryOptions {
  std::int64_t initial_window = 3;
  std::int64_t max_length = 64;
  std::size_t max_splits = 4000;
  std::size_t max_word_nodes = 200000;
};

struct TheoryStats {
  std::uint64_t final_checks = 0;
  std::uint64_t splits = 0;
  std::uint64_t derived_equalities = 0;
  std::uint64_t length_rounds = 0;
  std::uint64_t unfolds = 0;
  std::uint64_t blocking_lemmas = 0;
  std::uint64_t theory_conflicts = 0;
  std::uint64_t overlaps = 0;
};

inline constexpr double kActivityAlign = 0.5;
inline constexpr double kActivityFresh = 0.1;
inline constexpr double kActivityConst = 0.2;
inline constexpr double kActivityMore = -0.1;

class StringTheory : public sat::Theory {
 public:
  StringTheory(TermManager& tm, sat::Engine& engine, TheoryOptions opts = {});
  ~StringTheory() override;

  /// Literal for an atom (Eq, LessEq, InRe or BoolVar), allocating a SAT
  /// variable on first use.
  sat::Lit literal(Term atom, AtomRole role = AtomRole::Original);
  std::optional<Term> atom_of(sat::Var v) const;
  std::optional<AtomRole> role_of(sat::Var v) const;

  std::optional<std::vector<sat::Lit>> on_assign(std::span<const sat::Lit> lits) override;
  void on_new_level() override;
  void on_backjump(unsigned level) override;
  sat::FinalCheck final_check() override;

  const std::vector<SplitRecord>& split_log() const { return splits_; }
  const std::vector<LengthRound>& length_log() const { return rounds_; }
  const TheoryStats& stats() const { return stats_; }

  /// Values from the last accepting final check.
  const std::map<Term, std::string>& string_model() const { return string_model_; }
  const std::map<Term, std::int64_t>& int_model() const { return int_model_; }

  const regex::Automaton& automaton(Term re);

 private:
  struct AtomInfo {
    Term atom;
    AtomRole role = AtomRole::Original;
  };
  struct Relevant {
    sat::Lit lit;  // the true literal
    Term atom;
    bool positive;
  };
  class Lengths;

  bool relevant(sat::Var v, bool positive) const;
  std::vector<Relevant> relevant_literals() const;
  std::optional<std::vector<sat::Lit>> assert_incremental(const Relevant& r);
  /// Length abstraction of one literal; returns the conflicting origins.
  std::optional<std::vector<arith::Origin>> assert_arith(Lengths& lengths, const Relevant& r);
  std::unique_ptr<Lengths> build_lengths(const std::vector<Relevant>& rel, std::vector<sat::Lit>& conflict);
  std::optional<std::size_t> exclusive(const std::vector<sat::Lit>& lits);

  void split_equation(Term eq, sat::Lit d, std::vector<std::vector<sat::Lit>>& lemmas);
  void emit_arrangements(Term eq, sat::Lit d, std::vector<Arrangement> arrs,
                         std::vector<std::vector<sat::Lit>>& lemmas);
  std::optional<sat::FinalCheck> propose_lengths(Term var, const std::vector<Relevant>& rel);
  bool overlap_active(const std::vector<Relevant>& rel) const;

  TermManager& tm_;
  sat::Engine& engine_;
  TheoryOptions opts_;

  sat::Var true_var_ = 0;
  std::vector<AtomInfo> atoms_;  // by SAT variable; invalid atom for non-atoms
  std::unordered_map<Term, sat::Var, TermHash> atom_var_;
  // Theory atom or guard -> conjunctions that justify it.
  std::unordered_map<sat::Var, std::vector<std::vector<sat::Lit>>> owners_;

  EqState eq_;
  std::unique_ptr<Lengths> lengths_;

  std::unordered_map<Term, std::unique_ptr<regex::Automaton>, TermHash> automata_;
  std::unordered_set<sat::Var> split_done_;
  std::unordered_set<sat::Var> overlap_;
  std::set<std::pair<sat::Var, std::int64_t>> unfolded_;
  std::map<Term, std::vector<std::size_t>> rounds_of_;

  std::vector<SplitRecord> splits_;
  std::vector<LengthRound> rounds_;
  TheoryStats stats_;
  std::map<Term, std::string> string_model_;
  std::map<Term, std::int64_t> int_model_;
};

}  // namespace strsolve
