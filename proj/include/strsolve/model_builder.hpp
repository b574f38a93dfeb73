// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strsolve/regex.hpp"
#include "strsolve/term.hpp"

namespace strsolve {

/// String constraints with every variable length already chosen.
struct WordProblem {
  std::map<Term, std::size_t> lengths;
  std::vector<std::pair<Term, Term>> equalities;
  std::vector<std::pair<Term, Term>> disequalities;
  struct Membership {
    Term subject;
    const regex::Automaton* automaton;
    bool positive;
  };
  std::vector<Membership> memberships;
};

struct WordLimits {
  std::size_t max_nodes = 200000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class WordStatus : std::uint8_t { Sat, Unsat, Aborted, Timeout };

struct WordResult {
  WordStatus status = WordStatus::Unsat;
  std::map<Term, std::string> values;
  std::size_t nodes = 0;
};

/// Finds character assignments for the fixed-length variables. Positions are
/// filled least character first, so unconstrained characters come out as the
/// smallest alphabet character.
WordResult solve_words(const TermManager& tm, const WordProblem& problem, const Alphabet& alphabet,
                       const WordLimits& limits = {});

}  // namespace strsolve
