// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "strsolve/model.hpp"
#include "strsolve/sat.hpp"
#include "strsolve/string_theory.hpp"
#include "strsolve/term.hpp"

namespace strsolve {

struct SolverOptions {
  bool theory_branching = true;
  bool case_split = true;
  bool debug_checks = false;
  std::optional<std::uint64_t> seed;
  TheoryOptions theory;
};

/// One solving context: the SAT engine, the string theory and the Boolean
/// encoding of the assertions.
class Solver {
 public:
  explicit Solver(TermManager& tm, SolverOptions opts = {});

  void assert_formula(Term f);
  sat::SolveResult check(const sat::Budget& budget = {});

  /// Values for the given variables after a sat answer. Variables the
  /// solver never saw get "" / 0 / false.
  Model model(std::span<const Term> vars) const;

  const sat::Engine& engine() const { return engine_; }
  sat::Engine& engine() { return engine_; }
  const StringTheory& theory() const { return theory_; }
  StringTheory& theory() { return theory_; }

  /// Flat counters from the engine and the theory.
  std::map<std::string, std::uint64_t> stats() const;

 private:
  sat::Lit encode(Term f);

  TermManager& tm_;
  sat::Engine engine_;
  StringTheory theory_;
  std::unordered_map<Term, sat::Lit, TermHash> cache_;
};

sat::EngineOptions engine_options(const SolverOptions& o);

}  // namespace strsolve
