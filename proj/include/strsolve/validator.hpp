// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>

#include "strsolve/model.hpp"
#include "strsolve/regex.hpp"
#include "strsolve/term.hpp"

namespace strsolve {

using Value = std::variant<std::string, std::int64_t, bool>;

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bottom-up evaluation of terms under a model. Uses nothing but the term
/// structure and compiled automata.
class Evaluator {
 public:
  explicit Evaluator(const TermManager& tm) : tm_(tm) {}

  Value evaluate(Term t, const Model& m);
  bool holds(Term formula, const Model& m);

 private:
  const regex::Automaton& automaton(Term re);

  const TermManager& tm_;
  std::unordered_map<Term, std::unique_ptr<regex::Automaton>, TermHash> cache_;
};

struct ValidationResult {
  bool pass = true;
  std::optional<std::size_t> failing;  // index of the first false assertion
  std::string message;
};

Value evaluate(const TermManager& tm, Term t, const Model& m);
ValidationResult validate(const TermManager& tm, std::span<const Term> assertions, const Model& m);

}  // namespace strsolve
