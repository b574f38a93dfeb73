// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "strsolve/sat.hpp"
#include "strsolve/term.hpp"

namespace strsolve {

/// Union-find over string terms with per-class constants, disequalities,
/// path explanations and undo.
class EqState {
 public:
  using Explanation = std::vector<sat::Lit>;

  explicit EqState(const TermManager& tm) : tm_(tm) {}

  /// Merges the classes of a and b; returns a conflict explanation when the
  /// merged class holds two distinct constants or violates a disequality.
  std::optional<Explanation> merge(Term a, Term b, sat::Lit why);
  std::optional<Explanation> add_diseq(Term a, Term b, sat::Lit why);

  Term find(Term t);
  bool same_class(Term a, Term b);
  /// Literals on a path of merges connecting a and b (which must be in one class).
  Explanation explain(Term a, Term b) const;
  std::optional<Term> constant_of(Term t);

  /// Members of every class with at least two terms, each ordered by id.
  std::vector<std::vector<Term>> classes();

  void push();
  void pop(std::size_t levels);
  std::size_t scope_level() const { return scopes_.size(); }

 private:
  struct Edge {
    std::uint32_t a, b;
    sat::Lit why;
  };
  struct Diseq {
    std::uint32_t a, b;
    sat::Lit why;
  };
  struct Undo {
    enum class Kind : std::uint8_t { Union, Edge, Diseq } kind;
    std::uint32_t child = 0, root = 0;
    Term old_const{};
    std::uint32_t old_size = 0;
  };

  std::uint32_t node(Term t);
  std::uint32_t root(std::uint32_t n) const;
  std::optional<Explanation> check_diseqs();

  const TermManager& tm_;
  std::unordered_map<Term, std::uint32_t, TermHash> index_;
  std::vector<Term> terms_;
  std::vector<std::uint32_t> parent_, size_;
  std::vector<Term> const_;
  std::vector<std::vector<std::uint32_t>> adj_;  // edge ids
  std::vector<Edge> edges_;
  std::vector<Diseq> diseqs_;
  std::vector<Undo> undo_;
  std::vector<std::size_t> scopes_;
};

}  // namespace strsolve
