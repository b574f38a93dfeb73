// SPDX-License-Identifier: Apache-2.0
#include "strsolve/solver.hpp"

namespace strsolve {

using sat::Lit;

sat::EngineOptions engine_options(const SolverOptions& o) {
  sat::EngineOptions e;
  e.theory_branching = o.theory_branching;
  e.case_split = o.case_split;
  e.debug_checks = o.debug_checks;
  e.seed = o.seed;
  return e;
}

Solver::Solver(TermManager& tm, SolverOptions opts)
    : tm_(tm), engine_(engine_options(opts)), theory_(tm, engine_, opts.theory) {
  engine_.set_theory(&theory_);
}

Lit Solver::encode(Term f) {
  f = tm_.simplify(f);
  auto it = cache_.find(f);
  if (it != cache_.end()) return it->second;
  Lit out;
  switch (tm_.kind(f)) {
    case Kind::Not: out = ~encode(tm_.children(f)[0]); break;
    case Kind::And:
    case Kind::Or: {
      bool is_and = tm_.kind(f) == Kind::And;
      std::vector<Lit> kids;
      for (Term c : tm_.children(f)) kids.push_back(encode(c));
      out = Lit::pos(engine_.new_var());
      // out <-> and(kids), or out <-> or(kids) through De Morgan.
      Lit o = is_and ? out : ~out;
      std::vector<Lit> big{o};
      for (Lit k : kids) {
        Lit kk = is_and ? k : ~k;
        engine_.add_clause({~o, kk});
        big.push_back(~kk);
      }
      engine_.add_clause(big);
      break;
    }
    default: out = theory_.literal(f, AtomRole::Original); break;
  }
  cache_.emplace(f, out);
  return out;
}

void Solver::assert_formula(Term f) {
  f = tm_.simplify(f);
  if (tm_.kind(f) == Kind::And) {
    for (Term c : tm_.children(f)) assert_formula(c);
    return;
  }
  if (tm_.kind(f) == Kind::Or) {
    std::vector<Lit> clause;
    for (Term c : tm_.children(f)) clause.push_back(encode(c));
    engine_.add_clause(clause);
    return;
  }
  engine_.add_clause({encode(f)});
}

sat::SolveResult Solver::check(const sat::Budget& budget) { return engine_.solve(budget); }

Model Solver::model(std::span<const Term> vars) const {
  Model m;
  const auto& sm = theory_.string_model();
  const auto& im = theory_.int_model();
  for (Term v : vars) {
    switch (tm_.kind(v)) {
      case Kind::StrVar: {
        auto it = sm.find(v);
        m.strings[v] = it == sm.end() ? std::string() : it->second;
        break;
      }
      case Kind::IntVar: {
        auto it = im.find(v);
        m.ints[v] = it == im.end() ? 0 : it->second;
        break;
      }
      case Kind::BoolVar: {
        auto it = cache_.find(v);
        m.bools[v] = it != cache_.end() && engine_.value(it->second) == sat::LBool::True;
        break;
      }
      default: break;
    }
  }
  return m;
}

std::map<std::string, std::uint64_t> Solver::stats() const {
  const sat::Stats& s = engine_.stats();
  const TheoryStats& t = theory_.stats();
  return {
      {"decisions", s.decisions},
      {"conflicts", s.conflicts},
      {"propagations", s.propagations},
      {"restarts", s.restarts},
      {"case_split_decisions", s.case_split_decisions},
      {"theory_activity_overrides", s.theory_activity_overrides},
      {"final_checks", t.final_checks},
      {"splits", t.splits},
      {"length_rounds", t.length_rounds},
      {"unfolds", t.unfolds},
      {"blocking_lemmas", t.blocking_lemmas},
      {"overlaps", t.overlaps},
  };
}

}  // namespace strsolve
