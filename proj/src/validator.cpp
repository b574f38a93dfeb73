// SPDX-License-Identifier: Apache-2.0
#include "strsolve/validator.hpp"

namespace strsolve {

const regex::Automaton& Evaluator::automaton(Term re) {
  auto it = cache_.find(re);
  if (it == cache_.end())
    it = cache_.emplace(re, std::make_unique<regex::Automaton>(regex::compile(tm_, re))).first;
  return *it->second;
}

Value Evaluator::evaluate(Term t, const Model& m) {
  auto str = [&](Term x) { return std::get<std::string>(evaluate(x, m)); };
  auto num = [&](Term x) { return std::get<std::int64_t>(evaluate(x, m)); };
  auto boolean = [&](Term x) { return std::get<bool>(evaluate(x, m)); };
  switch (tm_.kind(t)) {
    case Kind::StrConst: return tm_.text(t);
    case Kind::StrVar: {
      auto it = m.strings.find(t);
      if (it == m.strings.end()) throw EvaluationError("unbound string variable " + tm_.text(t));
      return it->second;
    }
    case Kind::Concat: {
      std::string s;
      for (Term p : tm_.children(t)) s += str(p);
      return s;
    }
    case Kind::Length: return static_cast<std::int64_t>(str(tm_.children(t)[0]).size());
    case Kind::IntConst: return tm_.int_value(t);
    case Kind::IntVar: {
      auto it = m.ints.find(t);
      if (it == m.ints.end()) throw EvaluationError("unbound integer variable " + tm_.text(t));
      return it->second;
    }
    case Kind::LinearSum: {
      std::int64_t s = tm_.int_value(t);
      auto kids = tm_.children(t);
      auto cs = tm_.coeffs(t);
      for (std::size_t i = 0; i < kids.size(); ++i) s += cs[i] * num(kids[i]);
      return s;
    }
    case Kind::BoolConst: return tm_.bool_value(t);
    case Kind::BoolVar: {
      auto it = m.bools.find(t);
      if (it == m.bools.end()) throw EvaluationError("unbound Boolean variable " + tm_.text(t));
      return it->second;
    }
    case Kind::Eq: {
      Term a = tm_.children(t)[0], b = tm_.children(t)[1];
      if (tm_.sort(a) == Sort::String) return str(a) == str(b);
      return num(a) == num(b);
    }
    case Kind::LessEq: return num(tm_.children(t)[0]) <= num(tm_.children(t)[1]);
    case Kind::InRe: return regex::accepts(automaton(tm_.children(t)[1]), str(tm_.children(t)[0]));
    case Kind::Not: return !boolean(tm_.children(t)[0]);
    case Kind::And:
      for (Term c : tm_.children(t))
        if (!boolean(c)) return false;
      return true;
    case Kind::Or:
      for (Term c : tm_.children(t))
        if (boolean(c)) return true;
      return false;
    default: throw EvaluationError("cannot evaluate a regular expression as a value");
  }
}

bool Evaluator::holds(Term formula, const Model& m) {
  Value v = evaluate(formula, m);
  if (!std::holds_alternative<bool>(v)) throw EvaluationError("assertion is not Boolean");
  return std::get<bool>(v);
}

Value evaluate(const TermManager& tm, Term t, const Model& m) {
  Evaluator e(tm);
  return e.evaluate(t, m);
}

ValidationResult validate(const TermManager& tm, std::span<const Term> assertions, const Model& m) {
  Evaluator e(tm);
  for (std::size_t i = 0; i < assertions.size(); ++i) {
    if (!e.holds(assertions[i], m)) {
      ValidationResult r;
      r.pass = false;
      r.failing = i;
      r.message = "assertion " + std::to_string(i + 1) + " is false under the model";
      return r;
    }
  }
  return {};
}

}  // namespace strsolve
