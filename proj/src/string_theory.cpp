// SPDX-License-Identifier: Apache-2.0
#include "strsolve/string_theory.hpp"

#include <algorithm>
#include <stdexcept>

#include "strsolve/model_builder.hpp"
#include "strsolve/validator.hpp"

namespace strsolve {

using sat::FinalCheck;
using sat::LBool;
using sat::Lit;

const char* arrangement_name(ArrangementKind k) {
  switch (k) {
    case ArrangementKind::AlignNoFresh: return "align";
    case ArrangementKind::SplitLeft: return "split-left";
    case ArrangementKind::SplitRight: return "split-right";
    case ArrangementKind::ConstSplit: return "const-split";
  }
  return "?";
}

/// Length variables for string and integer atoms on top of a LengthArith.
class StringTheory::Lengths {
 public:
  explicit Lengths(TermManager& tm) : tm_(tm) {}

  arith::LengthArith la;

  arith::VarId var(Term atom) {
    auto it = ids_.find(atom);
    if (it != ids_.end()) return it->second;
    arith::VarKind k = arith::VarKind::Int;
    if (tm_.kind(atom) == Kind::Length)
      k = tm_.is_fresh(tm_.children(atom)[0]) ? arith::VarKind::Fresh : arith::VarKind::Length;
    arith::VarId id = la.new_var(k);
    ids_.emplace(atom, id);
    return id;
  }

  std::optional<arith::VarId> find(Term atom) const {
    auto it = ids_.find(atom);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  void touch(Term t) {
    for (Term v : tm_.free_vars(t)) {
      if (tm_.kind(v) == Kind::StrVar) var(tm_.length(v));
      else if (tm_.kind(v) == Kind::IntVar) var(v);
    }
  }

  std::optional<std::vector<arith::Origin>> assert_form(const LinearForm& f, arith::Rel rel, arith::Origin o) {
    if (f.is_constant()) {
      std::int64_t c = f.constant;
      bool ok = false;
      switch (rel) {
        case arith::Rel::Eq: ok = c == 0; break;
        case arith::Rel::Le: ok = c <= 0; break;
        case arith::Rel::Lt: ok = c < 0; break;
        case arith::Rel::Ge: ok = c >= 0; break;
        case arith::Rel::Gt: ok = c > 0; break;
        case arith::Rel::Ne: ok = c != 0; break;
      }
      if (ok) return std::nullopt;
      return std::vector<arith::Origin>{o};
    }
    arith::LinearConstraint c;
    for (const auto& [a, k] : f.coeffs) c.terms.emplace_back(var(a), k);
    c.constant = f.constant;
    c.rel = rel;
    c.origin = o;
    return la.assert_linear(std::move(c));
  }

 private:
  TermManager& tm_;
  std::map<Term, arith::VarId> ids_;
};

StringTheory::StringTheory(TermManager& tm, sat::Engine& engine, TheoryOptions opts)
    : tm_(tm), engine_(engine), opts_(opts), eq_(tm), lengths_(std::make_unique<Lengths>(tm)) {
  true_var_ = engine_.new_var();
  engine_.add_clause({Lit::pos(true_var_)});
}

StringTheory::~StringTheory() = default;

const regex::Automaton& StringTheory::automaton(Term re) {
  auto it = automata_.find(re);
  if (it == automata_.end())
    it = automata_.emplace(re, std::make_unique<regex::Automaton>(regex::compile(tm_, re))).first;
  return *it->second;
}

Lit StringTheory::literal(Term atom, AtomRole role) {
  switch (tm_.kind(atom)) {
    case Kind::BoolConst: return tm_.bool_value(atom) ? Lit::pos(true_var_) : Lit::neg(true_var_);
    case Kind::BoolVar:
    case Kind::Eq:
    case Kind::LessEq:
    case Kind::InRe: break;
    default: throw std::logic_error("literal: not an atom");
  }
  auto it = atom_var_.find(atom);
  if (it != atom_var_.end()) {
    if (role == AtomRole::Original) atoms_[it->second].role = AtomRole::Original;
    return Lit::pos(it->second);
  }
  sat::Var v = engine_.new_var();
  if (atoms_.size() <= v) atoms_.resize(v + 1);
  atoms_[v] = AtomInfo{atom, role};
  atom_var_.emplace(atom, v);
  return Lit::pos(v);
}

std::optional<Term> StringTheory::atom_of(sat::Var v) const {
  if (v >= atoms_.size() || !atoms_[v].atom.valid()) return std::nullopt;
  return atoms_[v].atom;
}

std::optional<AtomRole> StringTheory::role_of(sat::Var v) const {
  if (v >= atoms_.size() || !atoms_[v].atom.valid()) return std::nullopt;
  return atoms_[v].role;
}

bool StringTheory::relevant(sat::Var v, bool positive) const {
  if (v >= atoms_.size() || !atoms_[v].atom.valid()) return false;
  if (tm_.kind(atoms_[v].atom) == Kind::BoolVar) return false;
  return atoms_[v].role == AtomRole::Original || positive;
}

std::vector<StringTheory::Relevant> StringTheory::relevant_literals() const {
  // A theory-introduced atom or guard counts once one of its justifications
  // is fully live; input atoms are live as assigned.
  std::size_t n = engine_.num_vars();
  std::vector<char> live(2 * n, 0);
  auto is_live = [&](Lit l) { return l.index() < live.size() && live[l.index()]; };
  for (bool changed = true; changed;) {
    changed = false;
    for (sat::Var v = 0; v < n; ++v) {
      LBool val = engine_.value(v);
      if (val == LBool::Undef) continue;
      Lit l = val == LBool::True ? Lit::pos(v) : Lit::neg(v);
      if (live[l.index()]) continue;
      auto it = owners_.find(v);
      bool ok = it == owners_.end() || (v < atoms_.size() && atoms_[v].atom.valid() && atoms_[v].role == AtomRole::Original);
      if (!ok)
        for (const auto& conj : it->second)
          if (std::all_of(conj.begin(), conj.end(), is_live)) {
            ok = true;
            break;
          }
      if (ok) live[l.index()] = changed = true;
    }
  }
  std::vector<Relevant> out;
  for (sat::Var v = 0; v < atoms_.size(); ++v) {
    LBool val = engine_.value(v);
    if (val == LBool::Undef) continue;
    bool positive = val == LBool::True;
    Lit l = positive ? Lit::pos(v) : Lit::neg(v);
    if (!relevant(v, positive) || !live[l.index()]) continue;
    out.push_back(Relevant{l, atoms_[v].atom, positive});
  }
  // Length guards only matter for variables something else still mentions.
  std::unordered_set<Term, TermHash> mentioned;
  for (const Relevant& r : out)
    if (atoms_[r.lit.var()].role != AtomRole::LengthGuard)
      for (Term x : tm_.free_vars(r.atom)) mentioned.insert(x);
  std::erase_if(out, [&](const Relevant& r) {
    if (atoms_[r.lit.var()].role != AtomRole::LengthGuard) return false;
    for (Term x : tm_.free_vars(r.atom))
      if (!mentioned.count(x)) return true;
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// incremental reasoning

std::optional<std::vector<arith::Origin>> StringTheory::assert_arith(Lengths& L, const Relevant& r) {
  using arith::Rel;
  Term a = r.atom;
  auto origin = static_cast<arith::Origin>(r.lit.index());
  L.touch(a);
  switch (tm_.kind(a)) {
    case Kind::Eq: {
      Term x = tm_.children(a)[0], y = tm_.children(a)[1];
      LinearForm f;
      if (tm_.sort(x) == Sort::String) {
        if (!r.positive) return std::nullopt;
        f = tm_.linearize(tm_.length(x));
        f.add(tm_.linearize(tm_.length(y)), -1);
      } else {
        f = tm_.linearize(x);
        f.add(tm_.linearize(y), -1);
      }
      return L.assert_form(f, r.positive ? Rel::Eq : Rel::Ne, origin);
    }
    case Kind::LessEq: {
      LinearForm f = tm_.linearize(tm_.children(a)[0]);
      f.add(tm_.linearize(tm_.children(a)[1]), -1);
      return L.assert_form(f, r.positive ? Rel::Le : Rel::Gt, origin);
    }
    case Kind::InRe: {
      if (!r.positive) return std::nullopt;
      auto min = regex::min_accepted_length(automaton(tm_.children(a)[1]));
      if (!min) return std::vector<arith::Origin>{origin};
      LinearForm f = tm_.linearize(tm_.length(tm_.children(a)[0]));
      f.constant -= static_cast<std::int64_t>(*min);
      return L.assert_form(f, Rel::Ge, origin);
    }
    default: return std::nullopt;
  }
}

namespace {

std::vector<Lit> negate(const std::vector<Lit>& why) {
  std::vector<Lit> out;
  out.reserve(why.size());
  for (Lit l : why) out.push_back(~l);
  return out;
}

std::vector<Lit> negate_origins(const std::vector<arith::Origin>& os) {
  std::vector<Lit> out;
  for (arith::Origin o : os)
    if (o != arith::kAxiom) out.push_back(~Lit::from_index(static_cast<std::uint32_t>(o)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::optional<std::vector<Lit>> StringTheory::assert_incremental(const Relevant& r) {
  Term a = r.atom;
  if (tm_.kind(a) == Kind::Eq && tm_.sort(tm_.children(a)[0]) == Sort::String) {
    Term x = tm_.children(a)[0], y = tm_.children(a)[1];
    auto ex = r.positive ? eq_.merge(x, y, r.lit) : eq_.add_diseq(x, y, r.lit);
    if (ex) {
      ++stats_.theory_conflicts;
      return negate(*ex);
    }
  }
  if (tm_.kind(a) == Kind::InRe) {
    Term s = tm_.children(a)[0];
    if (tm_.kind(s) == Kind::StrConst) {
      bool in = regex::accepts(automaton(tm_.children(a)[1]), tm_.text(s));
      if (in != r.positive) {
        ++stats_.theory_conflicts;
        return std::vector<Lit>{~r.lit};
      }
    }
  }
  if (auto os = assert_arith(*lengths_, r)) {
    ++stats_.theory_conflicts;
    return negate_origins(*os);
  }
  return std::nullopt;
}

std::optional<std::vector<Lit>> StringTheory::on_assign(std::span<const Lit> lits) {
  for (Lit l : lits) {
    sat::Var v = l.var();
    if (!relevant(v, !l.negative())) continue;
    Relevant r{l, atoms_[v].atom, !l.negative()};
    if (auto c = assert_incremental(r)) return c;
  }
  return std::nullopt;
}

void StringTheory::on_new_level() {
  eq_.push();
  lengths_->la.push();
}

void StringTheory::on_backjump(unsigned level) {
  if (eq_.scope_level() > level) eq_.pop(eq_.scope_level() - level);
  if (lengths_->la.scope_level() > level) lengths_->la.pop(lengths_->la.scope_level() - level);
}

// ---------------------------------------------------------------------------
// splitting

std::optional<std::size_t> StringTheory::exclusive(const std::vector<Lit>& lits) {
  if (lits.empty()) return std::nullopt;
  if (engine_.options().case_split) {
    try {
      return engine_.register_case_split(lits);
    } catch (const sat::CaseSplitError&) {
      // A member is already in another set; fall back to explicit clauses.
    }
  }
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = i + 1; j < lits.size(); ++j)
      engine_.add_clause({~lits[i], ~lits[j]}, sat::ClauseOrigin::Exclusion);
  return std::nullopt;
}

namespace {

bool mentions(const std::vector<Term>& side, Term v) { return std::find(side.begin(), side.end(), v) != side.end(); }

}  // namespace

void StringTheory::split_equation(Term eq, Lit d, std::vector<std::vector<Lit>>& lemmas) {
  std::vector<Term> L = tm_.parts(tm_.children(eq)[0]);
  std::vector<Term> R = tm_.parts(tm_.children(eq)[1]);
  bool stripped = false;

  // Common prefix.
  while (!L.empty() && !R.empty()) {
    if (L.front() == R.front()) {
      L.erase(L.begin());
      R.erase(R.begin());
      stripped = true;
      continue;
    }
    if (tm_.kind(L.front()) == Kind::StrConst && tm_.kind(R.front()) == Kind::StrConst) {
      const std::string& a = tm_.text(L.front());
      const std::string& b = tm_.text(R.front());
      std::size_t p = 0;
      while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
      if (p == 0) {
        lemmas.push_back({~d});
        return;
      }
      std::string ra = a.substr(p), rb = b.substr(p);
      L.erase(L.begin());
      R.erase(R.begin());
      if (!ra.empty()) L.insert(L.begin(), tm_.str_const(ra));
      if (!rb.empty()) R.insert(R.begin(), tm_.str_const(rb));
      stripped = true;
      continue;
    }
    break;
  }
  // Common suffix.
  while (!L.empty() && !R.empty()) {
    if (L.back() == R.back()) {
      L.pop_back();
      R.pop_back();
      stripped = true;
      continue;
    }
    if (tm_.kind(L.back()) == Kind::StrConst && tm_.kind(R.back()) == Kind::StrConst) {
      const std::string& a = tm_.text(L.back());
      const std::string& b = tm_.text(R.back());
      std::size_t p = 0;
      while (p < a.size() && p < b.size() && a[a.size() - 1 - p] == b[b.size() - 1 - p]) ++p;
      if (p == 0) {
        lemmas.push_back({~d});
        return;
      }
      std::string ra = a.substr(0, a.size() - p), rb = b.substr(0, b.size() - p);
      L.pop_back();
      R.pop_back();
      if (!ra.empty()) L.push_back(tm_.str_const(ra));
      if (!rb.empty()) R.push_back(tm_.str_const(rb));
      stripped = true;
      continue;
    }
    break;
  }

  auto has_const = [&](const std::vector<Term>& side) {
    return std::any_of(side.begin(), side.end(), [&](Term t) { return tm_.kind(t) == Kind::StrConst; });
  };
  if ((L.empty() && has_const(R)) || (R.empty() && has_const(L))) {
    lemmas.push_back({~d});
    return;
  }
  if (stripped) {
    Term e = tm_.simplify(tm_.eq(tm_.concat(L), tm_.concat(R)));
    if (tm_.kind(e) == Kind::BoolConst) {
      if (!tm_.bool_value(e)) lemmas.push_back({~d});
      return;
    }
    Lit de = literal(e, AtomRole::Derived);
    owners_[de.var()].push_back({d});
    lemmas.push_back({~d, de});
    ++stats_.derived_equalities;
    return;
  }

  // A lone variable on one side defines it.
  auto lone_var = [&](const std::vector<Term>& side) { return side.size() == 1 && tm_.kind(side[0]) == Kind::StrVar; };
  if (lone_var(L) || lone_var(R)) {
    Term v = lone_var(L) ? L[0] : R[0];
    if (mentions(lone_var(L) ? R : L, v)) {
      overlap_.insert(d.var());
      ++stats_.overlaps;
    }
    return;
  }
  for (Term t : L)
    if (tm_.kind(t) == Kind::StrVar && mentions(R, t)) {
      overlap_.insert(d.var());
      ++stats_.overlaps;
      return;
    }

  std::vector<Arrangement> arrs;
  auto tail = [&](const std::vector<Term>& side) {
    return side.empty() ? tm_.empty_str() : tm_.concat(std::span<const Term>(side).subspan(1));
  };
  auto add = [&](ArrangementKind k, std::size_t idx, std::vector<std::pair<Term, Term>> implied,
                 std::vector<Term> fresh, double act) {
    Arrangement a;
    a.kind = k;
    a.index = idx;
    a.implied = std::move(implied);
    a.fresh = std::move(fresh);
    a.activity = act;
    arrs.push_back(std::move(a));
  };

  bool lvar = !L.empty() && tm_.kind(L[0]) == Kind::StrVar;
  bool rvar = !R.empty() && tm_.kind(R[0]) == Kind::StrVar;
  if (lvar && rvar) {
    Term x = L[0], a = R[0], lt = tail(L), rt = tail(R);
    add(ArrangementKind::AlignNoFresh, 0, {{x, a}, {lt, rt}}, {}, kActivityAlign);
    Term s1 = tm_.fresh_str_var();
    add(ArrangementKind::SplitLeft, 0, {{x, tm_.concat({a, s1})}, {tm_.concat({s1, lt}), rt}}, {s1}, kActivityFresh);
    Term s2 = tm_.fresh_str_var();
    add(ArrangementKind::SplitRight, 0, {{tm_.concat({x, s2}), a}, {lt, tm_.concat({s2, rt})}}, {s2}, kActivityFresh);
  } else {
    // Variable head against a constant head (or against nothing).
    const std::vector<Term>& vs = lvar ? L : R;
    const std::vector<Term>& cs = lvar ? R : L;
    Term x = vs[0], lt = tail(vs);
    std::string c = cs.empty() ? std::string() : tm_.text(cs[0]);
    Term rt = cs.empty() ? tm_.empty_str() : tail(cs);
    for (std::size_t i = 0; i <= c.size(); ++i) {
      Term pre = tm_.str_const(c.substr(0, i));
      Term rest = tm_.concat({tm_.str_const(c.substr(i)), rt});
      add(ArrangementKind::ConstSplit, i, {{x, pre}, {lt, rest}}, {}, kActivityConst);
    }
    if (cs.size() > 1) {
      Term s = tm_.fresh_str_var();
      add(ArrangementKind::SplitLeft, 0, {{x, tm_.concat({tm_.str_const(c), s})}, {tm_.concat({s, lt}), rt}}, {s},
          kActivityFresh);
    }
  }
  emit_arrangements(eq, d, std::move(arrs), lemmas);
}

void StringTheory::emit_arrangements(Term eq, Lit d, std::vector<Arrangement> arrs,
                                     std::vector<std::vector<Lit>>& lemmas) {
  auto impossible_empty = [&](Term e) {
    // t = "" where t has a non-empty constant or a fresh (non-empty) variable.
    Term x = tm_.children(e)[0], y = tm_.children(e)[1];
    Term other;
    if (tm_.kind(x) == Kind::StrConst && tm_.text(x).empty()) other = y;
    else if (tm_.kind(y) == Kind::StrConst && tm_.text(y).empty()) other = x;
    else return false;
    for (Term p : tm_.parts(other))
      if (tm_.kind(p) == Kind::StrConst || tm_.is_fresh(p)) return true;
    return false;
  };

  SplitRecord rec;
  rec.equation = eq;
  std::vector<Lit> guards;
  for (Arrangement& a : arrs) {
    std::vector<Term> atoms;
    bool dead = false;
    for (const auto& [x, y] : a.implied) {
      Term e = tm_.simplify(tm_.eq(x, y));
      if (tm_.kind(e) == Kind::BoolConst) {
        if (!tm_.bool_value(e)) dead = true;
        continue;
      }
      if (impossible_empty(e)) dead = true;
      atoms.push_back(e);
    }
    if (dead) continue;
    a.guard = Lit::pos(engine_.new_var());
    owners_[a.guard.var()].push_back({d});
    for (Term e : atoms) {
      Lit l = literal(e, AtomRole::Implied);
      owners_[l.var()].push_back({a.guard});
      engine_.add_clause({~a.guard, l}, sat::ClauseOrigin::Lemma);
    }
    engine_.set_theory_activity(a.guard, a.activity);
    guards.push_back(a.guard);
    rec.arrangements.push_back(std::move(a));
  }
  std::vector<Lit> main{~d};
  main.insert(main.end(), guards.begin(), guards.end());
  lemmas.push_back(std::move(main));
  rec.case_split_set = exclusive(guards);
  splits_.push_back(std::move(rec));
  ++stats_.splits;
}

bool StringTheory::overlap_active(const std::vector<Relevant>& rel) const {
  for (const Relevant& r : rel)
    if (r.positive && overlap_.count(r.lit.var())) return true;
  return false;
}

std::optional<FinalCheck> StringTheory::propose_lengths(Term var, const std::vector<Relevant>& rel) {
  auto& idx = rounds_of_[var];
  std::int64_t lo = 0, hi = opts_.initial_window;
  std::optional<Lit> prev;
  if (!idx.empty()) {
    const LengthRound& last = rounds_[idx.back()];
    lo = last.hi + 1;
    hi = 2 * lo - 1;
    prev = last.more;
  }
  if (lo >= opts_.max_length) {
    FinalCheck fc;
    fc.kind = FinalCheck::Kind::Unknown;
    fc.reason = overlap_active(rel) ? "overlapping variables" : "length search bound exceeded";
    return fc;
  }
  LengthRound round;
  round.var = var;
  round.lo = lo;
  round.hi = hi;
  Term len = tm_.length(var);
  for (std::int64_t k = lo; k <= hi; ++k)
    round.guards.push_back(literal(tm_.eq(len, tm_.int_const(k)), AtomRole::LengthGuard));
  round.more = literal(tm_.less_eq(tm_.int_const(hi + 1), len), AtomRole::LengthGuard);
  engine_.set_theory_activity(round.more, kActivityMore);

  std::vector<Lit> clause;
  if (prev) clause.push_back(~*prev);
  clause.insert(clause.end(), round.guards.begin(), round.guards.end());
  clause.push_back(round.more);
  std::vector<Lit> group = round.guards;
  group.push_back(round.more);
  round.case_split_set = exclusive(group);

  idx.push_back(rounds_.size());
  rounds_.push_back(std::move(round));
  ++stats_.length_rounds;
  FinalCheck fc;
  fc.kind = FinalCheck::Kind::Lemmas;
  fc.lemmas.push_back(std::move(clause));
  return fc;
}

std::unique_ptr<StringTheory::Lengths> StringTheory::build_lengths(const std::vector<Relevant>& rel,
                                                                   std::vector<Lit>& conflict) {
  auto L = std::make_unique<Lengths>(tm_);
  for (const Relevant& r : rel) {
    if (auto os = assert_arith(*L, r)) {
      conflict = negate_origins(*os);
      return L;
    }
  }
  return L;
}

// ---------------------------------------------------------------------------
// final check

FinalCheck StringTheory::final_check() {
  ++stats_.final_checks;
  FinalCheck fc;
  if (engine_.budget().expired()) {
    fc.kind = FinalCheck::Kind::Timeout;
    return fc;
  }
  auto lemmas_or = [&](std::vector<std::vector<Lit>> ls) {
    FinalCheck out;
    out.kind = FinalCheck::Kind::Lemmas;
    out.lemmas = std::move(ls);
    return out;
  };

  std::vector<Relevant> rel = relevant_literals();

  // Equalities from scratch.
  EqState eq(tm_);
  for (const Relevant& r : rel) {
    if (tm_.kind(r.atom) != Kind::Eq || tm_.sort(tm_.children(r.atom)[0]) != Sort::String) continue;
    Term x = tm_.children(r.atom)[0], y = tm_.children(r.atom)[1];
    auto ex = r.positive ? eq.merge(x, y, r.lit) : eq.add_diseq(x, y, r.lit);
    if (ex) {
      ++stats_.theory_conflicts;
      return lemmas_or({negate(*ex)});
    }
  }

  // Word equations between class members, with variables known to be
  // empty dropped.
  auto ground = [&](Term t, std::vector<Lit>& path) {
    if (tm_.kind(t) != Kind::Concat) return t;
    std::vector<Term> parts;
    bool changed = false;
    for (Term c : tm_.children(t)) {
      std::optional<Term> k;
      if (tm_.kind(c) == Kind::StrVar) k = eq.constant_of(c);
      if (!k || !tm_.text(*k).empty()) {
        parts.push_back(c);
        continue;
      }
      auto ex = eq.explain(c, *k);
      path.insert(path.end(), ex.begin(), ex.end());
      parts.push_back(*k);
      changed = true;
    }
    return changed ? tm_.concat(parts) : t;
  };
  std::vector<std::vector<Lit>> lemmas;
  for (const auto& cls : eq.classes()) {
    Term rep;
    for (Term m : cls)
      if (tm_.kind(m) == Kind::StrConst) rep = m;
    if (!rep.valid())
      for (Term m : cls)
        if (tm_.kind(m) == Kind::Concat) {
          rep = m;
          break;
        }
    if (!rep.valid()) continue;
    auto consider = [&](Term m, Term other) {
      std::vector<Lit> path = eq.explain(m, other);
      Term D = tm_.simplify(tm_.eq(ground(m, path), ground(other, path)));
      std::sort(path.begin(), path.end());
      path.erase(std::unique(path.begin(), path.end()), path.end());
      if (tm_.kind(D) == Kind::BoolConst) {
        if (!tm_.bool_value(D)) lemmas.push_back(negate(path));
        return;
      }
      Lit d = literal(D, AtomRole::Derived);
      auto& own = owners_[d.var()];
      if (std::find(own.begin(), own.end(), path) == own.end()) own.push_back(path);
      if (engine_.value(d) != LBool::True) {
        std::vector<Lit> l = negate(path);
        l.push_back(d);
        lemmas.push_back(std::move(l));
        ++stats_.derived_equalities;
        return;
      }
      if (split_done_.count(d.var()) || splits_.size() >= opts_.max_splits) return;
      split_done_.insert(d.var());
      split_equation(D, d, lemmas);
    };
    for (Term m : cls) {
      if (m == rep) continue;
      if (tm_.kind(m) == Kind::Concat || tm_.kind(m) == Kind::StrConst) {
        consider(m, rep);
        continue;
      }
      if (tm_.kind(m) != Kind::StrVar) continue;
      // A variable equated with a concatenation containing it.
      for (Term c : cls) {
        if (tm_.kind(c) != Kind::Concat) continue;
        auto kids = tm_.children(c);
        if (std::find(kids.begin(), kids.end(), m) != kids.end()) consider(m, c);
      }
    }
  }
  if (!lemmas.empty()) return lemmas_or(std::move(lemmas));

  // Length abstraction from scratch.
  std::vector<Lit> conflict;
  auto L = build_lengths(rel, conflict);
  if (!conflict.empty()) {
    ++stats_.theory_conflicts;
    return lemmas_or({conflict});
  }
  arith::CheckResult ar = L->la.check();
  if (ar.status == arith::Status::Unsat) {
    ++stats_.theory_conflicts;
    return lemmas_or({negate_origins(ar.explanation)});
  }

  std::vector<Term> svars;
  for (const Relevant& r : rel)
    for (Term v : tm_.free_vars(r.atom))
      if (tm_.kind(v) == Kind::StrVar) svars.push_back(v);
  std::sort(svars.begin(), svars.end());
  svars.erase(std::unique(svars.begin(), svars.end()), svars.end());
  auto fixed_length = [&](Term v) -> std::optional<std::int64_t> {
    auto id = L->find(tm_.length(v));
    if (!id) return std::nullopt;
    arith::Bounds b = L->la.bounds(*id);
    if (!b.fixed()) return std::nullopt;
    return b.lo;
  };

  // Membership unfolding on fixed lengths.
  for (const Relevant& r : rel) {
    if (!r.positive || tm_.kind(r.atom) != Kind::InRe) continue;
    Term v = tm_.children(r.atom)[0];
    if (tm_.kind(v) != Kind::StrVar) continue;
    auto n = fixed_length(v);
    if (!n || !unfolded_.emplace(r.lit.var(), *n).second) continue;
    regex::LengthSlice slice = regex::unfold(automaton(tm_.children(r.atom)[1]), static_cast<std::size_t>(*n),
                                             tm_.alphabet());
    if (!slice.words) continue;
    Lit len = literal(tm_.eq(tm_.length(v), tm_.int_const(*n)), AtomRole::LengthGuard);
    std::vector<Lit> main{~r.lit, ~len};
    std::vector<Lit> guards;
    for (const std::string& w : *slice.words) {
      Lit g = Lit::pos(engine_.new_var());
      Lit e = literal(tm_.simplify(tm_.eq(v, tm_.str_const(w))), AtomRole::Unfold);
      owners_[g.var()].push_back({r.lit, len});
      owners_[e.var()].push_back({g});
      engine_.add_clause({~g, e}, sat::ClauseOrigin::Lemma);
      guards.push_back(g);
      main.push_back(g);
    }
    exclusive(guards);
    lemmas.push_back(std::move(main));
    ++stats_.unfolds;
  }
  if (!lemmas.empty()) return lemmas_or(std::move(lemmas));

  // Concrete words for the current lengths.
  if (ar.status == arith::Status::Sat) {
    WordProblem wp;
    for (Term v : svars) wp.lengths[v] = static_cast<std::size_t>(L->la.model_value(*L->find(tm_.length(v))));
    for (const Relevant& r : rel) {
      Kind k = tm_.kind(r.atom);
      if (k == Kind::Eq && tm_.sort(tm_.children(r.atom)[0]) == Sort::String) {
        auto pr = std::make_pair(tm_.children(r.atom)[0], tm_.children(r.atom)[1]);
        (r.positive ? wp.equalities : wp.disequalities).push_back(pr);
      } else if (k == Kind::InRe) {
        wp.memberships.push_back({tm_.children(r.atom)[0], &automaton(tm_.children(r.atom)[1]), r.positive});
      }
    }
    WordLimits lim;
    lim.max_nodes = opts_.max_word_nodes;
    lim.deadline = engine_.budget().deadline;
    WordResult wr = solve_words(tm_, wp, tm_.alphabet(), lim);
    if (wr.status == WordStatus::Timeout) {
      fc.kind = FinalCheck::Kind::Timeout;
      return fc;
    }
    if (wr.status == WordStatus::Aborted) {
      fc.kind = FinalCheck::Kind::Unknown;
      fc.reason = "model search limit exceeded";
      return fc;
    }
    if (wr.status == WordStatus::Sat) {
      Model m;
      m.strings = wr.values;
      for (const Relevant& r : rel)
        for (Term v : tm_.free_vars(r.atom))
          if (tm_.kind(v) == Kind::IntVar) m.ints[v] = L->la.model_value(*L->find(v));
      Evaluator ev(tm_);
      for (const Relevant& r : rel)
        if (ev.holds(r.atom, m) != r.positive) throw std::logic_error("string theory built a model violating its own literals");
      string_model_ = std::move(m.strings);
      int_model_ = std::move(m.ints);
      fc.kind = FinalCheck::Kind::Sat;
      return fc;
    }
  }

  // Fix one more length.
  for (Term v : svars)
    if (!fixed_length(v)) return *propose_lengths(v, rel);
  if (ar.status == arith::Status::Open) {
    fc.kind = FinalCheck::Kind::Unknown;
    fc.reason = "integer search incomplete";
    return fc;
  }

  // Every length is pinned and no words fit: rule out this assignment.
  std::vector<Lit> block;
  for (const Relevant& r : rel) block.push_back(~r.lit);
  ++stats_.blocking_lemmas;
  return lemmas_or({block});
}

}  // namespace strsolve
