// SPDX-License-Identifier: Apache-2.0
#include "strsolve/sat.hpp"

#include <algorithm>
#include <cmath>

namespace strsolve::sat {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
    case Verdict::Timeout: return "timeout";
  }
  return "unknown";
}

Engine::Engine(EngineOptions opts) : opts_(opts), rng_(opts.seed.value_or(0)) {}

Var Engine::new_var() {
  Var v = static_cast<Var>(assigns_.size());
  assigns_.push_back(LBool::Undef);
  level_.push_back(0);
  reason_.push_back(Reason{});
  saved_phase_.push_back(opts_.seed ? (rng_() & 1u) != 0 : false);
  base_act_.push_back(0.0);
  theory_act_.push_back(0.0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  set_of_.push_back(-1);
  set_of_.push_back(-1);
  seen_.push_back(false);
  heap_insert(v);
  return v;
}

LBool Engine::value(Lit l) const {
  LBool b = assigns_[l.var()];
  if (b == LBool::Undef) return b;
  return ((b == LBool::True) != l.negative()) ? LBool::True : LBool::False;
}

// ---------------------------------------------------------------------------
// activity heap

double Engine::key(Var v) const { return base_act_[v] + (opts_.theory_branching ? theory_act_[v] : 0.0); }

bool Engine::heap_less(Var a, Var b) const {
  double ka = key(a), kb = key(b);
  if (ka != kb) return ka > kb;
  return a < b;
}

void Engine::heap_insert(Var v) {
  if (heap_pos_[v] >= 0) return;
  heap_pos_[v] = static_cast<std::int64_t>(heap_.size());
  heap_.push_back(v);
  heap_sift_up(heap_.size() - 1);
}

void Engine::heap_update(Var v) {
  if (heap_pos_[v] < 0) return;
  auto i = static_cast<std::size_t>(heap_pos_[v]);
  heap_sift_up(i);
  heap_sift_down(static_cast<std::size_t>(heap_pos_[v]));
}

void Engine::heap_sift_up(std::size_t i) {
  Var v = heap_[i];
  while (i > 0) {
    std::size_t p = (i - 1) / 2;
    if (!heap_less(v, heap_[p])) break;
    heap_[i] = heap_[p];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = p;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

void Engine::heap_sift_down(std::size_t i) {
  Var v = heap_[i];
  for (;;) {
    std::size_t c = 2 * i + 1;
    if (c >= heap_.size()) break;
    if (c + 1 < heap_.size() && heap_less(heap_[c + 1], heap_[c])) ++c;
    if (!heap_less(heap_[c], v)) break;
    heap_[i] = heap_[c];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = c;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

Var Engine::heap_pop() {
  Var top = heap_.front();
  heap_pos_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_sift_down(0);
  }
  return top;
}

void Engine::heap_rebuild() {
  std::vector<Var> vs = heap_;
  for (Var v : vs) heap_pos_[v] = -1;
  heap_.clear();
  for (Var v : vs) heap_insert(v);
}

void Engine::set_theory_activity(Lit lit, double value) {
  theory_act_.at(lit.var()) = value;
  heap_update(lit.var());
}

void Engine::set_base_activity(Var v, double value) {
  base_act_.at(v) = value;
  heap_update(v);
}

void Engine::bump(Var v) {
  base_act_[v] += inc_;
  heap_update(v);
}

// ---------------------------------------------------------------------------
// case-split sets

std::optional<std::size_t> Engine::case_split_of(Lit l) const {
  if (!l.valid() || l.index() >= set_of_.size() || set_of_[l.index()] < 0) return std::nullopt;
  return static_cast<std::size_t>(set_of_[l.index()]);
}

std::size_t Engine::register_case_split(std::span<const Lit> lits) {
  if (lits.empty()) throw CaseSplitError("case-split set must not be empty");
  std::vector<Lit> members(lits.begin(), lits.end());
  std::vector<Lit> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw CaseSplitError("duplicate literal in case-split set");
  for (Lit l : members) {
    if (l.var() >= num_vars()) throw CaseSplitError("case-split literal over unknown variable");
    if (set_of_[l.index()] >= 0 || set_of_[(~l).index()] >= 0)
      throw CaseSplitError("literal already belongs to a case-split set");
  }
  std::size_t id = sets_.size();
  for (Lit l : members) set_of_[l.index()] = static_cast<std::int64_t>(id);
  sets_.push_back(members);
  true_member_.push_back(Lit{});

  std::vector<Lit> already;
  for (std::size_t i = 0; i < qhead_; ++i) {
    Lit p = trail_[i];
    if (set_of_[p.index()] == static_cast<std::int64_t>(id)) already.push_back(p);
  }
  if (!already.empty()) true_member_[id] = already.front();
  if (already.size() > 1) add_clause({~already[0], ~already[1]}, ClauseOrigin::Lemma);
  return id;
}

void Engine::add_exclusive_group(std::span<const Lit> lits) {
  if (opts_.case_split) {
    register_case_split(lits);
    return;
  }
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = i + 1; j < lits.size(); ++j) add_clause({~lits[i], ~lits[j]}, ClauseOrigin::Exclusion);
}

// ---------------------------------------------------------------------------
// clause database

std::uint32_t Engine::attach(std::vector<Lit> lits, ClauseOrigin origin) {
  auto ci = static_cast<std::uint32_t>(clauses_.size());
  watches_[lits[0].index()].push_back(ci);
  watches_[lits[1].index()].push_back(ci);
  clauses_.push_back(Clause{std::move(lits), origin});
  return ci;
}

void Engine::add_clause(std::span<const Lit> input, ClauseOrigin origin) {
  std::vector<Lit> ls(input.begin(), input.end());
  for (Lit l : ls)
    if (!l.valid() || l.var() >= num_vars()) throw std::out_of_range("clause literal over unknown variable");
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  for (std::size_t i = 0; i + 1 < ls.size(); ++i)
    if (ls[i + 1] == ~ls[i]) return;
  if (unsat_) return;

  std::vector<Lit> kept;
  for (Lit l : ls) {
    LBool v = value(l);
    if (v != LBool::Undef && level_[l.var()] == 0) {
      if (v == LBool::True) return;
      continue;
    }
    kept.push_back(l);
  }
  if (kept.empty()) {
    unsat_ = true;
    return;
  }
  if (kept.size() == 1) {
    backjump(0);
    if (value(kept[0]) == LBool::Undef) enqueue(kept[0], Reason{});
    return;
  }

  auto rank = [&](Lit l) -> std::pair<int, std::int64_t> {
    LBool v = value(l);
    if (v == LBool::True) return {0, level_[l.var()]};
    if (v == LBool::Undef) return {1, 0};
    return {2, -static_cast<std::int64_t>(level_[l.var()])};
  };
  std::stable_sort(kept.begin(), kept.end(), [&](Lit a, Lit b) { return rank(a) < rank(b); });
  LBool v0 = value(kept[0]), v1 = value(kept[1]);
  std::vector<Lit> copy = kept;
  std::uint32_t ci = attach(std::move(kept), origin);
  if (v0 == LBool::False) {
    handle_conflict(std::move(copy));
  } else if (v0 == LBool::Undef && v1 == LBool::False) {
    enqueue(clauses_[ci].lits[0], Reason{ci, Lit{}});
  }
}

std::size_t Engine::num_clauses(ClauseOrigin origin) const {
  return static_cast<std::size_t>(
      std::count_if(clauses_.begin(), clauses_.end(), [&](const Clause& c) { return c.origin == origin; }));
}

std::vector<std::vector<Lit>> Engine::clauses(ClauseOrigin origin) const {
  std::vector<std::vector<Lit>> out;
  for (const auto& c : clauses_)
    if (c.origin == origin) out.push_back(c.lits);
  return out;
}

// ---------------------------------------------------------------------------
// trail

void Engine::enqueue(Lit l, Reason r) {
  Var v = l.var();
  assigns_[v] = l.negative() ? LBool::False : LBool::True;
  level_[v] = decision_level();
  reason_[v] = r;
  trail_.push_back(l);
}

void Engine::backjump(unsigned level) {
  if (decision_level() <= level) return;
  std::size_t stop = trail_lim_[level];
  for (std::size_t i = trail_.size(); i-- > stop;) {
    Lit p = trail_[i];
    Var v = p.var();
    std::int64_t s = set_of_[p.index()];
    if (s >= 0 && true_member_[s] == p) true_member_[s] = Lit{};
    saved_phase_[v] = !p.negative();
    assigns_[v] = LBool::Undef;
    reason_[v] = Reason{};
    heap_insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(level);
  qhead_ = std::min(qhead_, trail_.size());
  theory_head_ = std::min(theory_head_, trail_.size());
  if (theory_) theory_->on_backjump(level);
}

std::optional<std::vector<Lit>> Engine::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    ++stats_.propagations;

    std::int64_t s = set_of_[p.index()];
    if (s >= 0) {
      Lit t = true_member_[s];
      if (!t.valid()) {
        true_member_[s] = p;
      } else if (t != p) {
        return std::vector<Lit>{~p, ~t};
      }
    }

    Lit false_lit = ~p;
    auto& ws = watches_[false_lit.index()];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      std::uint32_t ci = ws[i++];
      auto& lits = clauses_[ci].lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      if (value(lits[0]) == LBool::True) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k)
        if (value(lits[k]) != LBool::False) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1].index()].push_back(ci);
          moved = true;
          break;
        }
      if (moved) continue;
      ws[j++] = ci;
      if (value(lits[0]) == LBool::False) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return lits;
      }
      enqueue(lits[0], Reason{ci, Lit{}});
    }
    ws.resize(j);
  }
  return std::nullopt;
}

std::vector<Lit> Engine::reason_lits(Lit p) const {
  const Reason& r = reason_[p.var()];
  if (r.other.valid()) return {p, r.other};
  if (r.clause != Reason::kNone) return clauses_[r.clause].lits;
  return {};
}

void Engine::handle_conflict(std::vector<Lit> conflict) {
  unsigned top = 0;
  for (Lit l : conflict) top = std::max(top, level_[l.var()]);
  if (top == 0) {
    unsat_ = true;
    return;
  }
  backjump(top);
  ++stats_.conflicts;

  std::vector<Lit> learnt{Lit{}};
  int path = 0;
  Lit p;
  std::size_t idx = trail_.size();
  std::vector<Lit> clause = std::move(conflict);
  std::vector<Var> touched;
  for (;;) {
    for (Lit q : clause) {
      if (p.valid() && q == p) continue;
      Var v = q.var();
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = true;
      touched.push_back(v);
      if (level_[v] == top)
        ++path;
      else
        learnt.push_back(q);
    }
    do {
      --idx;
    } while (!seen_[trail_[idx].var()]);
    p = trail_[idx];
    seen_[p.var()] = false;
    if (--path <= 0) break;
    clause = reason_lits(p);
  }
  learnt[0] = ~p;
  for (Var v : touched) seen_[v] = false;

  unsigned bt = 0;
  std::size_t max_i = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i)
    if (level_[learnt[i].var()] > bt) {
      bt = level_[learnt[i].var()];
      max_i = i;
    }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);

  backjump(bt);
  if (learnt.size() == 1) {
    enqueue(learnt[0], Reason{});
  } else {
    std::uint32_t ci = attach(learnt, ClauseOrigin::Learned);
    enqueue(learnt[0], Reason{ci, Lit{}});
  }

  double used = inc_;
  for (Lit l : learnt) bump(l.var());
  if (observer_) observer_(learnt, used);
  inc_ /= opts_.decay;
  bool rescale = inc_ > 1e100;
  for (Lit l : learnt) rescale = rescale || base_act_[l.var()] > 1e100;
  if (rescale) {
    for (double& a : base_act_) a *= 1e-100;
    inc_ *= 1e-100;
    heap_rebuild();
  }
}

// ---------------------------------------------------------------------------
// search

std::optional<Lit> Engine::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_.front();
    if (assigns_[v] != LBool::Undef) {
      heap_pop();
      continue;
    }
    if (opts_.debug_checks) {
      double k = key(v);
      for (Var u = 0; u < num_vars(); ++u)
        if (assigns_[u] == LBool::Undef && key(u) > k) ++checker_.maximality_violations;
    }
    heap_pop();
    if (set_of_[Lit::pos(v).index()] >= 0) return Lit::pos(v);
    if (set_of_[Lit::neg(v).index()] >= 0) return Lit::neg(v);
    return saved_phase_[v] ? Lit::pos(v) : Lit::neg(v);
  }
  return std::nullopt;
}

void Engine::decide(Lit l) {
  std::int64_t s = set_of_[l.index()];
  if (s >= 0 && true_member_[s].valid()) {
    // Another member already holds; this one is implied false.
    enqueue(~l, Reason{Reason::kNone, ~true_member_[s]});
    return;
  }
  ++stats_.decisions;
  if (opts_.theory_branching && theory_act_[l.var()] != 0.0) ++stats_.theory_activity_overrides;
  trail_lim_.push_back(trail_.size());
  if (theory_) theory_->on_new_level();
  enqueue(l, Reason{});
  if (s < 0) return;
  ++stats_.case_split_decisions;
  for (Lit sib : sets_[s])
    if (sib != l && value(sib) == LBool::Undef) enqueue(~sib, Reason{Reason::kNone, ~l});
}

void Engine::check_invariants() {
  ++checker_.checks;
  std::vector<int> count(sets_.size(), 0);
  for (std::size_t i = 0; i < qhead_; ++i) {
    std::int64_t s = set_of_[trail_[i].index()];
    if (s >= 0 && ++count[s] == 2) ++checker_.case_split_violations;
  }
}

double Engine::luby(double y, std::uint64_t x) {
  std::uint64_t size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, static_cast<double>(seq));
}

SolveResult Engine::solve(const Budget& budget) {
  budget_ = budget;
  if (unsat_) return {Verdict::Unsat, ""};
  std::uint64_t since_restart = 0;
  std::uint64_t iterations = 0;
  int stalled = 0;

  for (;;) {
    if (unsat_) return {Verdict::Unsat, ""};
    if (auto conflict = propagate()) {
      std::uint64_t before = stats_.conflicts;
      handle_conflict(std::move(*conflict));
      if (unsat_) return {Verdict::Unsat, ""};
      since_restart += stats_.conflicts - before;
      if (budget_.max_conflicts && stats_.conflicts >= *budget_.max_conflicts) return {Verdict::Timeout, ""};
      continue;
    }
    if (theory_ && theory_head_ < trail_.size()) {
      std::span<const Lit> slice(trail_.data() + theory_head_, trail_.size() - theory_head_);
      theory_head_ = trail_.size();
      if (auto tc = theory_->on_assign(slice)) {
        std::uint64_t before = stats_.conflicts;
        add_clause(*tc, ClauseOrigin::Lemma);
        since_restart += stats_.conflicts - before;
        if (budget_.max_conflicts && stats_.conflicts >= *budget_.max_conflicts) return {Verdict::Timeout, ""};
      }
      continue;
    }
    if (opts_.debug_checks) check_invariants();
    if ((++iterations & 63u) == 0 && budget_.expired()) return {Verdict::Timeout, ""};

    if (since_restart >= static_cast<std::uint64_t>(luby(2.0, stats_.restarts) * double(opts_.restart_unit))) {
      since_restart = 0;
      ++stats_.restarts;
      backjump(0);
      continue;
    }

    std::optional<Lit> next = pick_branch();
    if (next) {
      decide(*next);
      continue;
    }
    if (!theory_) return {Verdict::Sat, ""};
    if (budget_.expired()) return {Verdict::Timeout, ""};

    std::size_t trail_before = trail_.size(), vars_before = num_vars();
    std::uint64_t conflicts_before = stats_.conflicts;
    unsigned level_before = decision_level();
    FinalCheck fc = theory_->final_check();
    switch (fc.kind) {
      case FinalCheck::Kind::Sat: return {Verdict::Sat, ""};
      case FinalCheck::Kind::Unknown: return {Verdict::Unknown, fc.reason};
      case FinalCheck::Kind::Timeout: return {Verdict::Timeout, ""};
      case FinalCheck::Kind::Lemmas: break;
    }
    for (const auto& lemma : fc.lemmas) {
      add_clause(lemma, ClauseOrigin::Lemma);
      if (unsat_) return {Verdict::Unsat, ""};
    }
    since_restart += stats_.conflicts - conflicts_before;
    bool progress = num_vars() != vars_before || trail_.size() != trail_before ||
                    stats_.conflicts != conflicts_before || decision_level() != level_before ||
                    qhead_ < trail_.size();
    if (progress) {
      stalled = 0;
    } else if (++stalled >= 2) {
      return {Verdict::Unknown, "theory solver made no progress"};
    }
  }
}

}  // namespace strsolve::sat
