// SPDX-License-Identifier: Apache-2.0
#include "strsolve/length_arith.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace strsolve::arith {

namespace {

using i128 = __int128;

constexpr std::int64_t kHuge = std::int64_t(1) << 40;

std::int64_t clamp(i128 v) {
  if (v >= kInf) return kInf;
  if (v <= -kInf) return -kInf;
  return static_cast<std::int64_t>(v);
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

std::int64_t abs64(std::int64_t v) { return v < 0 ? -v : v; }

void merge_origins(std::vector<Origin>& into, const std::vector<Origin>& from) {
  into.insert(into.end(), from.begin(), from.end());
  std::sort(into.begin(), into.end());
  into.erase(std::unique(into.begin(), into.end()), into.end());
}

}  // namespace

VarId LengthArith::new_var(VarKind kind) {
  kinds_.push_back(kind);
  Bounds b;
  if (kind == VarKind::Length) b.lo = 0;
  if (kind == VarKind::Fresh) b.lo = 1;
  last_bounds_.push_back(b);
  return static_cast<VarId>(kinds_.size() - 1);
}

void LengthArith::push() { scopes_.push_back(constraints_.size()); }

void LengthArith::pop(std::size_t levels) {
  if (levels > scopes_.size()) throw std::logic_error("LengthArith::pop below base scope");
  if (levels == 0) return;
  std::size_t keep = scopes_[scopes_.size() - levels];
  scopes_.resize(scopes_.size() - levels);
  constraints_.resize(keep);
  has_model_ = false;

  std::vector<std::size_t> all(constraints_.size());
  std::iota(all.begin(), all.end(), 0);
  std::optional<Conflict> conflict;
  auto rows = build_rows(all, conflict);
  State st = initial_state();
  if (!conflict) {
    std::vector<Reason> reasons;
    bool saturated = true;
    propagate(rows, st, reasons, conflict, saturated);
  }
  last_bounds_ = st.bounds;
}

LengthArith::Row LengthArith::normalize(const LinearConstraint& c) {
  Row r;
  std::vector<std::pair<VarId, std::int64_t>> ts = c.terms;
  std::sort(ts.begin(), ts.end());
  for (auto [v, k] : ts) {
    if (!r.terms.empty() && r.terms.back().first == v)
      r.terms.back().second += k;
    else
      r.terms.emplace_back(v, k);
  }
  std::erase_if(r.terms, [](const auto& p) { return p.second == 0; });
  std::int64_t k = c.constant;
  switch (c.rel) {
    case Rel::Eq: r.rel = NRel::Eq; break;
    case Rel::Ne: r.rel = NRel::Ne; break;
    case Rel::Le: r.rel = NRel::Le; break;
    case Rel::Lt:
      r.rel = NRel::Le;
      k += 1;
      break;
    case Rel::Ge:
    case Rel::Gt:
      r.rel = NRel::Le;
      for (auto& t : r.terms) t.second = -t.second;
      k = -k + (c.rel == Rel::Gt ? 1 : 0);
      break;
  }
  r.constant = k;
  if (c.origin != kAxiom) r.origins.push_back(c.origin);
  return r;
}

std::vector<LengthArith::Row> LengthArith::build_rows(const std::vector<std::size_t>& subset,
                                                      std::optional<Conflict>& conflict) const {
  std::vector<Row> rows;
  rows.reserve(subset.size() * 2);
  for (std::size_t i : subset) {
    Row r = normalize(constraints_[i]);
    if (r.terms.empty()) {
      bool ok = r.rel == NRel::Eq ? r.constant == 0 : r.rel == NRel::Le ? r.constant <= 0 : r.constant != 0;
      if (!ok) {
        conflict = Conflict{r.origins};
        return rows;
      }
      continue;
    }
    rows.push_back(std::move(r));
  }

  // Fraction-free elimination over the equalities; derived rows are added so
  // that propagation sees the eliminated forms.
  std::vector<Row> pivots;
  std::vector<VarId> pivot_var;
  const std::size_t original = rows.size();
  for (std::size_t i = 0; i < original; ++i) {
    if (rows[i].rel != NRel::Eq) continue;
    Row cur = rows[i];
    bool overflow = false;
    for (std::size_t p = 0; p < pivots.size() && !overflow; ++p) {
      auto it = std::find_if(cur.terms.begin(), cur.terms.end(), [&](auto& t) { return t.first == pivot_var[p]; });
      if (it == cur.terms.end()) continue;
      const Row& pr = pivots[p];
      std::int64_t a = std::find_if(pr.terms.begin(), pr.terms.end(), [&](auto& t) {
                         return t.first == pivot_var[p];
                       })->second;
      std::int64_t b = it->second;
      std::int64_t g = std::gcd(abs64(a), abs64(b));
      i128 ma = a / g, mb = b / g;
      // cur := ma*cur - mb*pivot
      std::vector<std::pair<VarId, i128>> acc;
      for (auto [v, k] : cur.terms) acc.emplace_back(v, ma * k);
      for (auto [v, k] : pr.terms) acc.emplace_back(v, -mb * k);
      std::sort(acc.begin(), acc.end(), [](auto& x, auto& y) { return x.first < y.first; });
      std::vector<std::pair<VarId, std::int64_t>> merged;
      i128 run = 0;
      for (std::size_t j = 0; j < acc.size(); ++j) {
        run += acc[j].second;
        if (j + 1 == acc.size() || acc[j + 1].first != acc[j].first) {
          if (run != 0) {
            if (run > kHuge || run < -kHuge) overflow = true;
            merged.emplace_back(acc[j].first, static_cast<std::int64_t>(run));
          }
          run = 0;
        }
      }
      i128 c = ma * cur.constant - mb * pr.constant;
      if (c > kHuge || c < -kHuge) overflow = true;
      if (overflow) break;
      cur.terms = std::move(merged);
      cur.constant = static_cast<std::int64_t>(c);
      merge_origins(cur.origins, pr.origins);
      std::int64_t h = std::abs(cur.constant);
      for (auto& t : cur.terms) h = std::gcd(h, abs64(t.second));
      if (h > 1) {
        for (auto& t : cur.terms) t.second /= h;
        cur.constant /= h;
      }
    }
    if (overflow) continue;
    if (cur.terms.empty()) {
      if (cur.constant != 0) {
        conflict = Conflict{cur.origins};
        return rows;
      }
      continue;
    }
    std::int64_t g = 0;
    for (auto& t : cur.terms) g = std::gcd(g, abs64(t.second));
    if (cur.constant % g != 0) {
      conflict = Conflict{cur.origins};
      return rows;
    }
    pivot_var.push_back(cur.terms.front().first);
    pivots.push_back(cur);
    if (cur.origins.size() > 1) rows.push_back(std::move(cur));
  }
  return rows;
}

LengthArith::State LengthArith::initial_state() const {
  State st;
  st.bounds.resize(kinds_.size());
  for (std::size_t v = 0; v < kinds_.size(); ++v) {
    if (kinds_[v] == VarKind::Length) st.bounds[v].lo = 0;
    if (kinds_[v] == VarKind::Fresh) st.bounds[v].lo = 1;
  }
  st.lo_reason.assign(kinds_.size(), -1);
  st.hi_reason.assign(kinds_.size(), -1);
  return st;
}

bool LengthArith::propagate(const std::vector<Row>& rows, State& st, std::vector<Reason>& reasons,
                            std::optional<Conflict>& conflict, bool& saturated) const {
  std::size_t updates = 0;
  saturated = true;

  auto fail_on_var = [&](VarId v) {
    conflict = Conflict{collect(rows, reasons, {st.lo_reason[v], st.hi_reason[v]})};
    return false;
  };

  // Propagates sign*(terms) + sign*constant <= 0 from row r.
  auto propagate_le = [&](std::int32_t r, std::int64_t sign, bool& changed) -> bool {
    const Row& row = rows[r];
    i128 finite_min = static_cast<i128>(sign) * row.constant;
    int infinite = 0;
    VarId infinite_var = 0;
    for (auto [v, k0] : row.terms) {
      i128 k = static_cast<i128>(sign) * k0;
      std::int64_t b = k > 0 ? st.bounds[v].lo : st.bounds[v].hi;
      if (b <= -kInf || b >= kInf) {
        ++infinite;
        infinite_var = v;
      } else {
        finite_min += k * b;
      }
    }
    if (infinite > 1) return true;
    for (auto [v, k0] : row.terms) {
      if (infinite == 1 && v != infinite_var) continue;
      i128 k = static_cast<i128>(sign) * k0;
      i128 rest = finite_min;
      if (infinite == 0) rest -= k * (k > 0 ? st.bounds[v].lo : st.bounds[v].hi);
      // k * x_v <= -rest
      std::vector<std::int32_t> deps;
      for (auto [u, l0] : row.terms) {
        if (u == v) continue;
        i128 l = static_cast<i128>(sign) * l0;
        deps.push_back(l > 0 ? st.lo_reason[u] : st.hi_reason[u]);
      }
      if (k > 0) {
        std::int64_t nb = clamp(floor_div(-rest, k));
        if (nb < st.bounds[v].hi) {
          reasons.push_back(Reason{r, std::move(deps)});
          st.bounds[v].hi = nb;
          st.hi_reason[v] = static_cast<std::int32_t>(reasons.size() - 1);
          changed = true;
          ++updates;
        }
      } else {
        std::int64_t nb = clamp(ceil_div(-rest, k));
        if (nb > st.bounds[v].lo) {
          reasons.push_back(Reason{r, std::move(deps)});
          st.bounds[v].lo = nb;
          st.lo_reason[v] = static_cast<std::int32_t>(reasons.size() - 1);
          changed = true;
          ++updates;
        }
      }
      if (st.bounds[v].lo > st.bounds[v].hi) return fail_on_var(v);
      if (std::abs(st.bounds[v].lo) > kHuge && st.bounds[v].lo > -kInf) saturated = false;
      if (std::abs(st.bounds[v].hi) > kHuge && st.bounds[v].hi < kInf) saturated = false;
    }
    return true;
  };

  for (VarId v = 0; v < st.bounds.size(); ++v)
    if (st.bounds[v].lo > st.bounds[v].hi) return fail_on_var(v);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::int32_t r = 0; r < static_cast<std::int32_t>(rows.size()); ++r) {
      const Row& row = rows[r];
      switch (row.rel) {
        case NRel::Le:
          if (!propagate_le(r, 1, changed)) return false;
          break;
        case NRel::Eq:
          if (!propagate_le(r, 1, changed) || !propagate_le(r, -1, changed)) return false;
          break;
        case NRel::Ne: {
          i128 value = row.constant;
          int unfixed = 0;
          VarId free_var = 0;
          std::int64_t free_coeff = 0;
          for (auto [v, k] : row.terms) {
            if (st.bounds[v].fixed()) {
              value += static_cast<i128>(k) * st.bounds[v].lo;
            } else {
              ++unfixed;
              free_var = v;
              free_coeff = k;
            }
          }
          std::vector<std::int32_t> deps;
          for (auto [v, k] : row.terms) {
            if (v == free_var && unfixed == 1) continue;
            deps.push_back(st.lo_reason[v]);
            deps.push_back(st.hi_reason[v]);
          }
          if (unfixed == 0 && value == 0) {
            reasons.push_back(Reason{r, std::move(deps)});
            conflict = Conflict{collect(rows, reasons, {static_cast<std::int32_t>(reasons.size() - 1)})};
            return false;
          }
          if (unfixed == 1 && (-value) % free_coeff == 0) {
            // free_coeff * x != -value: trim the excluded value off an edge.
            std::int64_t excluded = clamp(-value / free_coeff);
            Bounds& b = st.bounds[free_var];
            if (b.lo == excluded || b.hi == excluded) {
              deps.push_back(b.lo == excluded ? st.lo_reason[free_var] : st.hi_reason[free_var]);
              reasons.push_back(Reason{r, std::move(deps)});
              auto id = static_cast<std::int32_t>(reasons.size() - 1);
              if (b.lo == excluded) {
                b.lo = excluded + 1;
                st.lo_reason[free_var] = id;
              } else {
                b.hi = excluded - 1;
                st.hi_reason[free_var] = id;
              }
              changed = true;
              ++updates;
              if (b.lo > b.hi) return fail_on_var(free_var);
            }
          }
          break;
        }
      }
      if (updates > limits_.max_bound_updates || !saturated) {
        saturated = false;
        return true;
      }
    }
  }
  return true;
}

std::vector<Origin> LengthArith::collect(const std::vector<Row>& rows, const std::vector<Reason>& reasons,
                                         std::vector<std::int32_t> roots) const {
  std::vector<Origin> out;
  std::vector<bool> seen(reasons.size(), false);
  while (!roots.empty()) {
    std::int32_t id = roots.back();
    roots.pop_back();
    if (id < 0 || seen[id]) continue;
    seen[id] = true;
    const Reason& r = reasons[id];
    if (r.row >= 0) out.insert(out.end(), rows[r.row].origins.begin(), rows[r.row].origins.end());
    roots.insert(roots.end(), r.deps.begin(), r.deps.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CheckResult LengthArith::check_subset(const std::vector<std::size_t>& subset, std::vector<std::int64_t>* model,
                                      State* final_state) const {
  CheckResult res;
  std::optional<Conflict> conflict;
  auto rows = build_rows(subset, conflict);
  State root = initial_state();
  std::vector<Reason> reasons;
  bool saturated = true;
  if (!conflict) propagate(rows, root, reasons, conflict, saturated);
  if (final_state) *final_state = root;
  if (conflict) {
    res.status = Status::Unsat;
    res.explanation = std::move(conflict->origins);
    return res;
  }

  std::vector<bool> involved(kinds_.size(), false);
  for (const Row& r : rows)
    for (auto [v, k] : r.terms) involved[v] = true;

  std::size_t nodes = 0;
  bool truncated = !saturated;
  std::vector<VarId> open;
  std::optional<State> found;

  auto dfs = [&](auto&& self, State st) -> bool {
    if (++nodes > limits_.max_search_nodes) {
      truncated = true;
      return false;
    }
    VarId pick = static_cast<VarId>(kinds_.size());
    for (VarId v = 0; v < kinds_.size(); ++v)
      if (involved[v] && !st.bounds[v].fixed()) {
        pick = v;
        break;
      }
    if (pick == kinds_.size()) {
      found = std::move(st);
      return true;
    }
    Bounds b = st.bounds[pick];
    std::vector<std::int64_t> values;
    if (b.lo > -kInf) {
      std::int64_t end = b.hi;
      if (b.hi >= kInf) {
        end = b.lo + limits_.open_window;
        truncated = true;
        open.push_back(pick);
      }
      for (std::int64_t x = b.lo; x <= end; ++x) values.push_back(x);
    } else if (b.hi < kInf) {
      for (std::int64_t x = b.hi; x >= b.hi - limits_.open_window; --x) values.push_back(x);
      truncated = true;
      open.push_back(pick);
    } else {
      values.push_back(0);
      for (std::int64_t x = 1; x <= limits_.open_window; ++x) {
        values.push_back(x);
        values.push_back(-x);
      }
      truncated = true;
      open.push_back(pick);
    }
    for (std::int64_t x : values) {
      State next = st;
      next.bounds[pick] = Bounds{x, x};
      next.lo_reason[pick] = next.hi_reason[pick] = -1;
      std::optional<Conflict> c;
      bool sat_flag = true;
      if (!propagate(rows, next, reasons, c, sat_flag)) continue;
      if (!sat_flag) truncated = true;
      if (self(self, std::move(next))) return true;
      if (nodes > limits_.max_search_nodes) return false;
    }
    return false;
  };

  if (dfs(dfs, root)) {
    res.status = Status::Sat;
    if (model) {
      model->assign(kinds_.size(), 0);
      for (VarId v = 0; v < kinds_.size(); ++v) {
        Bounds b = found->bounds[v];
        (*model)[v] = b.lo > -kInf ? b.lo : (b.hi < kInf ? b.hi : 0);
      }
    }
    return res;
  }
  if (truncated) {
    res.status = Status::Open;
    std::sort(open.begin(), open.end());
    open.erase(std::unique(open.begin(), open.end()), open.end());
    res.open_vars = std::move(open);
    return res;
  }
  res.status = Status::Unsat;
  for (std::size_t i : subset)
    if (constraints_[i].origin != kAxiom) res.explanation.push_back(constraints_[i].origin);
  std::sort(res.explanation.begin(), res.explanation.end());
  res.explanation.erase(std::unique(res.explanation.begin(), res.explanation.end()), res.explanation.end());
  return res;
}

std::vector<Origin> LengthArith::minimize(std::vector<Origin> origins) const {
  if (origins.size() > limits_.minimize_up_to) return origins;
  for (std::size_t i = 0; i < origins.size();) {
    std::vector<Origin> trial = origins;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    std::vector<std::size_t> subset;
    for (std::size_t c = 0; c < constraints_.size(); ++c) {
      Origin o = constraints_[c].origin;
      if (o == kAxiom || std::binary_search(trial.begin(), trial.end(), o)) subset.push_back(c);
    }
    if (check_subset(subset, nullptr, nullptr).status == Status::Unsat)
      origins = std::move(trial);
    else
      ++i;
  }
  return origins;
}

std::optional<std::vector<Origin>> LengthArith::assert_linear(LinearConstraint c) {
  constraints_.push_back(std::move(c));
  has_model_ = false;
  std::vector<std::size_t> all(constraints_.size());
  std::iota(all.begin(), all.end(), 0);
  std::optional<Conflict> conflict;
  auto rows = build_rows(all, conflict);
  State st = initial_state();
  if (!conflict) {
    std::vector<Reason> reasons;
    bool saturated = true;
    propagate(rows, st, reasons, conflict, saturated);
  }
  last_bounds_ = st.bounds;
  if (conflict) return std::move(conflict->origins);
  return std::nullopt;
}

CheckResult LengthArith::check() {
  std::vector<std::size_t> all(constraints_.size());
  std::iota(all.begin(), all.end(), 0);
  State root;
  CheckResult res = check_subset(all, &model_, &root);
  last_bounds_ = root.bounds;
  has_model_ = res.status == Status::Sat;
  if (res.status == Status::Unsat) res.explanation = minimize(std::move(res.explanation));
  return res;
}

std::int64_t LengthArith::model_value(VarId v) const {
  if (!has_model_) throw std::logic_error("model_value requires a preceding Sat check");
  return model_.at(v);
}

Bounds LengthArith::bounds(VarId v) const { return last_bounds_.at(v); }

std::uint64_t LengthArith::state_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(kinds_.size());
  for (auto k : kinds_) mix(static_cast<std::uint64_t>(k));
  mix(constraints_.size());
  for (const auto& c : constraints_) {
    for (auto [v, k] : c.terms) {
      mix(v);
      mix(static_cast<std::uint64_t>(k));
    }
    mix(static_cast<std::uint64_t>(c.constant));
    mix(static_cast<std::uint64_t>(c.rel));
    mix(static_cast<std::uint64_t>(c.origin));
  }
  for (const auto& b : last_bounds_) {
    mix(static_cast<std::uint64_t>(b.lo));
    mix(static_cast<std::uint64_t>(b.hi));
  }
  return h;
}

}  // namespace strsolve::arith
