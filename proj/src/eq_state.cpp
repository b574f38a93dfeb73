// SPDX-License-Identifier: Apache-2.0
#include "strsolve/eq_state.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace strsolve {

std::uint32_t EqState::node(Term t) {
  auto [it, inserted] = index_.try_emplace(t, static_cast<std::uint32_t>(terms_.size()));
  if (inserted) {
    terms_.push_back(t);
    parent_.push_back(it->second);
    size_.push_back(1);
    const_.push_back(tm_.kind(t) == Kind::StrConst ? t : Term{});
    adj_.emplace_back();
  }
  return it->second;
}

std::uint32_t EqState::root(std::uint32_t n) const {
  while (parent_[n] != n) n = parent_[n];
  return n;
}

Term EqState::find(Term t) { return terms_[root(node(t))]; }

bool EqState::same_class(Term a, Term b) { return root(node(a)) == root(node(b)); }

std::optional<Term> EqState::constant_of(Term t) {
  Term c = const_[root(node(t))];
  if (!c.valid()) return std::nullopt;
  return c;
}

EqState::Explanation EqState::explain(Term a, Term b) const {
  auto ia = index_.find(a), ib = index_.find(b);
  if (ia == index_.end() || ib == index_.end()) throw std::logic_error("explain: unknown term");
  std::uint32_t src = ia->second, dst = ib->second;
  if (src == dst) return {};
  std::vector<std::int64_t> via(terms_.size(), -1);
  std::vector<bool> seen(terms_.size(), false);
  std::deque<std::uint32_t> queue{src};
  seen[src] = true;
  while (!queue.empty() && !seen[dst]) {
    std::uint32_t n = queue.front();
    queue.pop_front();
    for (std::uint32_t e : adj_[n]) {
      std::uint32_t m = edges_[e].a == n ? edges_[e].b : edges_[e].a;
      if (seen[m]) continue;
      seen[m] = true;
      via[m] = e;
      queue.push_back(m);
    }
  }
  if (!seen[dst]) throw std::logic_error("explain: terms are not connected");
  Explanation out;
  for (std::uint32_t n = dst; n != src;) {
    const Edge& e = edges_[static_cast<std::size_t>(via[n])];
    out.push_back(e.why);
    n = e.a == n ? e.b : e.a;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<EqState::Explanation> EqState::merge(Term a, Term b, sat::Lit why) {
  std::uint32_t na = node(a), nb = node(b);
  std::uint32_t ra = root(na), rb = root(nb);

  auto e = static_cast<std::uint32_t>(edges_.size());
  edges_.push_back(Edge{na, nb, why});
  adj_[na].push_back(e);
  adj_[nb].push_back(e);
  undo_.push_back(Undo{Undo::Kind::Edge});
  if (ra == rb) return std::nullopt;

  Term ca = const_[ra], cb = const_[rb];
  if (ca.valid() && cb.valid() && ca != cb) {
    // Conflict: keep the edge so that the explanation path exists.
    Explanation ex = explain(ca, cb);
    return ex;
  }
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  undo_.push_back(Undo{Undo::Kind::Union, rb, ra, const_[ra], size_[ra]});
  parent_[rb] = ra;
  size_[ra] += size_[rb];
  if (!const_[ra].valid()) const_[ra] = const_[rb];
  return check_diseqs();
}

std::optional<EqState::Explanation> EqState::check_diseqs() {
  for (const Diseq& d : diseqs_)
    if (root(d.a) == root(d.b)) {
      Explanation ex = explain(terms_[d.a], terms_[d.b]);
      ex.push_back(d.why);
      return ex;
    }
  return std::nullopt;
}

std::optional<EqState::Explanation> EqState::add_diseq(Term a, Term b, sat::Lit why) {
  std::uint32_t na = node(a), nb = node(b);
  diseqs_.push_back(Diseq{na, nb, why});
  undo_.push_back(Undo{Undo::Kind::Diseq});
  if (root(na) == root(nb)) {
    Explanation ex = explain(a, b);
    ex.push_back(why);
    return ex;
  }
  return std::nullopt;
}

std::vector<std::vector<Term>> EqState::classes() {
  std::map<std::uint32_t, std::vector<Term>> by_root;
  for (std::uint32_t n = 0; n < terms_.size(); ++n) by_root[root(n)].push_back(terms_[n]);
  std::vector<std::vector<Term>> out;
  for (auto& [r, ms] : by_root) {
    if (ms.size() < 2) continue;
    std::sort(ms.begin(), ms.end());
    out.push_back(std::move(ms));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void EqState::push() { scopes_.push_back(undo_.size()); }

void EqState::pop(std::size_t levels) {
  if (levels == 0) return;
  if (levels > scopes_.size()) throw std::logic_error("EqState::pop below base scope");
  std::size_t keep = scopes_[scopes_.size() - levels];
  scopes_.resize(scopes_.size() - levels);
  while (undo_.size() > keep) {
    const Undo& u = undo_.back();
    switch (u.kind) {
      case Undo::Kind::Union:
        parent_[u.child] = u.child;
        size_[u.root] = u.old_size;
        const_[u.root] = u.old_const;
        break;
      case Undo::Kind::Edge: {
        const Edge& e = edges_.back();
        adj_[e.a].pop_back();
        adj_[e.b].pop_back();
        edges_.pop_back();
        break;
      }
      case Undo::Kind::Diseq: diseqs_.pop_back(); break;
    }
    undo_.pop_back();
  }
}

}  // namespace strsolve
