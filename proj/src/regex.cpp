// SPDX-License-Identifier: Apache-2.0
#include "strsolve/regex.hpp"

#include <algorithm>
#include <deque>

namespace strsolve::regex {

namespace {

struct Nfa {
  std::vector<std::vector<std::pair<CharRange, std::uint32_t>>> chars;
  std::vector<std::vector<std::uint32_t>> eps;

  std::uint32_t add() {
    chars.emplace_back();
    eps.emplace_back();
    return static_cast<std::uint32_t>(chars.size() - 1);
  }
};

struct Fragment {
  std::uint32_t in;
  std::uint32_t out;
};

Fragment build(const TermManager& tm, Term re, Nfa& nfa) {
  switch (tm.kind(re)) {
    case Kind::ReNone: return {nfa.add(), nfa.add()};
    case Kind::ReToRe: {
      const std::string& s = tm.text(tm.children(re)[0]);
      std::uint32_t in = nfa.add(), cur = in;
      for (unsigned char c : s) {
        std::uint32_t nxt = nfa.add();
        nfa.chars[cur].push_back({CharRange{c, c}, nxt});
        cur = nxt;
      }
      return {in, cur};
    }
    case Kind::ReRange: {
      auto [lo, hi] = tm.range(re);
      std::uint32_t in = nfa.add(), out = nfa.add();
      nfa.chars[in].push_back({CharRange{lo, hi}, out});
      return {in, out};
    }
    case Kind::ReUnion: {
      std::uint32_t in = nfa.add(), out = nfa.add();
      for (Term c : tm.children(re)) {
        Fragment f = build(tm, c, nfa);
        nfa.eps[in].push_back(f.in);
        nfa.eps[f.out].push_back(out);
      }
      return {in, out};
    }
    case Kind::ReConcat: {
      auto kids = tm.children(re);
      Fragment acc = build(tm, kids[0], nfa);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        Fragment f = build(tm, kids[i], nfa);
        nfa.eps[acc.out].push_back(f.in);
        acc.out = f.out;
      }
      return acc;
    }
    case Kind::ReStar: {
      Fragment body = build(tm, tm.children(re)[0], nfa);
      std::uint32_t in = nfa.add(), out = nfa.add();
      nfa.eps[in].push_back(body.in);
      nfa.eps[in].push_back(out);
      nfa.eps[body.out].push_back(body.in);
      nfa.eps[body.out].push_back(out);
      return {in, out};
    }
    case Kind::RePlus: {
      Fragment body = build(tm, tm.children(re)[0], nfa);
      nfa.eps[body.out].push_back(body.in);
      return body;
    }
    default: throw SortError("regex compile: term is not a regular expression");
  }
}

std::vector<std::uint32_t> closure(const Nfa& nfa, std::uint32_t s) {
  std::vector<bool> seen(nfa.eps.size(), false);
  std::vector<std::uint32_t> out, stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    std::uint32_t q = stack.back();
    stack.pop_back();
    out.push_back(q);
    for (std::uint32_t t : nfa.eps[q])
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
  }
  return out;
}

void sort_unique(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool intersects(CharRange r, const Alphabet& a) { return r.hi >= a.lo && r.lo <= a.hi; }

}  // namespace

Automaton compile(const TermManager& tm, Term re) {
  Nfa nfa;
  Fragment top = build(tm, re, nfa);
  const std::size_t n = nfa.chars.size();

  std::vector<std::vector<Automaton::Transition>> out(n);
  std::vector<bool> acc(n, false);
  for (std::uint32_t q = 0; q < n; ++q) {
    for (std::uint32_t c : closure(nfa, q)) {
      if (c == top.out) acc[q] = true;
      for (auto [label, target] : nfa.chars[c]) out[q].push_back({label, target});
    }
  }

  // Trim to states reachable from the start and co-reachable to acceptance.
  std::vector<bool> fwd(n, false), bwd(n, false);
  std::vector<std::uint32_t> stack{top.in};
  fwd[top.in] = true;
  while (!stack.empty()) {
    std::uint32_t q = stack.back();
    stack.pop_back();
    for (const auto& t : out[q])
      if (!fwd[t.target]) {
        fwd[t.target] = true;
        stack.push_back(t.target);
      }
  }
  std::vector<std::vector<std::uint32_t>> rev(n);
  for (std::uint32_t q = 0; q < n; ++q)
    for (const auto& t : out[q]) rev[t.target].push_back(q);
  for (std::uint32_t q = 0; q < n; ++q)
    if (acc[q]) {
      bwd[q] = true;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    std::uint32_t q = stack.back();
    stack.pop_back();
    for (std::uint32_t p : rev[q])
      if (!bwd[p]) {
        bwd[p] = true;
        stack.push_back(p);
      }
  }

  Automaton a;
  if (!bwd[top.in]) {
    a.out_.resize(1);
    a.accepting_.assign(1, false);
    a.start_ = 0;
    return a;
  }
  std::vector<std::uint32_t> remap(n, UINT32_MAX);
  std::uint32_t next = 0;
  remap[top.in] = next++;
  for (std::uint32_t q = 0; q < n; ++q)
    if (q != top.in && fwd[q] && bwd[q]) remap[q] = next++;
  a.out_.resize(next);
  a.accepting_.assign(next, false);
  for (std::uint32_t q = 0; q < n; ++q) {
    if (remap[q] == UINT32_MAX) continue;
    a.accepting_[remap[q]] = acc[q];
    for (const auto& t : out[q])
      if (remap[t.target] != UINT32_MAX) a.out_[remap[q]].push_back({t.label, remap[t.target]});
  }
  a.start_ = 0;
  return a;
}

std::vector<std::vector<bool>> exact_reach(const Automaton& a, std::size_t n, const Alphabet& alpha) {
  std::vector<std::vector<bool>> back(n + 1, std::vector<bool>(a.num_states(), false));
  for (std::uint32_t q = 0; q < a.num_states(); ++q) back[0][q] = a.accepting(q);
  for (std::size_t k = 1; k <= n; ++k)
    for (std::uint32_t q = 0; q < a.num_states(); ++q)
      for (const auto& t : a.transitions(q))
        if (back[k - 1][t.target] && intersects(t.label, alpha)) {
          back[k][q] = true;
          break;
        }
  return back;
}

bool Automaton::empty() const {
  for (bool b : accepting_)
    if (b) return false;
  return true;
}

std::vector<std::uint32_t> Automaton::step(const std::vector<std::uint32_t>& from, unsigned char c) const {
  std::vector<std::uint32_t> next;
  for (std::uint32_t q : from)
    for (const auto& t : out_[q])
      if (t.label.contains(c)) next.push_back(t.target);
  sort_unique(next);
  return next;
}

bool accepts(const Automaton& a, std::string_view s) {
  std::vector<std::uint32_t> cur{a.start()};
  for (unsigned char c : s) {
    cur = a.step(cur, c);
    if (cur.empty()) return false;
  }
  return std::any_of(cur.begin(), cur.end(), [&](std::uint32_t q) { return a.accepting(q); });
}

std::optional<std::size_t> min_accepted_length(const Automaton& a) {
  std::vector<std::size_t> dist(a.num_states(), SIZE_MAX);
  std::deque<std::uint32_t> queue{a.start()};
  dist[a.start()] = 0;
  while (!queue.empty()) {
    std::uint32_t q = queue.front();
    queue.pop_front();
    if (a.accepting(q)) return dist[q];
    for (const auto& t : a.transitions(q))
      if (dist[t.target] == SIZE_MAX) {
        dist[t.target] = dist[q] + 1;
        queue.push_back(t.target);
      }
  }
  return std::nullopt;
}

LengthSlice unfold(const Automaton& a, std::size_t n, const Alphabet& alpha, std::size_t cap) {
  auto back = exact_reach(a, n, alpha);
  LengthSlice slice;
  if (!back[n][a.start()]) {
    slice.words.emplace();
    return slice;
  }

  std::vector<std::string> words;
  bool overflow = false;
  std::string prefix;
  auto dfs = [&](auto&& self, const std::vector<std::uint32_t>& states) -> void {
    if (overflow) return;
    std::size_t remaining = n - prefix.size();
    if (remaining == 0) {
      if (words.size() == cap) {
        overflow = true;
        return;
      }
      words.push_back(prefix);
      return;
    }
    for (unsigned c = alpha.lo; c <= alpha.hi && !overflow; ++c) {
      std::vector<std::uint32_t> next;
      for (std::uint32_t q : states)
        for (const auto& t : a.transitions(q))
          if (t.label.contains(static_cast<unsigned char>(c)) && back[remaining - 1][t.target])
            next.push_back(t.target);
      if (next.empty()) continue;
      sort_unique(next);
      prefix.push_back(static_cast<char>(c));
      self(self, next);
      prefix.pop_back();
    }
  };
  dfs(dfs, {a.start()});
  if (!overflow) {
    slice.words = std::move(words);
    return slice;
  }

  slice.positions.resize(n);
  std::vector<std::uint32_t> frontier{a.start()};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> allowed(256, false);
    std::vector<std::uint32_t> next;
    for (std::uint32_t q : frontier)
      for (const auto& t : a.transitions(q)) {
        if (!back[n - i - 1][t.target]) continue;
        unsigned lo = std::max<unsigned>(t.label.lo, alpha.lo), hi = std::min<unsigned>(t.label.hi, alpha.hi);
        if (lo > hi) continue;
        for (unsigned c = lo; c <= hi; ++c) allowed[c] = true;
        next.push_back(t.target);
      }
    sort_unique(next);
    frontier = std::move(next);
    for (unsigned c = 0; c < 256; ++c) {
      if (!allowed[c]) continue;
      unsigned d = c;
      while (d + 1 < 256 && allowed[d + 1]) ++d;
      slice.positions[i].push_back(CharRange{static_cast<unsigned char>(c), static_cast<unsigned char>(d)});
      c = d;
    }
  }
  return slice;
}

}  // namespace strsolve::regex
