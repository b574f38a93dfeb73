// SPDX-License-Identifier: Apache-2.0
#include "strsolve/model_builder.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace strsolve {

namespace {

// Entries >= 0 are positions; c < 0 encodes the character -(c + 1).
using Seq = std::vector<std::int64_t>;

std::int64_t enc(unsigned char c) { return -static_cast<std::int64_t>(c) - 1; }
unsigned char dec(std::int64_t e) { return static_cast<unsigned char>(-e - 1); }

class Search {
 public:
  Search(const TermManager& tm, const WordProblem& p, const Alphabet& alpha, const WordLimits& lim)
      : tm_(tm), p_(p), alpha_(alpha), lim_(lim) {}

  WordResult run();

 private:
  struct Check {
    Seq seq;          // over positions / characters
    Seq other;        // second side of a disequality
    const regex::Automaton* automaton = nullptr;
    bool positive = true;
    bool is_diseq = false;
    std::int64_t needs = -1;  // last search index it depends on
    std::vector<std::vector<bool>> reach;
  };

  Seq seq_of(Term t) const;
  std::uint32_t root(std::uint32_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unify(std::int64_t a, std::int64_t b);
  // Character at an entry, or -1 when still open.
  int char_at(std::int64_t e) const;
  bool full_check(const Check& c) const;
  bool prefix_ok(const Check& c) const;
  void build_blocks();
  bool dfs(std::size_t k);

  const TermManager& tm_;
  const WordProblem& p_;
  const Alphabet& alpha_;
  const WordLimits& lim_;

  std::map<Term, std::size_t> offset_;
  std::vector<std::uint32_t> parent_;
  std::vector<int> fixed_;            // by root
  std::vector<std::int64_t> order_;   // search index by root, -1 if fixed
  std::vector<std::uint32_t> free_;   // roots in search order
  std::vector<int> value_;            // by search index
  std::vector<Check> checks_;
  std::vector<std::vector<std::size_t>> due_;  // checks by search index
  std::vector<std::size_t> prefix_checks_;
  std::vector<int> block_of_;          // by character
  std::vector<std::vector<unsigned char>> blocks_;
  std::vector<int> used_;              // by character
  std::size_t nodes_ = 0;
  bool aborted_ = false, timed_out_ = false;
};

Seq Search::seq_of(Term t) const {
  Seq out;
  for (Term part : tm_.parts(t)) {
    if (tm_.kind(part) == Kind::StrConst) {
      for (unsigned char c : tm_.text(part)) out.push_back(enc(c));
      continue;
    }
    auto it = offset_.find(part);
    if (it == offset_.end()) throw std::logic_error("word problem: variable without a length");
    std::size_t n = p_.lengths.at(part);
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::int64_t>(it->second + i));
  }
  return out;
}

bool Search::unify(std::int64_t a, std::int64_t b) {
  if (a < 0 && b < 0) return a == b;
  if (a < 0) std::swap(a, b);
  std::uint32_t ra = root(static_cast<std::uint32_t>(a));
  if (b < 0) {
    int c = dec(b);
    if (fixed_[ra] >= 0) return fixed_[ra] == c;
    fixed_[ra] = c;
    return true;
  }
  std::uint32_t rb = root(static_cast<std::uint32_t>(b));
  if (ra == rb) return true;
  if (fixed_[ra] >= 0 && fixed_[rb] >= 0 && fixed_[ra] != fixed_[rb]) return false;
  if (fixed_[ra] < 0) fixed_[ra] = fixed_[rb];
  parent_[rb] = ra;
  return true;
}

int Search::char_at(std::int64_t e) const {
  if (e < 0) return dec(e);
  std::uint32_t r = static_cast<std::uint32_t>(e);
  while (parent_[r] != r) r = parent_[r];
  if (fixed_[r] >= 0) return fixed_[r];
  return value_[static_cast<std::size_t>(order_[r])];
}

bool Search::full_check(const Check& c) const {
  if (c.is_diseq) {
    for (std::size_t i = 0; i < c.seq.size(); ++i)
      if (char_at(c.seq[i]) != char_at(c.other[i])) return true;
    return false;
  }
  std::string s;
  for (auto e : c.seq) s.push_back(static_cast<char>(char_at(e)));
  return regex::accepts(*c.automaton, s) == c.positive;
}

bool Search::prefix_ok(const Check& c) const {
  std::vector<std::uint32_t> states{c.automaton->start()};
  for (std::size_t i = 0; i < c.seq.size(); ++i) {
    int ch = char_at(c.seq[i]);
    if (ch < 0) break;
    states = c.automaton->step(states, static_cast<unsigned char>(ch));
    std::size_t rest = c.seq.size() - i - 1;
    std::erase_if(states, [&](std::uint32_t q) { return !c.reach[rest][q]; });
    if (states.empty()) return false;
  }
  return true;
}

void Search::build_blocks() {
  std::set<unsigned char> distinguished;
  auto note_consts = [&](Term t) {
    for (Term part : tm_.parts(t))
      if (tm_.kind(part) == Kind::StrConst)
        for (unsigned char c : tm_.text(part)) distinguished.insert(c);
  };
  for (auto& [a, b] : p_.equalities) {
    note_consts(a);
    note_consts(b);
  }
  for (auto& [a, b] : p_.disequalities) {
    note_consts(a);
    note_consts(b);
  }
  std::vector<regex::CharRange> labels;
  for (const auto& m : p_.memberships) {
    note_consts(m.subject);
    for (std::uint32_t q = 0; q < m.automaton->num_states(); ++q)
      for (const auto& t : m.automaton->transitions(q)) labels.push_back(t.label);
  }
  std::sort(labels.begin(), labels.end(), [](auto x, auto y) { return std::pair(x.lo, x.hi) < std::pair(y.lo, y.hi); });
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  block_of_.assign(256, -1);
  std::map<std::vector<bool>, int> by_signature;
  for (unsigned c = alpha_.lo; c <= alpha_.hi; ++c) {
    auto ch = static_cast<unsigned char>(c);
    if (distinguished.count(ch)) {
      block_of_[c] = static_cast<int>(blocks_.size());
      blocks_.push_back({ch});
      continue;
    }
    std::vector<bool> sig;
    for (auto r : labels) sig.push_back(r.contains(ch));
    auto [it, inserted] = by_signature.try_emplace(sig, static_cast<int>(blocks_.size()));
    if (inserted) blocks_.emplace_back();
    block_of_[c] = it->second;
    blocks_[it->second].push_back(ch);
  }
}

bool Search::dfs(std::size_t k) {
  if (k == free_.size()) return true;
  if (++nodes_ > lim_.max_nodes) {
    aborted_ = true;
    return false;
  }
  if ((nodes_ & 1023u) == 0 && lim_.deadline && std::chrono::steady_clock::now() >= *lim_.deadline) {
    timed_out_ = true;
    return false;
  }
  for (unsigned c = alpha_.lo; c <= alpha_.hi; ++c) {
    const auto& blk = blocks_[block_of_[c]];
    if (blk.size() > 1 && used_[c] == 0) {
      // Only the first unused character of an interchangeable block is tried.
      auto first = std::find_if(blk.begin(), blk.end(), [&](unsigned char d) { return used_[d] == 0; });
      if (*first != c) continue;
    }
    value_[k] = static_cast<int>(c);
    ++used_[c];
    bool ok = true;
    for (std::size_t ci : due_[k])
      if (!full_check(checks_[ci])) {
        ok = false;
        break;
      }
    if (ok)
      for (std::size_t ci : prefix_checks_)
        if (checks_[ci].needs > static_cast<std::int64_t>(k) && !prefix_ok(checks_[ci])) {
          ok = false;
          break;
        }
    if (ok && dfs(k + 1)) return true;
    --used_[c];
    value_[k] = -1;
    if (aborted_ || timed_out_) return false;
  }
  return false;
}

WordResult Search::run() {
  WordResult res;
  std::size_t total = 0;
  for (auto& [v, n] : p_.lengths) {
    offset_[v] = total;
    total += n;
  }
  parent_.resize(total);
  for (std::uint32_t i = 0; i < total; ++i) parent_[i] = i;
  fixed_.assign(total, -1);

  for (auto& [a, b] : p_.equalities) {
    Seq sa = seq_of(a), sb = seq_of(b);
    if (sa.size() != sb.size()) return res;
    for (std::size_t i = 0; i < sa.size(); ++i)
      if (!unify(sa[i], sb[i])) return res;
  }

  order_.assign(total, -1);
  for (std::uint32_t i = 0; i < total; ++i) {
    std::uint32_t r = root(i);
    if (fixed_[r] < 0 && order_[r] < 0) {
      order_[r] = static_cast<std::int64_t>(free_.size());
      free_.push_back(r);
    }
  }
  // Flatten so char_at can walk const parents.
  for (std::uint32_t i = 0; i < total; ++i) parent_[i] = root(i);
  value_.assign(free_.size(), -1);
  due_.resize(free_.size());

  auto needs_of = [&](const Seq& s) {
    std::int64_t m = -1;
    for (auto e : s)
      if (e >= 0) m = std::max(m, order_[parent_[static_cast<std::size_t>(e)]]);
    return m;
  };

  for (auto& [a, b] : p_.disequalities) {
    Check c;
    c.is_diseq = true;
    c.seq = seq_of(a);
    c.other = seq_of(b);
    if (c.seq.size() != c.other.size()) continue;
    c.needs = std::max(needs_of(c.seq), needs_of(c.other));
    checks_.push_back(std::move(c));
  }
  for (const auto& m : p_.memberships) {
    Check c;
    c.seq = seq_of(m.subject);
    c.automaton = m.automaton;
    c.positive = m.positive;
    c.needs = needs_of(c.seq);
    if (m.positive) c.reach = regex::exact_reach(*m.automaton, c.seq.size(), alpha_);
    checks_.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < checks_.size(); ++i) {
    if (checks_[i].needs < 0) {
      if (!full_check(checks_[i])) return res;
    } else {
      due_[static_cast<std::size_t>(checks_[i].needs)].push_back(i);
      if (!checks_[i].is_diseq && checks_[i].positive) {
        prefix_checks_.push_back(i);
        if (!prefix_ok(checks_[i])) return res;
      }
    }
  }

  build_blocks();
  used_.assign(256, 0);
  bool found = dfs(0);
  res.nodes = nodes_;
  if (!found) {
    res.status = timed_out_ ? WordStatus::Timeout : aborted_ ? WordStatus::Aborted : WordStatus::Unsat;
    return res;
  }
  res.status = WordStatus::Sat;
  for (auto& [v, n] : p_.lengths) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(char_at(static_cast<std::int64_t>(offset_[v] + i))));
    res.values[v] = std::move(s);
  }
  return res;
}

}  // namespace

WordResult solve_words(const TermManager& tm, const WordProblem& problem, const Alphabet& alphabet,
                       const WordLimits& limits) {
  Search s(tm, problem, alphabet, limits);
  return s.run();
}

}  // namespace strsolve
