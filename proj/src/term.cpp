// SPDX-License-Identifier: Apache-2.0
#include "strsolve/term.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <unordered_set>

namespace strsolve {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::String: return "String";
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::RegLan: return "RegLan";
  }
  return "?";
}

Alphabet Alphabet::parse(std::string_view text) {
  auto dash = text.find('-', 1);
  if (dash == std::string_view::npos)
    throw std::invalid_argument("alphabet must have the form LO-HI");
  auto lhs = text.substr(0, dash);
  auto rhs = text.substr(dash + 1);
  auto bound = [](std::string_view s) -> unsigned {
    if (s.size() == 1) return static_cast<unsigned char>(s[0]);
    if (s.empty() || s.size() > 3 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw std::invalid_argument("alphabet bound must be one character or a decimal code");
    unsigned v = std::stoul(std::string(s));
    if (v > 255) throw std::invalid_argument("alphabet bound out of range");
    return v;
  };
  unsigned lo = bound(lhs), hi = bound(rhs);
  if (lo > hi) throw std::invalid_argument("alphabet lower bound exceeds upper bound");
  return Alphabet{static_cast<unsigned char>(lo), static_cast<unsigned char>(hi)};
}

Alphabet Alphabet::from_env() {
  if (const char* env = std::getenv("STRSOLVE_ALPHABET"); env && *env) return parse(env);
  return Alphabet{};
}

void LinearForm::add(const LinearForm& other, std::int64_t scale) {
  for (auto [t, c] : other.coeffs) {
    auto& slot = coeffs[t];
    slot += c * scale;
    if (slot == 0) coeffs.erase(t);
  }
  constant += other.constant * scale;
}

TermManager::TermManager(Alphabet alphabet) : alphabet_(alphabet) {}

const TermManager::Node& TermManager::node(Term t) const {
  if (!t.valid() || t.id() >= nodes_.size()) throw std::out_of_range("invalid term handle");
  return nodes_[t.id()];
}

Term TermManager::intern(Node n) {
  std::string key;
  key.reserve(16 + n.text.size() + 4 * n.kids.size());
  key.push_back(static_cast<char>(n.kind));
  key.push_back(static_cast<char>(n.sort));
  auto put = [&key](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) key.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put(n.kids.size());
  for (Term k : n.kids) put(k.id());
  put(static_cast<std::uint64_t>(n.value));
  put(n.coeffs.size());
  for (auto c : n.coeffs) put(static_cast<std::uint64_t>(c));
  key += n.text;

  auto [it, inserted] = table_.try_emplace(std::move(key), static_cast<std::uint32_t>(nodes_.size()));
  if (inserted) nodes_.push_back(std::move(n));
  return Term(it->second);
}

void TermManager::check_sort(Term t, Sort expected, const char* what) const {
  if (sort(t) != expected)
    throw SortError(std::string(what) + ": expected " + sort_name(expected) + ", got " + sort_name(sort(t)));
}

Term TermManager::str_const(std::string_view value) {
  for (unsigned char c : value) {
    if (!alphabet_.contains(c))
      throw AlphabetError("character code " + std::to_string(unsigned(c)) + " is outside the alphabet");
  }
  return intern(Node{Kind::StrConst, Sort::String, {}, std::string(value)});
}

Term TermManager::str_var(std::string_view name) {
  if (!name.empty() && name[0] == kFreshPrefix)
    throw SortError("symbol names starting with '#' are reserved");
  return intern(Node{Kind::StrVar, Sort::String, {}, std::string(name)});
}

Term TermManager::fresh_str_var(std::string_view hint) {
  std::string name(1, kFreshPrefix);
  name += hint;
  name += std::to_string(++fresh_counter_);
  return intern(Node{Kind::StrVar, Sort::String, {}, std::move(name)});
}

Term TermManager::concat(std::span<const Term> parts) {
  std::vector<Term> flat;
  std::string pending;
  bool has_pending = false;
  auto flush = [&] {
    if (has_pending && !pending.empty()) flat.push_back(str_const(pending));
    pending.clear();
    has_pending = false;
  };
  auto push = [&](auto&& self, Term p) -> void {
    check_sort(p, Sort::String, "str.++");
    switch (kind(p)) {
      case Kind::Concat:
        for (Term k : children(p)) self(self, k);
        break;
      case Kind::StrConst:
        pending += text(p);
        has_pending = true;
        break;
      default:
        flush();
        flat.push_back(p);
    }
  };
  for (Term p : parts) push(push, p);
  flush();
  if (flat.empty()) return empty_str();
  if (flat.size() == 1) return flat.front();
  return intern(Node{Kind::Concat, Sort::String, std::move(flat)});
}

Term TermManager::length(Term s) {
  check_sort(s, Sort::String, "str.len");
  switch (kind(s)) {
    case Kind::StrConst: return int_const(static_cast<std::int64_t>(text(s).size()));
    case Kind::StrVar: return intern(Node{Kind::Length, Sort::Int, {s}});
    case Kind::Concat: {
      LinearForm f;
      for (Term p : children(s)) f.add(linearize(length(p)));
      return linear(f);
    }
    default: throw SortError("str.len of non-string term");
  }
}

Term TermManager::int_const(std::int64_t value) {
  Node n{Kind::IntConst, Sort::Int};
  n.value = value;
  return intern(std::move(n));
}

Term TermManager::int_var(std::string_view name) {
  if (!name.empty() && name[0] == kFreshPrefix)
    throw SortError("symbol names starting with '#' are reserved");
  return intern(Node{Kind::IntVar, Sort::Int, {}, std::string(name)});
}

Term TermManager::linear(const LinearForm& form) {
  std::vector<Term> atoms;
  std::vector<std::int64_t> cs;
  for (auto [t, c] : form.coeffs) {
    if (c == 0) continue;
    atoms.push_back(t);
    cs.push_back(c);
  }
  if (atoms.empty()) return int_const(form.constant);
  if (atoms.size() == 1 && cs[0] == 1 && form.constant == 0) return atoms[0];
  Node n{Kind::LinearSum, Sort::Int, std::move(atoms)};
  n.coeffs = std::move(cs);
  n.value = form.constant;
  return intern(std::move(n));
}

LinearForm TermManager::linearize(Term t) const {
  LinearForm f;
  switch (kind(t)) {
    case Kind::IntConst: f.constant = int_value(t); break;
    case Kind::IntVar:
    case Kind::Length: f.coeffs[t] = 1; break;
    case Kind::LinearSum: {
      auto ks = children(t);
      auto cs = coeffs(t);
      for (std::size_t i = 0; i < ks.size(); ++i) f.coeffs[ks[i]] = cs[i];
      f.constant = int_value(t);
      break;
    }
    default: throw SortError("expected an integer term");
  }
  return f;
}

Term TermManager::add(Term a, Term b) {
  check_sort(a, Sort::Int, "+");
  check_sort(b, Sort::Int, "+");
  LinearForm f = linearize(a);
  f.add(linearize(b));
  return linear(f);
}

Term TermManager::sub(Term a, Term b) {
  check_sort(a, Sort::Int, "-");
  check_sort(b, Sort::Int, "-");
  LinearForm f = linearize(a);
  f.add(linearize(b), -1);
  return linear(f);
}

Term TermManager::scale(std::int64_t k, Term a) {
  check_sort(a, Sort::Int, "*");
  LinearForm f;
  f.add(linearize(a), k);
  return linear(f);
}

Term TermManager::bool_const(bool value) {
  Node n{Kind::BoolConst, Sort::Bool};
  n.value = value ? 1 : 0;
  return intern(std::move(n));
}

Term TermManager::bool_var(std::string_view name) {
  return intern(Node{Kind::BoolVar, Sort::Bool, {}, std::string(name)});
}

namespace {

std::int64_t gcd_of(const LinearForm& f) {
  std::int64_t g = 0;
  for (auto [t, c] : f.coeffs) g = std::gcd(g, c < 0 ? -c : c);
  return g;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Term TermManager::eq(Term lhs, Term rhs) {
  if (sort(lhs) != sort(rhs))
    throw SortError(std::string("=: argument sorts differ (") + sort_name(sort(lhs)) + " vs " + sort_name(sort(rhs)) + ")");
  switch (sort(lhs)) {
    case Sort::String: {
      if (rhs < lhs) std::swap(lhs, rhs);
      return intern(Node{Kind::Eq, Sort::Bool, {lhs, rhs}});
    }
    case Sort::Int: {
      // Normal form: sum = k with gcd-reduced coefficients and a positive
      // leading coefficient.
      LinearForm f = linearize(lhs);
      f.add(linearize(rhs), -1);
      if (f.is_constant()) return bool_const(f.constant == 0);
      std::int64_t g = gcd_of(f);
      if (f.constant % g != 0) return false_term();
      std::int64_t sign = f.coeffs.begin()->second < 0 ? -1 : 1;
      LinearForm s;
      for (auto [t, c] : f.coeffs) s.coeffs[t] = sign * c / g;
      std::int64_t k = -sign * f.constant / g;
      return intern(Node{Kind::Eq, Sort::Bool, {linear(s), int_const(k)}});
    }
    case Sort::Bool: {
      Term a = mk_or({mk_not(lhs), rhs});
      Term b = mk_or({lhs, mk_not(rhs)});
      return mk_and({a, b});
    }
    case Sort::RegLan: throw SortError("=: equality over RegLan is not supported");
  }
  throw SortError("=: bad sort");
}

Term TermManager::less_eq(Term lhs, Term rhs) {
  check_sort(lhs, Sort::Int, "<=");
  check_sort(rhs, Sort::Int, "<=");
  LinearForm f = linearize(lhs);
  f.add(linearize(rhs), -1);
  if (f.is_constant()) return bool_const(f.constant <= 0);
  std::int64_t g = gcd_of(f);
  LinearForm s;
  for (auto [t, c] : f.coeffs) s.coeffs[t] = c / g;
  std::int64_t k = floor_div(-f.constant, g);
  return intern(Node{Kind::LessEq, Sort::Bool, {linear(s), int_const(k)}});
}

Term TermManager::in_re(Term s, Term re) {
  check_sort(s, Sort::String, "str.in_re");
  check_sort(re, Sort::RegLan, "str.in_re");
  return intern(Node{Kind::InRe, Sort::Bool, {s, re}});
}

Term TermManager::mk_not(Term t) {
  check_sort(t, Sort::Bool, "not");
  if (kind(t) == Kind::Not) return children(t)[0];
  if (kind(t) == Kind::BoolConst) return bool_const(!bool_value(t));
  return intern(Node{Kind::Not, Sort::Bool, {t}});
}

Term TermManager::mk_nary_bool(Kind k, std::span<const Term> ts) {
  const bool neutral = (k == Kind::And);
  std::vector<Term> flat;
  std::unordered_set<std::uint32_t> seen;
  auto push = [&](auto&& self, Term t) -> bool {
    check_sort(t, Sort::Bool, k == Kind::And ? "and" : "or");
    if (kind(t) == k) {
      for (Term c : children(t))
        if (!self(self, c)) return false;
      return true;
    }
    if (kind(t) == Kind::BoolConst) return bool_value(t) == neutral;
    if (seen.insert(t.id()).second) flat.push_back(t);
    return true;
  };
  for (Term t : ts)
    if (!push(push, t)) return bool_const(!neutral);
  if (flat.empty()) return bool_const(neutral);
  if (flat.size() == 1) return flat[0];
  return intern(Node{k, Sort::Bool, std::move(flat)});
}

Term TermManager::mk_and(std::span<const Term> ts) { return mk_nary_bool(Kind::And, ts); }
Term TermManager::mk_or(std::span<const Term> ts) { return mk_nary_bool(Kind::Or, ts); }

Term TermManager::re_none() { return intern(Node{Kind::ReNone, Sort::RegLan}); }

Term TermManager::re_to_re(Term s) {
  if (kind(s) != Kind::StrConst) throw SortError("str.to_re: argument must be a string literal");
  return intern(Node{Kind::ReToRe, Sort::RegLan, {s}});
}

Term TermManager::re_range(unsigned char lo, unsigned char hi) {
  if (lo > hi) return re_none();
  Node n{Kind::ReRange, Sort::RegLan};
  n.text = std::string{static_cast<char>(lo), static_cast<char>(hi)};
  return intern(std::move(n));
}

std::pair<unsigned char, unsigned char> TermManager::range(Term t) const {
  const auto& n = node(t);
  if (n.kind != Kind::ReRange) throw std::logic_error("range() on non-range term");
  return {static_cast<unsigned char>(n.text[0]), static_cast<unsigned char>(n.text[1])};
}

Term TermManager::re_union(std::span<const Term> rs) {
  std::vector<Term> flat;
  std::unordered_set<std::uint32_t> seen;
  auto push = [&](auto&& self, Term r) -> void {
    check_sort(r, Sort::RegLan, "re.union");
    if (kind(r) == Kind::ReUnion) {
      for (Term c : children(r)) self(self, c);
    } else if (kind(r) != Kind::ReNone && seen.insert(r.id()).second) {
      flat.push_back(r);
    }
  };
  for (Term r : rs) push(push, r);
  if (flat.empty()) return re_none();
  if (flat.size() == 1) return flat[0];
  return intern(Node{Kind::ReUnion, Sort::RegLan, std::move(flat)});
}

Term TermManager::re_concat(std::span<const Term> rs) {
  std::vector<Term> flat;
  Term eps = re_to_re(empty_str());
  bool empty_lang = false;
  auto push = [&](auto&& self, Term r) -> void {
    check_sort(r, Sort::RegLan, "re.++");
    if (kind(r) == Kind::ReConcat) {
      for (Term c : children(r)) self(self, c);
    } else if (kind(r) == Kind::ReNone) {
      empty_lang = true;
    } else if (r != eps) {
      flat.push_back(r);
    }
  };
  for (Term r : rs) push(push, r);
  if (empty_lang) return re_none();
  if (flat.empty()) return eps;
  if (flat.size() == 1) return flat[0];
  return intern(Node{Kind::ReConcat, Sort::RegLan, std::move(flat)});
}

Term TermManager::re_star(Term r) {
  check_sort(r, Sort::RegLan, "re.*");
  Term eps = re_to_re(empty_str());
  if (kind(r) == Kind::ReStar) return r;
  if (kind(r) == Kind::ReNone || r == eps) return eps;
  if (kind(r) == Kind::RePlus) r = children(r)[0];
  return intern(Node{Kind::ReStar, Sort::RegLan, {r}});
}

Term TermManager::re_plus(Term r) {
  check_sort(r, Sort::RegLan, "re.+");
  Term eps = re_to_re(empty_str());
  if (kind(r) == Kind::ReNone) return r;
  if (r == eps || kind(r) == Kind::ReStar || kind(r) == Kind::RePlus) return r;
  return intern(Node{Kind::RePlus, Sort::RegLan, {r}});
}

Term TermManager::re_opt(Term r) {
  Term alts[] = {r, re_to_re(empty_str())};
  return re_union(alts);
}

bool TermManager::is_var(Term t) const {
  Kind k = kind(t);
  return k == Kind::StrVar || k == Kind::IntVar || k == Kind::BoolVar;
}

bool TermManager::is_fresh(Term t) const {
  return kind(t) == Kind::StrVar && !text(t).empty() && text(t)[0] == kFreshPrefix;
}

std::vector<Term> TermManager::parts(Term s) const {
  switch (kind(s)) {
    case Kind::Concat: return {children(s).begin(), children(s).end()};
    case Kind::StrConst:
      if (text(s).empty()) return {};
      return {s};
    case Kind::StrVar: return {s};
    default: throw SortError("parts() of non-string term");
  }
}

std::vector<Term> TermManager::free_vars(Term t) const {
  std::vector<Term> out;
  std::unordered_set<std::uint32_t> seen;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur.id()).second) continue;
    if (is_var(cur)) out.push_back(cur);
    for (Term c : children(cur)) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Term TermManager::substitute(Term t, const std::unordered_map<Term, Term, TermHash>& binding) {
  std::unordered_map<Term, Term, TermHash> memo;
  auto go = [&](auto&& self, Term cur) -> Term {
    if (auto it = binding.find(cur); it != binding.end()) {
      if (sort(it->second) != sort(cur)) throw SortError("substitute: binding changes sort");
      return it->second;
    }
    if (auto it = memo.find(cur); it != memo.end()) return it->second;
    std::vector<Term> kids;
    for (Term c : children(cur)) kids.push_back(self(self, c));
    Term out = cur;
    switch (kind(cur)) {
      case Kind::Concat: out = concat(kids); break;
      case Kind::Length: out = length(kids[0]); break;
      case Kind::LinearSum: {
        LinearForm f;
        f.constant = int_value(cur);
        auto cs = coeffs(cur);
        for (std::size_t i = 0; i < kids.size(); ++i) f.add(linearize(kids[i]), cs[i]);
        out = linear(f);
        break;
      }
      case Kind::Eq: out = eq(kids[0], kids[1]); break;
      case Kind::LessEq: out = less_eq(kids[0], kids[1]); break;
      case Kind::InRe: out = in_re(kids[0], kids[1]); break;
      case Kind::Not: out = mk_not(kids[0]); break;
      case Kind::And: out = mk_and(kids); break;
      case Kind::Or: out = mk_or(kids); break;
      default: break;  // leaves and regexes contain no variables
    }
    out = simplify(out);
    memo.emplace(cur, out);
    return out;
  };
  return go(go, t);
}

Term TermManager::simplify(Term t) {
  switch (kind(t)) {
    case Kind::Eq: {
      Term a = children(t)[0], b = children(t)[1];
      if (a == b) return true_term();
      if (sort(a) == Sort::String && kind(a) == Kind::StrConst && kind(b) == Kind::StrConst)
        return false_term();
      return t;
    }
    case Kind::Not: return mk_not(simplify(children(t)[0]));
    case Kind::And:
    case Kind::Or: {
      std::vector<Term> kids;
      for (Term c : children(t)) kids.push_back(simplify(c));
      return kind(t) == Kind::And ? mk_and(kids) : mk_or(kids);
    }
    default: return t;
  }
}

}  // namespace strsolve
