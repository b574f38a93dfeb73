// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace strsolve {

enum class Sort : std::uint8_t { String, Int, Bool, RegLan };

const char* sort_name(Sort s);

enum class Kind : std::uint8_t {
  // String sort
  StrConst,
  StrVar,
  Concat,
  // Int sort
  Length,
  IntConst,
  IntVar,
  LinearSum,
  // Bool sort
  BoolConst,
  BoolVar,
  Eq,
  LessEq,
  InRe,
  Not,
  And,
  Or,
  // RegLan sort
  ReNone,
  ReToRe,
  ReRange,
  ReUnion,
  ReConcat,
  ReStar,
  RePlus,
};

/// Handle to an interned term. Two handles compare equal iff the terms are
/// structurally identical after normalization.
class Term {
 public:
  static constexpr std::uint32_t kInvalid = 0xffffffffu;

  constexpr Term() = default;
  constexpr explicit Term(std::uint32_t id) : id_(id) {}

  constexpr std::uint32_t id() const { return id_; }
  constexpr bool valid() const { return id_ != kInvalid; }

  friend constexpr auto operator<=>(Term, Term) = default;

 private:
  std::uint32_t id_ = kInvalid;
};

struct TermHash {
  std::size_t operator()(Term t) const noexcept { return std::hash<std::uint32_t>{}(t.id()); }
};

class SortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A string constant used a character outside the configured alphabet.
class AlphabetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contiguous character range strings are drawn from.
struct Alphabet {
  unsigned char lo = 32;
  unsigned char hi = 126;

  bool contains(unsigned char c) const { return c >= lo && c <= hi; }
  unsigned size() const { return unsigned(hi) - unsigned(lo) + 1; }

  /// Parses "a-b" (two characters) or "97-98" (decimal codes).
  static Alphabet parse(std::string_view text);
  /// Default alphabet, overridden by STRSOLVE_ALPHABET when set.
  static Alphabet from_env();

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

/// A linear integer form: sum of coeff*atom plus a constant. Atoms are
/// Length(StrVar) or IntVar terms.
struct LinearForm {
  std::map<Term, std::int64_t> coeffs;
  std::int64_t constant = 0;

  void add(const LinearForm& other, std::int64_t scale = 1);
  bool is_constant() const { return coeffs.empty(); }
};

class TermManager {
 public:
  explicit TermManager(Alphabet alphabet = Alphabet{});

  const Alphabet& alphabet() const { return alphabet_; }

  // Strings
  Term str_const(std::string_view value);
  Term empty_str() { return str_const(""); }
  Term str_var(std::string_view name);
  /// Fresh variable with a reserved prefix that cannot collide with user
  /// symbols.
  Term fresh_str_var(std::string_view hint = "s");
  Term concat(std::span<const Term> parts);
  Term concat(std::initializer_list<Term> parts) { return concat(std::span<const Term>(parts.begin(), parts.size())); }

  // Integers
  Term length(Term s);
  Term int_const(std::int64_t value);
  Term int_var(std::string_view name);
  Term linear(const LinearForm& form);
  Term add(Term a, Term b);
  Term sub(Term a, Term b);
  Term scale(std::int64_t k, Term a);
  LinearForm linearize(Term t) const;

  // Booleans
  Term bool_const(bool value);
  Term true_term() { return bool_const(true); }
  Term false_term() { return bool_const(false); }
  Term bool_var(std::string_view name);
  Term eq(Term lhs, Term rhs);
  /// lhs <= rhs over Int, normalized to LessEq(sum, k).
  Term less_eq(Term lhs, Term rhs);
  Term in_re(Term s, Term re);
  Term mk_not(Term t);
  Term mk_and(std::span<const Term> ts);
  Term mk_and(std::initializer_list<Term> ts) { return mk_and(std::span<const Term>(ts.begin(), ts.size())); }
  Term mk_or(std::span<const Term> ts);
  Term mk_or(std::initializer_list<Term> ts) { return mk_or(std::span<const Term>(ts.begin(), ts.size())); }

  // Regular expressions
  Term re_none();
  Term re_to_re(Term str_const);
  Term re_range(unsigned char lo, unsigned char hi);
  Term re_union(std::span<const Term> rs);
  Term re_concat(std::span<const Term> rs);
  Term re_star(Term r);
  Term re_plus(Term r);
  Term re_opt(Term r);
  Term re_allchar() { return re_range(alphabet_.lo, alphabet_.hi); }

  // Accessors
  Kind kind(Term t) const { return node(t).kind; }
  Sort sort(Term t) const { return node(t).sort; }
  std::span<const Term> children(Term t) const { return node(t).kids; }
  /// Constant value of StrConst, or name of a variable.
  const std::string& text(Term t) const { return node(t).text; }
  std::int64_t int_value(Term t) const { return node(t).value; }
  bool bool_value(Term t) const { return node(t).value != 0; }
  std::span<const std::int64_t> coeffs(Term t) const { return node(t).coeffs; }
  std::pair<unsigned char, unsigned char> range(Term t) const;
  bool is_var(Term t) const;
  bool is_fresh(Term t) const;
  /// Parts of a string term viewed as a concatenation ("" has no parts).
  std::vector<Term> parts(Term s) const;
  std::size_t size() const { return nodes_.size(); }

  /// Every StrVar / IntVar / BoolVar occurring in t, ordered by id.
  std::vector<Term> free_vars(Term t) const;
  /// Replaces variables and re-normalizes through the interning constructors.
  Term substitute(Term t, const std::unordered_map<Term, Term, TermHash>& binding);
  /// Folds ground atoms: Eq(t,t) -> true, Eq of distinct constants -> false,
  /// ground comparisons, and Boolean connectives over constants.
  Term simplify(Term t);

 private:
  struct Node {
    Kind kind;
    Sort sort;
    std::vector<Term> kids{};
    std::string text{};
    std::int64_t value = 0;
    std::vector<std::int64_t> coeffs{};
  };

  const Node& node(Term t) const;
  Term intern(Node n);
  void check_sort(Term t, Sort expected, const char* what) const;
  Term mk_nary_bool(Kind k, std::span<const Term> ts);

  Alphabet alphabet_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::uint32_t> table_;
  std::uint32_t fresh_counter_ = 0;
};

/// Reserved leading character of fresh variable names.
inline constexpr char kFreshPrefix = '#';

}  // namespace strsolve
