// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "strsolve/term.hpp"

namespace strsolve::regex {

struct CharRange {
  unsigned char lo;
  unsigned char hi;

  bool contains(unsigned char c) const { return c >= lo && c <= hi; }
  friend bool operator==(const CharRange&, const CharRange&) = default;
};

/// Epsilon-free nondeterministic automaton with range-labelled transitions.
class Automaton {
 public:
  struct Transition {
    CharRange label;
    std::uint32_t target;
  };

  std::uint32_t num_states() const { return static_cast<std::uint32_t>(out_.size()); }
  std::uint32_t start() const { return start_; }
  bool accepting(std::uint32_t s) const { return accepting_[s]; }
  const std::vector<Transition>& transitions(std::uint32_t s) const { return out_[s]; }
  /// True when no word is accepted.
  bool empty() const;

  /// States reachable from `from` on character c.
  std::vector<std::uint32_t> step(const std::vector<std::uint32_t>& from, unsigned char c) const;

 private:
  friend Automaton compile(const TermManager&, Term);

  std::vector<std::vector<Transition>> out_;
  std::vector<bool> accepting_;
  std::uint32_t start_ = 0;
};

/// Thompson construction followed by epsilon elimination and trimming.
Automaton compile(const TermManager& tm, Term re);

bool accepts(const Automaton& a, std::string_view s);

/// Length of a shortest accepted word, or nullopt for the empty language.
std::optional<std::size_t> min_accepted_length(const Automaton& a);

/// reach[k][q] holds when some accepting state is reachable from q in exactly
/// k steps over alphabet characters, for k = 0..n.
std::vector<std::vector<bool>> exact_reach(const Automaton& a, std::size_t n, const Alphabet& alphabet);

/// Result of slicing an automaton's language at one fixed length.
struct LengthSlice {
  /// Accepted words of the requested length, when there are at most the
  /// enumeration cap of them.
  std::optional<std::vector<std::string>> words;
  /// Otherwise, for each position the characters that occur there in some
  /// accepted word of that length.
  std::vector<std::vector<CharRange>> positions;

  bool is_empty() const { return words && words->empty(); }
};

inline constexpr std::size_t kUnfoldCap = 256;

/// Accepted words of length n over the alphabet (enumerated if at most `cap`),
/// otherwise per-position character ranges from n-step reachability.
LengthSlice unfold(const Automaton& a, std::size_t n, const Alphabet& alphabet, std::size_t cap = kUnfoldCap);

}  // namespace strsolve::regex
