// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "strsolve/model.hpp"
#include "strsolve/term.hpp"

namespace strsolve::smtlib {

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Any syntax or elaboration failure. Always carries a source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(Position pos, const std::string& message);
  Position position() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  Position pos_;
  std::string message_;
};

enum class TokenKind : std::uint8_t { LParen, RParen, Symbol, StringLit, Numeral, Keyword };

struct Token {
  TokenKind kind;
  std::string text;  // decoded value for string literals, bare name for |quoted| symbols
  Position pos;
};

/// Splits text into tokens, skipping whitespace and ';' comments. String
/// literals are decoded against the alphabet.
std::vector<Token> tokenize(std::string_view text, const Alphabet& alphabet = Alphabet{});

/// Decodes a double-quoted lexeme: "" is a quote, \xNN a byte.
std::string decode_string_literal(std::string_view lexeme, const Alphabet& alphabet = Alphabet{},
                                  Position pos = {});
/// Inverse of decode_string_literal, quotes included.
std::string encode_string_literal(std::string_view value);

struct SExpr {
  bool is_list = false;
  Token atom{TokenKind::Symbol, {}, {}};
  std::vector<SExpr> items;
  Position pos;
};

enum class CommandKind : std::uint8_t {
  DeclareFun,
  DefineFun,
  Assert,
  CheckSat,
  GetModel,
  SetLogic,
  SetOption,
  SetInfo,
  Exit,
};

struct Command {
  CommandKind kind;
  Position pos;
  std::vector<SExpr> args;
};

struct Script {
  std::vector<Command> commands;
};

Script parse_script(std::span<const Token> tokens);
inline Script parse_script(const std::vector<Token>& tokens) { return parse_script(std::span<const Token>(tokens)); }

struct Elaborated {
  std::vector<Term> assertions;
  /// Declared constants in declaration order.
  std::vector<std::pair<std::string, Term>> declarations;
  /// First recognized-but-unsupported construct, if any.
  std::optional<std::string> unsupported;
  std::size_t check_sats = 0;
  bool get_model = false;
  bool produce_models = false;
};

Elaborated elaborate(TermManager& tm, const Script& script);

/// Tokenize, parse and elaborate in one go.
Elaborated load(TermManager& tm, std::string_view text);

std::string print_term(const TermManager& tm, Term t);
std::string print_sort(Sort s);
/// Declarations followed by one assert per assertion.
std::string print_script(const TermManager& tm, const Elaborated& e);
/// (model (define-fun x () String "...") ...), in declaration order.
std::string print_model(const TermManager& tm, const std::vector<std::pair<std::string, Term>>& decls,
                        const Model& m);

}  // namespace strsolve::smtlib
