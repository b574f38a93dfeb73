// SPDX-License-Identifier: Apache-2.0
#include "strsolve/smtlib.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace strsolve::smtlib {

ParseError::ParseError(Position pos, const std::string& message)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
      pos_(pos),
      message_(message) {}

// ---------------------------------------------------------------------------
// lexing

namespace {

bool symbol_char(unsigned char c) {
  if (std::isalnum(c)) return true;
  switch (c) {
    case '~': case '!': case '@': case '$': case '%': case '^': case '&': case '*':
    case '_': case '-': case '+': case '=': case '<': case '>': case '.': case '?': case '/':
      return true;
    default: return false;
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr std::size_t kMaxDepth = 1000;
constexpr std::int64_t kMaxNumeral = 1'000'000'000'000LL;
constexpr std::int64_t kMaxCoeff = std::int64_t(1) << 48;

}  // namespace

std::string decode_string_literal(std::string_view lex, const Alphabet& alphabet, Position pos) {
  if (lex.size() < 2 || lex.front() != '"' || lex.back() != '"')
    throw ParseError(pos, "string literal must be enclosed in double quotes");
  std::string_view body = lex.substr(1, lex.size() - 2);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '"') {
      if (i + 1 >= body.size() || body[i + 1] != '"') throw ParseError(pos, "lone double quote inside string literal");
      ++i;
    } else if (c == '\\' && i + 3 < body.size() && body[i + 1] == 'x' && hex_value(body[i + 2]) >= 0 &&
               hex_value(body[i + 3]) >= 0) {
      c = static_cast<char>(hex_value(body[i + 2]) * 16 + hex_value(body[i + 3]));
      i += 3;
    }
    if (!alphabet.contains(static_cast<unsigned char>(c)))
      throw ParseError(pos, "character code " + std::to_string(unsigned(static_cast<unsigned char>(c))) +
                                " in string literal is outside the alphabet");
    out.push_back(c);
  }
  return out;
}

std::string encode_string_literal(std::string_view value) {
  static const char* digits = "0123456789abcdef";
  std::string out = "\"";
  for (char c : value) {
    auto u = static_cast<unsigned char>(c);
    if (c == '"') {
      out += "\"\"";
    } else if (c == '\\' || u < 32 || u > 126) {
      out += "\\x";
      out.push_back(digits[u >> 4]);
      out.push_back(digits[u & 15]);
    } else {
      out.push_back(c);
    }
  }
  out += '"';
  return out;
}

std::vector<Token> tokenize(std::string_view text, const Alphabet& alphabet) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    Position pos{line, col};
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      advance(1);
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (c == '(') {
      out.push_back({TokenKind::LParen, "(", pos});
      advance(1);
    } else if (c == ')') {
      out.push_back({TokenKind::RParen, ")", pos});
      advance(1);
    } else if (c == '"') {
      std::size_t j = i + 1;
      for (;;) {
        if (j >= text.size()) throw ParseError(pos, "unterminated string literal");
        if (text[j] == '"') {
          if (j + 1 < text.size() && text[j + 1] == '"') {
            j += 2;
            continue;
          }
          break;
        }
        ++j;
      }
      std::string_view lex = text.substr(i, j - i + 1);
      out.push_back({TokenKind::StringLit, decode_string_literal(lex, alphabet, pos), pos});
      advance(lex.size());
    } else if (c == '|') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '|') {
        if (text[j] == '\\') throw ParseError(pos, "backslash in quoted symbol");
        ++j;
      }
      if (j >= text.size()) throw ParseError(pos, "unterminated quoted symbol");
      out.push_back({TokenKind::Symbol, std::string(text.substr(i + 1, j - i - 1)), pos});
      advance(j - i + 1);
    } else if (c == ':') {
      std::size_t j = i + 1;
      while (j < text.size() && symbol_char(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i + 1) throw ParseError(pos, "empty keyword");
      out.push_back({TokenKind::Keyword, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && (text[j] == '.' || symbol_char(static_cast<unsigned char>(text[j]))))
        throw ParseError(pos, "malformed numeral");
      out.push_back({TokenKind::Numeral, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
    } else if (symbol_char(c)) {
      std::size_t j = i;
      while (j < text.size() && symbol_char(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({TokenKind::Symbol, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
    } else {
      throw ParseError(pos, "illegal character with code " + std::to_string(unsigned(c)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
 public:
  explicit Parser(std::span<const Token> toks) : toks_(toks) {}

  bool done() const { return i_ >= toks_.size(); }

  SExpr sexpr(std::size_t depth = 0) {
    if (done()) throw ParseError(end_pos(), "unexpected end of input");
    if (depth > kMaxDepth) throw ParseError(toks_[i_].pos, "expression nested too deeply");
    const Token& t = toks_[i_++];
    SExpr e;
    e.pos = t.pos;
    if (t.kind == TokenKind::RParen) throw ParseError(t.pos, "unexpected ')'");
    if (t.kind != TokenKind::LParen) {
      e.atom = t;
      return e;
    }
    e.is_list = true;
    for (;;) {
      if (done()) throw ParseError(t.pos, "unbalanced '(': missing ')'");
      if (toks_[i_].kind == TokenKind::RParen) {
        ++i_;
        return e;
      }
      e.items.push_back(sexpr(depth + 1));
    }
  }

  Position end_pos() const { return toks_.empty() ? Position{} : toks_.back().pos; }

 private:
  std::span<const Token> toks_;
  std::size_t i_ = 0;
};

const std::map<std::string, CommandKind, std::less<>>& command_table() {
  static const std::map<std::string, CommandKind, std::less<>> t = {
      {"declare-fun", CommandKind::DeclareFun}, {"declare-const", CommandKind::DeclareFun},
      {"define-fun", CommandKind::DefineFun},   {"assert", CommandKind::Assert},
      {"check-sat", CommandKind::CheckSat},     {"get-model", CommandKind::GetModel},
      {"set-logic", CommandKind::SetLogic},     {"set-option", CommandKind::SetOption},
      {"set-info", CommandKind::SetInfo},       {"exit", CommandKind::Exit},
  };
  return t;
}

void expect_args(const Command& c, const SExpr& e, std::size_t n, const std::string& name) {
  if (c.args.size() != n)
    throw ParseError(e.pos, name + " expects " + std::to_string(n) + " argument" + (n == 1 ? "" : "s") + ", got " +
                                std::to_string(c.args.size()));
}

}  // namespace

Script parse_script(std::span<const Token> tokens) {
  Parser p(tokens);
  Script s;
  while (!p.done()) {
    SExpr e = p.sexpr();
    if (!e.is_list || e.items.empty() || e.items[0].is_list || e.items[0].atom.kind != TokenKind::Symbol)
      throw ParseError(e.pos, "expected a command");
    const std::string& name = e.items[0].atom.text;
    if (name == "push" || name == "pop") throw ParseError(e.pos, name + " is not supported");
    auto it = command_table().find(name);
    if (it == command_table().end()) throw ParseError(e.pos, "unknown command '" + name + "'");
    Command c{it->second, e.pos, {e.items.begin() + 1, e.items.end()}};
    switch (c.kind) {
      case CommandKind::DeclareFun:
        if (name == "declare-const") {
          expect_args(c, e, 2, name);
          c.args.insert(c.args.begin() + 1, SExpr{true, {}, {}, c.args[1].pos});
        }
        expect_args(c, e, 3, "declare-fun");
        if (!c.args[1].is_list) throw ParseError(c.args[1].pos, "expected a parameter sort list");
        break;
      case CommandKind::DefineFun:
        expect_args(c, e, 4, name);
        if (!c.args[1].is_list) throw ParseError(c.args[1].pos, "expected a parameter list");
        break;
      case CommandKind::Assert: expect_args(c, e, 1, name); break;
      case CommandKind::CheckSat:
      case CommandKind::GetModel:
      case CommandKind::Exit: expect_args(c, e, 0, name); break;
      case CommandKind::SetLogic: expect_args(c, e, 1, name); break;
      case CommandKind::SetOption:
      case CommandKind::SetInfo:
        if (c.args.empty() || c.args[0].is_list || c.args[0].atom.kind != TokenKind::Keyword)
          throw ParseError(e.pos, name + " expects a keyword");
        if (c.args.size() > 2) throw ParseError(e.pos, name + " expects at most one value");
        break;
    }
    if ((c.kind == CommandKind::DeclareFun || c.kind == CommandKind::DefineFun) &&
        (c.args[0].is_list || c.args[0].atom.kind != TokenKind::Symbol))
      throw ParseError(c.args[0].pos, "expected a symbol");
    s.commands.push_back(std::move(c));
  }
  return s;
}

// ---------------------------------------------------------------------------
// elaboration

namespace {

struct Unsupported {
  std::string what;
};

const std::set<std::string, std::less<>>& unsupported_ops() {
  static const std::set<std::string, std::less<>> s = {
      "str.substr",   "str.at",          "str.indexof",  "str.contains",     "str.prefixof",
      "str.suffixof", "str.replace",     "str.replace_all", "str.replace_re", "str.replace_re_all",
      "str.to_int",   "str.to.int",      "str.from_int", "int.to.str",       "str.to_code",
      "str.from_code", "str.is_digit",   "str.<",        "str.<=",           "str.rev",
      "str.lower",    "str.upper",       "re.comp",      "re.inter",         "re.diff",
      "re.loop",      "re.^",            "div",          "mod",              "abs",
      "str.in.re.all", "seq.++",         "seq.len",
  };
  return s;
}

class Elaborator {
 public:
  Elaborator(TermManager& tm, Elaborated& out) : tm_(tm), out_(out) {}

  void run(const Script& s) {
    for (const Command& c : s.commands) {
      try {
        if (!command(c)) return;
      } catch (const Unsupported& u) {
        if (!out_.unsupported) out_.unsupported = u.what;
      }
    }
  }

 private:
  bool command(const Command& c) {
    switch (c.kind) {
      case CommandKind::DeclareFun: {
        const std::string& name = c.args[0].atom.text;
        if (!c.args[1].items.empty()) throw Unsupported{"functions with parameters"};
        Sort s = sort(c.args[2]);
        if (globals_.count(name) || reserved(name)) throw ParseError(c.args[0].pos, "symbol '" + name + "' already declared");
        if (!name.empty() && name[0] == kFreshPrefix)
          throw ParseError(c.args[0].pos, "symbol names starting with '#' are reserved");
        Term v = guard(c.args[0].pos, [&] {
          switch (s) {
            case Sort::String: return tm_.str_var(name);
            case Sort::Int: return tm_.int_var(name);
            default: return tm_.bool_var(name);
          }
        });
        globals_[name] = v;
        out_.declarations.emplace_back(name, v);
        return true;
      }
      case CommandKind::DefineFun: {
        const std::string& name = c.args[0].atom.text;
        if (!c.args[1].items.empty()) throw Unsupported{"functions with parameters"};
        Sort s = sort(c.args[2]);
        Term body = term(c.args[3], 0);
        if (tm_.sort(body) != s) throw ParseError(c.args[3].pos, "define-fun body has the wrong sort");
        if (globals_.count(name) || reserved(name)) throw ParseError(c.args[0].pos, "symbol '" + name + "' already declared");
        globals_[name] = body;
        return true;
      }
      case CommandKind::Assert: {
        Term t = term(c.args[0], 0);
        if (tm_.sort(t) != Sort::Bool) throw ParseError(c.args[0].pos, "assertion is not Boolean");
        out_.assertions.push_back(t);
        return true;
      }
      case CommandKind::CheckSat: ++out_.check_sats; return true;
      case CommandKind::GetModel: out_.get_model = true; return true;
      case CommandKind::SetOption:
        if (c.args[0].atom.text == ":produce-models" && c.args.size() == 2 && !c.args[1].is_list)
          out_.produce_models = c.args[1].atom.text == "true";
        return true;
      case CommandKind::SetLogic:
      case CommandKind::SetInfo: return true;
      case CommandKind::Exit: return false;
    }
    return true;
  }

  static bool reserved(const std::string& n) {
    return n == "true" || n == "false" || n == "re.allchar" || n == "re.none" || n == "re.nostr" || n == "re.all";
  }

  Sort sort(const SExpr& e) {
    if (e.is_list) {
      if (!e.items.empty() && !e.items[0].is_list && e.items[0].atom.text == "Array") throw Unsupported{"Array sort"};
      throw ParseError(e.pos, "unknown sort");
    }
    const std::string& n = e.atom.text;
    if (n == "String") return Sort::String;
    if (n == "Int") return Sort::Int;
    if (n == "Bool") return Sort::Bool;
    if (n == "Real" || n == "RegLan") throw Unsupported{n + " variables"};
    throw ParseError(e.pos, "unknown sort '" + n + "'");
  }

  template <class F>
  Term guard(Position pos, F&& f) {
    try {
      return f();
    } catch (const SortError& err) {
      throw ParseError(pos, err.what());
    } catch (const AlphabetError& err) {
      throw ParseError(pos, err.what());
    } catch (const std::invalid_argument& err) {
      throw ParseError(pos, err.what());
    }
  }

  void need(const SExpr& e, std::size_t have, std::size_t lo, std::size_t hi, const std::string& op) {
    if (have < lo || have > hi)
      throw ParseError(e.pos, op + ": wrong number of arguments (" + std::to_string(have) + ")");
  }

  void need_sort(const SExpr& e, Term t, Sort s, const std::string& op) {
    if (tm_.sort(t) != s)
      throw ParseError(e.pos, op + ": expected " + sort_name(s) + " argument, got " + sort_name(tm_.sort(t)));
  }

  Term symbol(const SExpr& e) {
    const std::string& n = e.atom.text;
    for (auto it = lets_.rbegin(); it != lets_.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) return f->second;
    }
    auto g = globals_.find(n);
    if (g != globals_.end()) return g->second;
    if (n == "true") return tm_.true_term();
    if (n == "false") return tm_.false_term();
    if (n == "re.allchar") return tm_.re_allchar();
    if (n == "re.none" || n == "re.nostr") return tm_.re_none();
    if (n == "re.all") return tm_.re_star(tm_.re_allchar());
    if (unsupported_ops().count(n)) throw Unsupported{n};
    throw ParseError(e.pos, "unknown symbol '" + n + "'");
  }

  static std::int64_t checked_mul(std::int64_t a, std::int64_t b, Position pos) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r) || r > kMaxCoeff || r < -kMaxCoeff) throw ParseError(pos, "integer overflow");
    return r;
  }

  Term term(const SExpr& e, std::size_t depth) {
    if (depth > kMaxDepth) throw ParseError(e.pos, "term nested too deeply");
    if (!e.is_list) {
      switch (e.atom.kind) {
        case TokenKind::Numeral: {
          std::int64_t v = 0;
          auto [p, ec] = std::from_chars(e.atom.text.data(), e.atom.text.data() + e.atom.text.size(), v);
          if (ec != std::errc() || v > kMaxNumeral) throw ParseError(e.pos, "numeral out of range");
          return tm_.int_const(v);
        }
        case TokenKind::StringLit: return guard(e.pos, [&] { return tm_.str_const(e.atom.text); });
        case TokenKind::Symbol: return symbol(e);
        default: throw ParseError(e.pos, "unexpected token '" + e.atom.text + "'");
      }
    }
    if (e.items.empty()) throw ParseError(e.pos, "empty application");
    const SExpr& head = e.items[0];
    if (head.is_list) {
      if (!head.items.empty() && !head.items[0].is_list && head.items[0].atom.text == "_") {
        if (head.items.size() >= 2 && !head.items[1].is_list && unsupported_ops().count(head.items[1].atom.text))
          throw Unsupported{head.items[1].atom.text};
        throw ParseError(head.pos, "unknown indexed operator");
      }
      throw ParseError(head.pos, "operator must be a symbol");
    }
    if (head.atom.kind != TokenKind::Symbol) throw ParseError(head.pos, "operator must be a symbol");
    const std::string& op = head.atom.text;

    if (op == "_") {
      if (e.items.size() >= 2 && !e.items[1].is_list && e.items[1].atom.text == "char") throw Unsupported{"_ char"};
      throw ParseError(e.pos, "unknown indexed identifier");
    }
    if (op == "let") {
      need(e, e.items.size() - 1, 2, 2, op);
      const SExpr& binds = e.items[1];
      if (!binds.is_list || binds.items.empty()) throw ParseError(binds.pos, "let: expected a binding list");
      std::map<std::string, Term> scope;
      for (const SExpr& b : binds.items) {
        if (!b.is_list || b.items.size() != 2 || b.items[0].is_list || b.items[0].atom.kind != TokenKind::Symbol)
          throw ParseError(b.pos, "let: malformed binding");
        if (scope.count(b.items[0].atom.text)) throw ParseError(b.pos, "let: duplicate binding");
        scope[b.items[0].atom.text] = term(b.items[1], depth + 1);
      }
      lets_.push_back(std::move(scope));
      Term body;
      try {
        body = term(e.items[2], depth + 1);
      } catch (...) {
        lets_.pop_back();
        throw;
      }
      lets_.pop_back();
      return body;
    }
    if (op == "!") {
      if (e.items.size() < 2) throw ParseError(e.pos, "!: missing term");
      for (std::size_t i = 2; i < e.items.size(); i += 2)
        if (e.items[i].is_list || e.items[i].atom.kind != TokenKind::Keyword)
          throw ParseError(e.items[i].pos, "!: expected an attribute keyword");
      return term(e.items[1], depth + 1);
    }
    if (unsupported_ops().count(op)) throw Unsupported{op};

    std::vector<Term> a;
    for (std::size_t i = 1; i < e.items.size(); ++i) a.push_back(term(e.items[i], depth + 1));
    const std::size_t n = a.size();
    constexpr std::size_t kMany = static_cast<std::size_t>(-1);
    auto all = [&](Sort s) {
      for (Term t : a) need_sort(e, t, s, op);
    };

    return guard(e.pos, [&]() -> Term {
      if (op == "str.++") {
        need(e, n, 1, kMany, op);
        all(Sort::String);
        return tm_.concat(a);
      }
      if (op == "str.len") {
        need(e, n, 1, 1, op);
        all(Sort::String);
        return tm_.length(a[0]);
      }
      if (op == "+") {
        need(e, n, 1, kMany, op);
        all(Sort::Int);
        Term s = a[0];
        for (std::size_t i = 1; i < n; ++i) s = tm_.add(s, a[i]);
        return s;
      }
      if (op == "-") {
        need(e, n, 1, kMany, op);
        all(Sort::Int);
        if (n == 1) return tm_.scale(-1, a[0]);
        Term s = a[0];
        for (std::size_t i = 1; i < n; ++i) s = tm_.sub(s, a[i]);
        return s;
      }
      if (op == "*") {
        need(e, n, 1, kMany, op);
        all(Sort::Int);
        LinearForm acc = tm_.linearize(a[0]);
        for (std::size_t i = 1; i < n; ++i) {
          LinearForm f = tm_.linearize(a[i]);
          if (!acc.is_constant() && !f.is_constant())
            throw ParseError(e.pos, "nonlinear multiplication is not supported");
          if (acc.is_constant()) std::swap(acc, f);
          std::int64_t k = f.constant;
          LinearForm r;
          for (auto [t, c] : acc.coeffs)
            if (std::int64_t p = checked_mul(c, k, e.pos)) r.coeffs[t] = p;
          r.constant = checked_mul(acc.constant, k, e.pos);
          acc = r;
        }
        return tm_.linear(acc);
      }
      if (op == "<=" || op == "<" || op == ">=" || op == ">") {
        need(e, n, 2, kMany, op);
        all(Sort::Int);
        std::vector<Term> cs;
        for (std::size_t i = 0; i + 1 < n; ++i) {
          Term x = a[i], y = a[i + 1];
          if (op == "<=") cs.push_back(tm_.less_eq(x, y));
          else if (op == "<") cs.push_back(tm_.less_eq(tm_.add(x, tm_.int_const(1)), y));
          else if (op == ">=") cs.push_back(tm_.less_eq(y, x));
          else cs.push_back(tm_.less_eq(tm_.add(y, tm_.int_const(1)), x));
        }
        return cs.size() == 1 ? cs[0] : tm_.mk_and(cs);
      }
      if (op == "=") {
        need(e, n, 2, kMany, op);
        std::vector<Term> cs;
        for (std::size_t i = 0; i + 1 < n; ++i) cs.push_back(tm_.eq(a[i], a[i + 1]));
        return cs.size() == 1 ? cs[0] : tm_.mk_and(cs);
      }
      if (op == "distinct") {
        need(e, n, 2, kMany, op);
        std::vector<Term> cs;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) cs.push_back(tm_.mk_not(tm_.eq(a[i], a[j])));
        return cs.size() == 1 ? cs[0] : tm_.mk_and(cs);
      }
      if (op == "not") {
        need(e, n, 1, 1, op);
        all(Sort::Bool);
        return tm_.mk_not(a[0]);
      }
      if (op == "and" || op == "or") {
        need(e, n, 1, kMany, op);
        all(Sort::Bool);
        return op == "and" ? tm_.mk_and(a) : tm_.mk_or(a);
      }
      if (op == "=>") {
        need(e, n, 2, kMany, op);
        all(Sort::Bool);
        Term r = a[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) r = tm_.mk_or({tm_.mk_not(a[i]), r});
        return r;
      }
      if (op == "xor") {
        need(e, n, 2, kMany, op);
        all(Sort::Bool);
        Term r = a[0];
        for (std::size_t i = 1; i < n; ++i) r = tm_.mk_not(tm_.eq(r, a[i]));
        return r;
      }
      if (op == "ite") {
        need(e, n, 3, 3, op);
        need_sort(e, a[0], Sort::Bool, op);
        if (tm_.sort(a[1]) != tm_.sort(a[2])) throw ParseError(e.pos, "ite: branch sorts differ");
        if (tm_.sort(a[1]) != Sort::Bool) throw Unsupported{"ite over " + std::string(sort_name(tm_.sort(a[1])))};
        return tm_.mk_or({tm_.mk_and({a[0], a[1]}), tm_.mk_and({tm_.mk_not(a[0]), a[2]})});
      }
      if (op == "str.in.re" || op == "str.in_re") {
        need(e, n, 2, 2, op);
        need_sort(e, a[0], Sort::String, op);
        need_sort(e, a[1], Sort::RegLan, op);
        return tm_.in_re(a[0], a[1]);
      }
      if (op == "str.to.re" || op == "str.to_re") {
        need(e, n, 1, 1, op);
        need_sort(e, a[0], Sort::String, op);
        if (tm_.kind(a[0]) != Kind::StrConst) throw Unsupported{op + " over a non-constant"};
        return tm_.re_to_re(a[0]);
      }
      if (op == "re.*" || op == "re.+" || op == "re.opt") {
        need(e, n, 1, 1, op);
        all(Sort::RegLan);
        return op == "re.*" ? tm_.re_star(a[0]) : op == "re.+" ? tm_.re_plus(a[0]) : tm_.re_opt(a[0]);
      }
      if (op == "re.union" || op == "re.++") {
        need(e, n, 1, kMany, op);
        all(Sort::RegLan);
        return op == "re.union" ? tm_.re_union(a) : tm_.re_concat(a);
      }
      if (op == "re.range") {
        need(e, n, 2, 2, op);
        all(Sort::String);
        if (tm_.kind(a[0]) != Kind::StrConst || tm_.kind(a[1]) != Kind::StrConst)
          throw Unsupported{"re.range over non-constants"};
        const std::string &lo = tm_.text(a[0]), &hi = tm_.text(a[1]);
        if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0]) return tm_.re_none();
        return tm_.re_range(static_cast<unsigned char>(lo[0]), static_cast<unsigned char>(hi[0]));
      }
      throw ParseError(head.pos, "unknown operator '" + op + "'");
    });
  }

  TermManager& tm_;
  Elaborated& out_;
  std::map<std::string, Term> globals_;
  std::vector<std::map<std::string, Term>> lets_;
};

}  // namespace

Elaborated elaborate(TermManager& tm, const Script& script) {
  Elaborated out;
  Elaborator(tm, out).run(script);
  return out;
}

Elaborated load(TermManager& tm, std::string_view text) {
  auto toks = tokenize(text, tm.alphabet());
  return elaborate(tm, parse_script(toks));
}

// ---------------------------------------------------------------------------
// printing

namespace {

std::string symbol_text(const std::string& name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name) simple = simple && symbol_char(static_cast<unsigned char>(c));
  return simple ? name : "|" + name + "|";
}

std::string int_text(std::int64_t v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); }

void print(const TermManager& tm, Term t, std::ostream& os) {
  auto kids = tm.children(t);
  auto app = [&](const char* op) {
    os << '(' << op;
    for (Term k : kids) {
      os << ' ';
      print(tm, k, os);
    }
    os << ')';
  };
  switch (tm.kind(t)) {
    case Kind::StrConst: os << encode_string_literal(tm.text(t)); break;
    case Kind::StrVar:
    case Kind::IntVar:
    case Kind::BoolVar: os << symbol_text(tm.text(t)); break;
    case Kind::Concat: app("str.++"); break;
    case Kind::Length: app("str.len"); break;
    case Kind::IntConst: os << int_text(tm.int_value(t)); break;
    case Kind::LinearSum: {
      auto cs = tm.coeffs(t);
      std::vector<std::string> items;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        std::ostringstream s;
        if (cs[i] == 1) {
          print(tm, kids[i], s);
        } else {
          s << "(* " << int_text(cs[i]) << ' ';
          print(tm, kids[i], s);
          s << ')';
        }
        items.push_back(s.str());
      }
      if (tm.int_value(t) != 0 || items.empty()) items.push_back(int_text(tm.int_value(t)));
      if (items.size() == 1) {
        os << items[0];
      } else {
        os << "(+";
        for (const auto& s : items) os << ' ' << s;
        os << ')';
      }
      break;
    }
    case Kind::BoolConst: os << (tm.bool_value(t) ? "true" : "false"); break;
    case Kind::Eq: app("="); break;
    case Kind::LessEq: app("<="); break;
    case Kind::InRe: app("str.in_re"); break;
    case Kind::Not: app("not"); break;
    case Kind::And: app("and"); break;
    case Kind::Or: app("or"); break;
    case Kind::ReNone: os << "re.none"; break;
    case Kind::ReToRe: app("str.to_re"); break;
    case Kind::ReRange: {
      auto [lo, hi] = tm.range(t);
      os << "(re.range " << encode_string_literal(std::string(1, char(lo))) << ' '
         << encode_string_literal(std::string(1, char(hi))) << ')';
      break;
    }
    case Kind::ReUnion: app("re.union"); break;
    case Kind::ReConcat: app("re.++"); break;
    case Kind::ReStar: app("re.*"); break;
    case Kind::RePlus: app("re.+"); break;
  }
}

}  // namespace

std::string print_term(const TermManager& tm, Term t) {
  std::ostringstream os;
  print(tm, t, os);
  return os.str();
}

std::string print_sort(Sort s) {
  switch (s) {
    case Sort::String: return "String";
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::RegLan: return "RegLan";
  }
  return "?";
}

std::string print_script(const TermManager& tm, const Elaborated& e) {
  std::ostringstream os;
  for (const auto& [name, v] : e.declarations)
    os << "(declare-fun " << symbol_text(name) << " () " << print_sort(tm.sort(v)) << ")\n";
  for (Term a : e.assertions) os << "(assert " << print_term(tm, a) << ")\n";
  return os.str();
}

std::string print_model(const TermManager& tm, const std::vector<std::pair<std::string, Term>>& decls,
                        const Model& m) {
  std::ostringstream os;
  os << "(model\n";
  for (const auto& [name, v] : decls) {
    os << "  (define-fun " << symbol_text(name) << " () " << print_sort(tm.sort(v)) << ' ';
    switch (tm.sort(v)) {
      case Sort::String: {
        auto it = m.strings.find(v);
        os << encode_string_literal(it == m.strings.end() ? std::string() : it->second);
        break;
      }
      case Sort::Int: {
        auto it = m.ints.find(v);
        os << int_text(it == m.ints.end() ? 0 : it->second);
        break;
      }
      default: {
        auto it = m.bools.find(v);
        os << ((it != m.bools.end() && it->second) ? "true" : "false");
      }
    }
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

}  // namespace strsolve::smtlib
