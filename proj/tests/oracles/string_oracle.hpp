// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles/regex_oracle.hpp"

namespace oracle {

// Small string instances over {a,b}, kept as plain data so that the
// brute-force evaluation does not share code with the solver.
struct Part {
  int var = -1;  // -1 for a constant
  std::string lit;
};

struct Atom {
  enum Kind { WordEq, Length, Member } kind = WordEq;
  std::vector<Part> lhs, rhs;
  std::vector<int> coeffs;  // per variable, for Length
  int rel = 0;              // 0 <=, 1 =, 2 >=
  int bound = 0;
  int var = 0;  // for Member
  ReP re;
};

struct Literal {
  int atom = 0;
  bool negated = false;
};

struct Instance {
  int num_vars = 1;
  std::vector<Atom> atoms;
  std::vector<std::vector<Literal>> clauses;  // conjunction of disjunctions
};

inline std::string word(const std::vector<Part>& ps, const std::vector<std::string>& val) {
  std::string out;
  for (const Part& p : ps) out += p.var < 0 ? p.lit : val[p.var];
  return out;
}

inline bool eval_atom(const Atom& a, const std::vector<std::string>& val) {
  switch (a.kind) {
    case Atom::WordEq: return word(a.lhs, val) == word(a.rhs, val);
    case Atom::Length: {
      long s = 0;
      for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += long(a.coeffs[i]) * long(val[i].size());
      return a.rel == 0 ? s <= a.bound : a.rel == 1 ? s == a.bound : s >= a.bound;
    }
    case Atom::Member: return matches(*a.re, val[a.var]);
  }
  return false;
}

inline bool eval(const Instance& inst, const std::vector<std::string>& val) {
  for (const auto& c : inst.clauses) {
    bool any = false;
    for (const Literal& l : c)
      if (eval_atom(inst.atoms[l.atom], val) != l.negated) {
        any = true;
        break;
      }
    if (!any) return false;
  }
  return true;
}

// Exhaustive search over all assignments with every string of length <= 4.
inline bool brute_force(const Instance& inst) {
  static const std::vector<std::string> words = all_strings(4);
  std::vector<std::string> val(inst.num_vars);
  std::function<bool(int)> rec = [&](int i) {
    if (i == inst.num_vars) return eval(inst, val);
    for (const auto& w : words) {
      val[i] = w;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

inline std::string var_name(int i) { return "X" + std::to_string(i); }

inline std::string concat_smt(const std::vector<Part>& ps) {
  auto one = [](const Part& p) { return p.var < 0 ? "\"" + p.lit + "\"" : var_name(p.var); };
  if (ps.size() == 1) return one(ps[0]);
  std::string out = "(str.++";
  for (const Part& p : ps) out += " " + one(p);
  return out + ")";
}

inline std::string atom_smt(const Atom& a) {
  switch (a.kind) {
    case Atom::WordEq: return "(= " + concat_smt(a.lhs) + " " + concat_smt(a.rhs) + ")";
    case Atom::Length: {
      std::string sum = "(+";
      for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        if (a.coeffs[i] == 0) continue;
        std::string len = "(str.len " + var_name(int(i)) + ")";
        sum += a.coeffs[i] == 1 ? " " + len : a.coeffs[i] < 0 ? " (- " + len + ")" : " (* " + std::to_string(a.coeffs[i]) + " " + len + ")";
      }
      sum += " 0)";
      const char* ops[] = {"<=", "=", ">="};
      return std::string("(") + ops[a.rel] + " " + sum + " " + std::to_string(a.bound) + ")";
    }
    case Atom::Member: return "(str.in.re " + var_name(a.var) + " " + to_smt(*a.re) + ")";
  }
  return "true";
}

inline std::string to_script(const Instance& inst) {
  std::string out = "(set-logic QF_S)\n";
  for (int i = 0; i < inst.num_vars; ++i) out += "(declare-fun " + var_name(i) + " () String)\n";
  for (int i = 0; i < inst.num_vars; ++i) out += "(assert (<= (str.len " + var_name(i) + ") 4))\n";
  auto lit = [&](const Literal& l) {
    std::string a = atom_smt(inst.atoms[l.atom]);
    return l.negated ? "(not " + a + ")" : a;
  };
  for (const auto& c : inst.clauses) {
    if (c.size() == 1) {
      out += "(assert " + lit(c[0]) + ")\n";
    } else {
      out += "(assert (or";
      for (const Literal& l : c) out += " " + lit(l);
      out += "))\n";
    }
  }
  return out + "(check-sat)\n";
}

inline Instance random_instance(std::mt19937_64& rng) {
  auto pick = [&](int n) { return int(rng() % std::uint64_t(n)); };
  Instance inst;
  inst.num_vars = 1 + pick(3);
  auto side = [&] {
    std::vector<Part> ps;
    int n = 1 + pick(4);
    for (int i = 0; i < n; ++i) {
      Part p;
      if (pick(3) == 0) {
        int len = pick(3);
        for (int k = 0; k < len; ++k) p.lit.push_back(char('a' + pick(2)));
      } else {
        p.var = pick(inst.num_vars);
      }
      ps.push_back(p);
    }
    return ps;
  };
  int num_atoms = 1 + pick(4);
  for (int i = 0; i < num_atoms; ++i) {
    Atom a;
    int k = pick(10);
    if (k < 5) {
      a.kind = Atom::WordEq;
      a.lhs = side();
      a.rhs = side();
    } else if (k < 8) {
      a.kind = Atom::Length;
      a.coeffs.assign(inst.num_vars, 0);
      for (int v = 0; v < inst.num_vars; ++v) {
        int c = pick(4);
        a.coeffs[v] = c == 3 ? -1 : c;
      }
      a.coeffs[pick(inst.num_vars)] = 1;
      a.rel = pick(3);
      a.bound = pick(5);
    } else {
      a.kind = Atom::Member;
      a.var = pick(inst.num_vars);
      a.re = random_re(rng, pick(4));
    }
    inst.atoms.push_back(a);
  }
  for (int i = 0; i < num_atoms; ++i) {
    std::vector<Literal> c{{i, pick(4) == 0}};
    if (pick(5) == 0) c.push_back({pick(num_atoms), pick(2) == 0});
    inst.clauses.push_back(c);
  }
  return inst;
}

}  // namespace oracle
