// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "doctest.h"
#include "strsolve/bench.hpp"
#include "strsolve/smtlib.hpp"
#include "strsolve/solver.hpp"
#include "strsolve/validator.hpp"

using namespace strsolve;
using sat::Verdict;

namespace {

struct Run {
  Verdict verdict;
  std::string reason;
  Model model;
};

Run solve(TermManager& tm, std::vector<Term> fs, SolverOptions o = {}) {
  o.debug_checks = true;
  Solver s(tm, o);
  for (Term f : fs) s.assert_formula(f);
  auto r = s.check();
  std::vector<Term> vars;
  for (Term f : fs)
    for (Term v : tm.free_vars(f)) vars.push_back(v);
  Run out{r.verdict, r.reason, s.model(vars)};
  if (r.verdict == Verdict::Sat) REQUIRE(validate(tm, fs, out.model).pass);
  CHECK(s.engine().checker().case_split_violations == 0);
  return out;
}

}  // namespace

TEST_CASE("var-const split of X.Y = ab yields three guards in one set") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  Solver s(tm);
  s.assert_formula(tm.eq(tm.concat({x, y}), tm.str_const("ab")));
  REQUIRE(s.check().verdict == Verdict::Sat);
  const auto& log = s.theory().split_log();
  REQUIRE(log.size() >= 1);
  const SplitRecord& r = log[0];
  REQUIRE(r.arrangements.size() == 3);
  REQUIRE(r.case_split_set);
  CHECK(s.engine().case_split_set(*r.case_split_set).size() == 3);
  const std::string want[3][2] = {{"", "ab"}, {"a", "b"}, {"ab", ""}};
  for (std::size_t i = 0; i < 3; ++i) {
    const Arrangement& a = r.arrangements[i];
    CHECK(a.kind == ArrangementKind::ConstSplit);
    CHECK(a.index == i);
    CHECK(a.activity == kActivityConst);
    CHECK(a.implied[0] == std::make_pair(x, tm.str_const(want[i][0])));
    CHECK(a.implied[1] == std::make_pair(y, tm.str_const(want[i][1])));
  }
  CHECK(s.engine().num_clauses(sat::ClauseOrigin::Exclusion) == 0);
}

TEST_CASE("X.Y = empty has a single arrangement") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  Solver s(tm);
  s.assert_formula(tm.eq(tm.concat({x, y}), tm.empty_str()));
  REQUIRE(s.check().verdict == Verdict::Sat);
  REQUIRE(s.theory().split_log().size() == 1);
  CHECK(s.theory().split_log()[0].arrangements.size() == 1);
  std::vector<Term> vs{x, y};
  Model m = s.model(vs);
  CHECK(m.strings[x].empty());
  CHECK(m.strings[y].empty());
}

TEST_CASE("var-var split has three arrangements with the activity policy") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y"), a = tm.str_var("A"), b = tm.str_var("B");
  Solver s(tm);
  s.assert_formula(tm.eq(tm.concat({x, y}), tm.concat({a, b})));
  REQUIRE(s.check().verdict == Verdict::Sat);
  const auto& r = s.theory().split_log().at(0);
  REQUIRE(r.arrangements.size() == 3);
  CHECK(r.arrangements[0].kind == ArrangementKind::AlignNoFresh);
  CHECK(r.arrangements[0].fresh.empty());
  CHECK(r.arrangements[0].activity == 0.5);
  CHECK(r.arrangements[1].kind == ArrangementKind::SplitLeft);
  CHECK(r.arrangements[1].fresh.size() == 1);
  CHECK(r.arrangements[1].activity == 0.1);
  CHECK(r.arrangements[2].kind == ArrangementKind::SplitRight);
  CHECK(r.arrangements[2].activity == 0.1);
  for (const auto& arr : r.arrangements) CHECK(s.engine().theory_activity(arr.guard.var()) == arr.activity);
  // The aligned guard is taken first, so no conflict is needed.
  CHECK(s.engine().stats().conflicts == 0);
  CHECK(s.engine().value(r.arrangements[0].guard) == sat::LBool::True);
}

TEST_CASE("shared head cancels without a split") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y"), b = tm.str_var("B");
  Solver s(tm);
  s.assert_formula(tm.eq(tm.concat({x, y}), tm.concat({x, b})));
  s.assert_formula(tm.mk_not(tm.eq(y, b)));
  CHECK(s.check().verdict == Verdict::Unsat);
  for (const auto& r : s.theory().split_log()) CHECK(r.arrangements.empty());
}

TEST_CASE("distinct constants and reflexive disequality") {
  TermManager tm;
  Term x = tm.str_var("X");
  CHECK(solve(tm, {tm.eq(x, tm.str_const("ab")), tm.eq(x, tm.str_const("cd"))}).verdict == Verdict::Unsat);
  CHECK(solve(tm, {tm.mk_not(tm.eq(x, x))}).verdict == Verdict::Unsat);
  Term y = tm.str_var("Y");
  auto r = solve(tm, {tm.eq(x, y), tm.eq(y, tm.str_const("a"))});
  REQUIRE(r.verdict == Verdict::Sat);
  CHECK(r.model.strings[x] == "a");
}

TEST_CASE("length facts prune the split") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  Term xy = tm.concat({x, y});
  auto r = solve(tm, {tm.eq(xy, tm.str_const("ab")), tm.eq(tm.length(x), tm.int_const(1))});
  REQUIRE(r.verdict == Verdict::Sat);
  CHECK(r.model.strings[x] == "a");
  CHECK(r.model.strings[y] == "b");

  CHECK(solve(tm, {tm.eq(xy, tm.str_const("ab")), tm.eq(tm.length(x), tm.length(y)),
                   tm.mk_not(tm.eq(x, tm.str_const("a")))})
            .verdict == Verdict::Unsat);

  auto d = solve(tm, {tm.eq(xy, tm.str_const("ab")), tm.mk_not(tm.eq(x, y))});
  REQUIRE(d.verdict == Verdict::Sat);
  CHECK(d.model.strings[x] != d.model.strings[y]);
}

TEST_CASE("commuting variables of length one") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  auto r = solve(tm, {tm.eq(tm.concat({x, y}), tm.concat({y, x})), tm.eq(tm.length(x), tm.int_const(1)),
                      tm.eq(tm.length(y), tm.int_const(1)), tm.mk_not(tm.eq(x, y))});
  CHECK(r.verdict != Verdict::Sat);
}

TEST_CASE("overlap without length bounds is reported as unknown") {
  TermManager tm;
  Term x = tm.str_var("X");
  // X.a = b.X has no solution, but ruling out every length is beyond reach.
  auto r = solve(tm, {tm.eq(tm.concat({x, tm.str_const("a")}), tm.concat({tm.str_const("b"), x}))});
  CHECK(r.verdict == Verdict::Unknown);
  CHECK(r.reason == "overlapping variables");
}

TEST_CASE("self-overlap with concrete length is solved") {
  TermManager tm;
  Term x = tm.str_var("X");
  Term a = tm.str_const("a");
  auto r = solve(tm, {tm.eq(tm.concat({x, a}), tm.concat({a, x})), tm.eq(tm.length(x), tm.int_const(3))});
  REQUIRE(r.verdict == Verdict::Sat);
  CHECK(r.model.strings[x] == "aaa");
}

TEST_CASE("length rounds double and the continuation literal is deprioritized") {
  TermManager tm;
  Term x = tm.str_var("X");
  Term a = tm.re_to_re(tm.str_const("a"));
  Term odd = tm.re_concat(std::vector<Term>{a, tm.re_star(tm.re_concat(std::vector<Term>{a, a}))});
  Solver s(tm);
  s.assert_formula(tm.in_re(x, odd));
  s.assert_formula(tm.less_eq(tm.int_const(8), tm.length(x)));
  REQUIRE(s.check().verdict == Verdict::Sat);
  const auto& rounds = s.theory().length_log();
  REQUIRE(rounds.size() == 3);
  CHECK(rounds[0].lo == 0);
  CHECK(rounds[0].hi == 3);
  CHECK(rounds[1].lo == 4);
  CHECK(rounds[1].hi == 7);
  CHECK(rounds[2].lo == 8);
  CHECK(rounds[2].hi == 15);
  for (const auto& r : rounds) {
    CHECK(s.engine().theory_activity(r.more.var()) == kActivityMore);
    REQUIRE(r.case_split_set);
    CHECK(s.engine().case_split_set(*r.case_split_set).size() == r.guards.size() + 1);
  }
  std::vector<Term> vs{x};
  CHECK(s.model(vs).strings[x] == std::string(9, 'a'));
}

TEST_CASE("fixed lengths need no proposal") {
  TermManager tm;
  Term x = tm.str_var("X");
  Solver s(tm);
  s.assert_formula(tm.eq(tm.length(x), tm.int_const(2)));
  s.assert_formula(tm.mk_not(tm.eq(x, tm.str_const("  "))));
  REQUIRE(s.check().verdict == Verdict::Sat);
  CHECK(s.theory().length_log().empty());
}

TEST_CASE("membership unfolding on fixed lengths") {
  TermManager tm;
  Term v = tm.str_var("V");
  Term ab = tm.re_range('a', 'b');
  Solver s(tm);
  s.assert_formula(tm.in_re(v, tm.re_concat(std::vector<Term>{ab, ab})));
  s.assert_formula(tm.eq(tm.length(v), tm.int_const(2)));
  s.assert_formula(tm.mk_not(tm.eq(v, tm.str_const("aa"))));
  s.assert_formula(tm.mk_not(tm.eq(v, tm.str_const("ab"))));
  REQUIRE(s.check().verdict == Verdict::Sat);
  std::vector<Term> vs{v};
  std::string w = s.model(vs).strings[v];
  CHECK((w == "ba" || w == "bb"));

  TermManager t2;
  Term u = t2.str_var("U");
  Solver s2(t2);
  s2.assert_formula(t2.in_re(u, t2.re_plus(t2.re_to_re(t2.str_const("ab")))));
  s2.assert_formula(t2.eq(t2.length(u), t2.int_const(3)));
  CHECK(s2.check().verdict == Verdict::Unsat);
}

TEST_CASE("boolean structure and integers") {
  TermManager tm;
  Term x = tm.str_var("X"), i = tm.int_var("i"), p = tm.bool_var("p");
  auto r = solve(tm, {tm.mk_or({tm.eq(x, tm.str_const("ab")), tm.eq(x, tm.str_const("abc"))}),
                      tm.eq(i, tm.add(tm.length(x), tm.int_const(1))), tm.less_eq(tm.int_const(4), i),
                      tm.mk_or({p, tm.mk_not(p)})});
  REQUIRE(r.verdict == Verdict::Sat);
  CHECK(r.model.strings[x] == "abc");
  CHECK(r.model.ints[i] == 4);
  CHECK(solve(tm, {tm.false_term()}).verdict == Verdict::Unsat);
}

TEST_CASE("fresh split variables are non-empty in models") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y"), a = tm.str_var("A"), b = tm.str_var("B");
  Solver s(tm);
  s.assert_formula(tm.eq(tm.concat({x, y}), tm.concat({a, b})));
  s.assert_formula(tm.eq(tm.length(x), tm.int_const(2)));
  s.assert_formula(tm.eq(tm.length(a), tm.int_const(1)));
  REQUIRE(s.check().verdict == Verdict::Sat);
  for (const auto& [v, w] : s.theory().string_model())
    if (tm.is_fresh(v)) CHECK(!w.empty());
}

TEST_CASE("case splits off keeps verdicts and adds exclusion clauses") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  SolverOptions o;
  o.case_split = false;
  Solver s(tm, o);
  s.assert_formula(tm.eq(tm.concat({x, y}), tm.str_const("abcd")));
  s.assert_formula(tm.eq(tm.length(x), tm.int_const(3)));
  REQUIRE(s.check().verdict == Verdict::Sat);
  CHECK(s.engine().num_case_split_sets() == 0);
  CHECK(s.engine().num_clauses(sat::ClauseOrigin::Exclusion) >= 10);
}

namespace {

// Three string variables over {a,b}, each at most 4 long.
std::string bounded(const std::string& body) {
  return "(declare-fun X0 () String)(declare-fun X1 () String)(declare-fun X2 () String)"
         "(assert (<= (str.len X0) 4))(assert (<= (str.len X1) 4))(assert (<= (str.len X2) 4))" +
         body + "(check-sat)";
}

}  // namespace

TEST_CASE("bounded instances are decided in both modes") {
  struct Case {
    const char* body;
    bench::Outcome want;
  };
  const Case cases[] = {
      // X0 = X0.X1.X1.X1 forces X1 to be empty.
      {"(assert (= X0 (str.++ X0 X1 X1 X1)))(assert (not (= (str.++ X0 X1 X2) X0)))"
       "(assert (= X0 (str.++ \"a\" X2 \"b\" X2)))",
       bench::Outcome::Sat},
      {"(assert (str.in.re X0 (str.to.re \"\")))(assert (= (str.++ \"ab\" X0 X0) (str.++ X2 X1 X1 X1)))",
       bench::Outcome::Sat},
      {"(assert (or (= (str.++ X1 X1 \"aa\") (str.++ X2 X0 X0)) (str.in.re X0 (str.to.re \"b\"))))"
       "(assert (= (str.++ X1 X2) (str.++ X0 X2)))"
       "(assert (not (str.in.re X2 (re.* (re.range \"a\" \"b\")))))",
       bench::Outcome::Unsat},
      {"(assert (str.in.re X2 (re.range \"b\" \"b\")))(assert (= (str.++ \"ab\" X1 X2 X2) (str.++ X0 X0)))",
       bench::Outcome::Sat},
      {"(assert (= (str.++ X1 X1 \"ab\") (str.++ X0 X2 X2 X0)))", bench::Outcome::Unsat},
  };
  for (bool on : {false, true})
    for (const Case& c : cases) {
      bench::RunOptions o;
      o.alphabet = Alphabet{'a', 'b'};
      o.timeout_s = 20;
      o.validate_model = true;
      o.debug_checks = true;
      o.theory_branching = o.case_split = on;
      auto r = bench::run_script(bounded(c.body), o);
      INFO(c.body, " reason=", r.reason);
      CHECK(r.verdict == c.want);
      if (r.verdict == bench::Outcome::Sat) CHECK(r.validation.value_or(false));
      CHECK(r.case_split_violations == 0);
    }
}

TEST_CASE("helper atoms outside the active branch do not drive length proposals") {
  TermManager tm(Alphabet{'a', 'b'});
  auto el = smtlib::load(tm, bounded("(assert (str.in.re X2 (re.range \"b\" \"b\")))"
                                     "(assert (= (str.++ \"ab\" X1 X2 X2) (str.++ X0 X0)))"));
  Solver s(tm);
  for (Term a : el.assertions) s.assert_formula(a);
  REQUIRE(s.check().verdict == Verdict::Sat);
  for (const LengthRound& r : s.theory().length_log()) CHECK(r.hi < 8);
}
