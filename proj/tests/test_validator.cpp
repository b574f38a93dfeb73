// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "strsolve/validator.hpp"

using namespace strsolve;

TEST_CASE("evaluation of string terms") {
  TermManager tm;
  Term x = tm.str_var("X");
  Model m;
  m.strings[x] = "a";
  CHECK(std::get<std::string>(evaluate(tm, tm.concat({x, tm.str_const("b")}), m)) == "ab");
  m.strings[x] = "abc";
  CHECK(std::get<std::int64_t>(evaluate(tm, tm.length(x), m)) == 3);
  m.strings[x] = "b";
  CHECK_FALSE(std::get<bool>(evaluate(tm, tm.in_re(x, tm.re_star(tm.re_to_re(tm.str_const("a")))), m)));
  Model empty;
  CHECK_THROWS_AS(evaluate(tm, x, empty), EvaluationError);
  CHECK_THROWS_AS(evaluate(tm, tm.re_none(), m), EvaluationError);
}

TEST_CASE("validation reports the first failing assertion") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  std::vector<Term> as{tm.eq(tm.concat({x, y}), tm.str_const("ab"))};
  Model m;
  m.strings[x] = "a";
  m.strings[y] = "b";
  CHECK(validate(tm, as, m).pass);
  m.strings[y] = "c";
  auto r = validate(tm, as, m);
  CHECK_FALSE(r.pass);
  CHECK(r.failing == 0u);
  as.insert(as.begin(), tm.eq(x, tm.str_const("a")));
  CHECK(validate(tm, as, m).failing == 1u);
}

TEST_CASE("integers and Booleans") {
  TermManager tm;
  Term i = tm.int_var("i"), p = tm.bool_var("p"), x = tm.str_var("x");
  Model m;
  m.ints[i] = 4;
  m.bools[p] = false;
  m.strings[x] = "abc";
  std::vector<Term> as{tm.less_eq(tm.add(tm.length(x), tm.int_const(1)), i), tm.mk_or({p, tm.eq(i, tm.int_const(4))}),
                       tm.mk_not(p)};
  CHECK(validate(tm, as, m).pass);
  m.ints[i] = 3;
  CHECK(validate(tm, as, m).failing == 0u);
}
