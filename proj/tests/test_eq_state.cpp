// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "strsolve/eq_state.hpp"

using namespace strsolve;
using sat::Lit;

TEST_CASE("distinct constants in one class conflict with a path explanation") {
  TermManager tm;
  EqState eq(tm);
  Term x = tm.str_var("X"), ab = tm.str_const("ab"), cd = tm.str_const("cd");
  Lit l1 = Lit::pos(1), l2 = Lit::pos(2);
  CHECK_FALSE(eq.merge(x, ab, l1));
  auto ex = eq.merge(x, cd, l2);
  REQUIRE(ex);
  CHECK(*ex == std::vector<Lit>{l1, l2});
}

TEST_CASE("classes pick up constants and undo on pop") {
  TermManager tm;
  EqState eq(tm);
  Term x = tm.str_var("X"), y = tm.str_var("Y"), a = tm.str_const("a");
  eq.merge(x, y, Lit::pos(0));
  eq.push();
  eq.merge(y, a, Lit::pos(1));
  CHECK(eq.constant_of(x) == a);
  CHECK(eq.explain(x, a) == std::vector<Lit>{Lit::pos(0), Lit::pos(1)});
  eq.pop(1);
  CHECK_FALSE(eq.constant_of(x));
  CHECK(eq.same_class(x, y));
  CHECK_FALSE(eq.same_class(x, a));
}

TEST_CASE("disequality inside a class conflicts") {
  TermManager tm;
  EqState eq(tm);
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  CHECK_FALSE(eq.add_diseq(x, y, Lit::pos(0)));
  auto ex = eq.merge(x, y, Lit::pos(1));
  REQUIRE(ex);
  CHECK(ex->size() == 2);
  EqState self(tm);
  CHECK(self.add_diseq(x, x, Lit::pos(3)));
}
