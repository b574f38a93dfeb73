// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "strsolve/term.hpp"

using namespace strsolve;

TEST_CASE("concat normalization") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y"), z = tm.str_var("Z");
  CHECK(tm.concat({tm.str_const("ab"), tm.str_const("cd")}) == tm.str_const("abcd"));
  Term xy = tm.concat({x, tm.empty_str(), y});
  CHECK(tm.kind(xy) == Kind::Concat);
  CHECK(tm.children(xy).size() == 2);
  Term xyz = tm.concat({xy, z});
  CHECK(tm.children(xyz).size() == 3);
  CHECK(tm.concat({x, y, z}) == xyz);
  CHECK(tm.concat({x}) == x);
  CHECK(tm.concat({tm.empty_str(), tm.empty_str()}) == tm.empty_str());
  CHECK(tm.concat({x, tm.str_const("a"), tm.str_const("b"), y}) == tm.concat({x, tm.str_const("ab"), y}));
  CHECK_THROWS_AS(tm.concat({x, tm.int_const(1)}), SortError);
}

TEST_CASE("equality orientation and folding") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  CHECK(tm.eq(x, y) == tm.eq(y, x));
  CHECK(tm.simplify(tm.eq(x, x)) == tm.true_term());
  Term ab = tm.eq(tm.str_const("a"), tm.str_const("b"));
  CHECK(tm.kind(ab) == Kind::Eq);
  CHECK(tm.simplify(ab) == tm.false_term());
  CHECK_THROWS_AS(tm.eq(x, tm.int_const(5)), SortError);
}

TEST_CASE("alphabet enforcement") {
  TermManager tm(Alphabet{'a', 'b'});
  CHECK_NOTHROW(tm.str_const("abba"));
  CHECK_THROWS_AS(tm.str_const("abc"), AlphabetError);
  CHECK(Alphabet::parse("a-b") == Alphabet{'a', 'b'});
  CHECK(Alphabet::parse("97-98") == Alphabet{'a', 'b'});
  CHECK_THROWS(Alphabet::parse("z-a"));
}

TEST_CASE("reserved fresh prefix") {
  TermManager tm;
  Term f = tm.fresh_str_var();
  CHECK(tm.is_fresh(f));
  CHECK(tm.text(f)[0] == kFreshPrefix);
  CHECK_THROWS_AS(tm.str_var("#s1"), SortError);
  CHECK_FALSE(tm.is_fresh(tm.str_var("s1")));
}

TEST_CASE("free variables") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  auto fv = tm.free_vars(tm.concat({x, tm.str_const("a"), y}));
  CHECK(fv == std::vector<Term>{x, y});
  CHECK(tm.free_vars(tm.str_const("abc")).empty());
  CHECK(tm.free_vars(tm.add(tm.length(x), tm.int_const(2))) == std::vector<Term>{x});
}

TEST_CASE("substitution re-normalizes") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  CHECK(tm.substitute(tm.concat({x, tm.str_const("b")}), {{x, tm.str_const("a")}}) == tm.str_const("ab"));
  CHECK(tm.substitute(tm.length(x), {{x, tm.str_const("abc")}}) == tm.int_const(3));
  CHECK(tm.substitute(tm.eq(x, y), {{x, y}}) == tm.true_term());
  Term atom = tm.eq(tm.concat({x, y}), tm.str_const("ab"));
  auto fv = tm.free_vars(tm.substitute(atom, {{x, tm.str_const("a")}}));
  CHECK(fv == std::vector<Term>{y});
}

TEST_CASE("integer atom normal forms") {
  TermManager tm;
  Term x = tm.str_var("X"), y = tm.str_var("Y");
  Term lx = tm.length(x), ly = tm.length(y);
  // 2|X| = 2|Y| + 4 and |X| - |Y| = 2 intern identically.
  CHECK(tm.eq(tm.scale(2, lx), tm.add(tm.scale(2, ly), tm.int_const(4))) ==
        tm.eq(tm.sub(lx, ly), tm.int_const(2)));
  CHECK(tm.eq(tm.scale(2, lx), tm.int_const(3)) == tm.false_term());
  CHECK(tm.less_eq(tm.int_const(1), tm.int_const(2)) == tm.true_term());
  CHECK(tm.length(tm.concat({x, tm.str_const("ab")})) == tm.add(lx, tm.int_const(2)));
  // 2|X| <= 3 floors to |X| <= 1.
  CHECK(tm.less_eq(tm.scale(2, lx), tm.int_const(3)) == tm.less_eq(lx, tm.int_const(1)));
}

TEST_CASE("regex constructors simplify") {
  TermManager tm;
  Term a = tm.re_to_re(tm.str_const("a"));
  Term none = tm.re_none();
  Term parts[] = {a, none};
  CHECK(tm.re_union(parts) == a);
  CHECK(tm.re_concat(parts) == none);
  CHECK(tm.re_star(tm.re_star(a)) == tm.re_star(a));
  CHECK(tm.re_plus(tm.re_star(a)) == tm.re_star(a));
  CHECK(tm.re_range('c', 'a') == none);
}
