// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <random>

#include "doctest.h"
#include "strsolve/length_arith.hpp"

using namespace strsolve::arith;

namespace {

LinearConstraint lc(std::vector<std::pair<VarId, std::int64_t>> t, std::int64_t k, Rel r, Origin o) {
  return LinearConstraint{std::move(t), k, r, o};
}

bool holds(const LinearConstraint& c, const std::vector<std::int64_t>& x) {
  std::int64_t s = c.constant;
  for (auto [v, k] : c.terms) s += k * x[v];
  switch (c.rel) {
    case Rel::Eq: return s == 0;
    case Rel::Le: return s <= 0;
    case Rel::Lt: return s < 0;
    case Rel::Ge: return s >= 0;
    case Rel::Gt: return s > 0;
    case Rel::Ne: return s != 0;
  }
  return false;
}

// Feasibility of the constraints whose origin is in `keep` over [0,g]^n.
bool grid_feasible(const std::vector<LinearConstraint>& cs, const std::vector<Origin>* keep, std::size_t n, int g) {
  std::vector<std::int64_t> x(n, 0);
  for (;;) {
    bool ok = true;
    for (const auto& c : cs) {
      if (keep && c.origin != kAxiom && !std::binary_search(keep->begin(), keep->end(), c.origin)) continue;
      if (!holds(c, x)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
    std::size_t i = 0;
    while (i < n && x[i] == g) x[i++] = 0;
    if (i == n) return false;
    ++x[i];
  }
}

}  // namespace

TEST_CASE("propagation conflicts name both origins") {
  LengthArith a;
  VarId x = a.new_var(VarKind::Length), y = a.new_var(VarKind::Length);
  CHECK_FALSE(a.assert_linear(lc({{x, 1}, {y, 1}}, -2, Rel::Eq, 0)));
  auto c = a.assert_linear(lc({{x, 1}}, -3, Rel::Ge, 1));
  REQUIRE(c);
  CHECK(*c == std::vector<Origin>{0, 1});
}

TEST_CASE("fresh variables start at one") {
  LengthArith a;
  VarId s = a.new_var(VarKind::Fresh);
  CHECK(a.bounds(s).lo == 1);
  CHECK(a.check().status == Status::Sat);
  CHECK(a.model_value(s) == 1);
}

TEST_CASE("bounds tighten through equalities") {
  LengthArith a;
  VarId x = a.new_var(VarKind::Length), y = a.new_var(VarKind::Length);
  a.assert_linear(lc({{x, 1}, {y, -1}}, 0, Rel::Eq, 0));
  a.assert_linear(lc({{y, 1}}, -5, Rel::Eq, 1));
  CHECK(a.bounds(x).lo == 5);
  CHECK(a.bounds(x).hi == 5);
}

TEST_CASE("check and least-first models") {
  LengthArith a;
  VarId x = a.new_var(VarKind::Length), y = a.new_var(VarKind::Length);
  a.assert_linear(lc({{x, 1}, {y, 1}}, -2, Rel::Eq, 0));
  REQUIRE(a.check().status == Status::Sat);
  CHECK(a.model_value(x) == 0);
  CHECK(a.model_value(y) == 2);

  LengthArith b;
  x = b.new_var(VarKind::Length), y = b.new_var(VarKind::Length);
  b.assert_linear(lc({{x, 1}, {y, 1}}, -2, Rel::Eq, 0));
  b.assert_linear(lc({{x, 1}}, -2, Rel::Ge, 1));
  auto c = b.assert_linear(lc({{y, 1}}, -1, Rel::Ge, 2));
  CHECK(c);
  CHECK(b.check().status == Status::Unsat);

  LengthArith d;
  x = d.new_var(VarKind::Length), y = d.new_var(VarKind::Length);
  VarId z = d.new_var(VarKind::Length);
  d.assert_linear(lc({{x, 1}, {y, -1}}, -1, Rel::Eq, 0));
  d.assert_linear(lc({{y, 1}, {z, -1}}, 0, Rel::Eq, 1));
  d.assert_linear(lc({{z, 1}, {x, -1}}, 0, Rel::Eq, 2));
  auto r = d.check();
  CHECK(r.status == Status::Unsat);
  CHECK(r.explanation == std::vector<Origin>{0, 1, 2});

  LengthArith e;
  x = e.new_var(VarKind::Length);
  e.assert_linear(lc({{x, 1}}, -4, Rel::Eq, 0));
  REQUIRE(e.check().status == Status::Sat);
  CHECK(e.model_value(x) == 4);
}

TEST_CASE("disequalities are decided by search") {
  LengthArith a;
  VarId x = a.new_var(VarKind::Length), y = a.new_var(VarKind::Length);
  a.assert_linear(lc({{x, 1}, {y, 1}}, -2, Rel::Eq, 0));
  a.assert_linear(lc({{x, 1}, {y, -1}}, 0, Rel::Ne, 1));
  a.assert_linear(lc({{x, 1}}, 0, Rel::Ne, 2));
  REQUIRE(a.check().status == Status::Sat);
  CHECK(a.model_value(x) == 2);
  a.assert_linear(lc({{x, 1}}, -2, Rel::Ne, 3));
  auto r = a.check();
  CHECK(r.status == Status::Unsat);
}

TEST_CASE("open bounds are reported instead of guessed") {
  LengthArith a;
  VarId x = a.new_var(VarKind::Length), y = a.new_var(VarKind::Length);
  a.assert_linear(lc({{x, 1}, {y, -1}}, 0, Rel::Eq, 0));
  a.assert_linear(lc({{x, 2}, {y, -2}}, -1, Rel::Ne, 1));
  auto r = a.check();
  CHECK(r.status == Status::Sat);
  // x - 2y = 1 with x = y has no solution; without an upper bound the
  // search cannot refute it outright.
  LengthArith b;
  x = b.new_var(VarKind::Length), y = b.new_var(VarKind::Length);
  b.assert_linear(lc({{x, 1}, {y, -1}}, -1, Rel::Ge, 0));
  b.assert_linear(lc({{x, 1}, {y, 1}}, -3, Rel::Ne, 1));
  CHECK(b.check().status == Status::Sat);
}

TEST_CASE("push and pop restore the state hash") {
  LengthArith a;
  VarId x = a.new_var(VarKind::Length), y = a.new_var(VarKind::Length);
  a.assert_linear(lc({{x, 1}, {y, 1}}, -4, Rel::Le, 0));
  auto h = a.state_hash();
  a.push();
  a.assert_linear(lc({{x, 1}}, -3, Rel::Ge, 1));
  CHECK(a.state_hash() != h);
  CHECK(a.bounds(y).hi == 1);
  a.pop();
  CHECK(a.state_hash() == h);
  CHECK(a.bounds(y).hi == 4);
}

TEST_CASE("random systems agree with a bounded grid") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 300; ++round) {
    std::size_t n = 1 + rng() % 3;
    LengthArith a;
    std::vector<LinearConstraint> cs;
    for (std::size_t v = 0; v < n; ++v) a.new_var(VarKind::Length);
    // Box every variable so the grid is exhaustive.
    for (std::size_t v = 0; v < n; ++v) {
      cs.push_back(lc({{VarId(v), 1}}, -6, Rel::Le, kAxiom));
      a.assert_linear(cs.back());
    }
    int m = 1 + int(rng() % 4);
    for (int i = 0; i < m; ++i) {
      LinearConstraint c;
      for (std::size_t v = 0; v < n; ++v) {
        std::int64_t k = std::int64_t(rng() % 5) - 2;
        if (k != 0) c.terms.emplace_back(VarId(v), k);
      }
      c.constant = std::int64_t(rng() % 9) - 4;
      c.rel = static_cast<Rel>(rng() % 6);
      c.origin = i;
      cs.push_back(c);
      a.assert_linear(c);
    }
    auto r = a.check();
    bool expect = grid_feasible(cs, nullptr, n, 6);
    REQUIRE(r.status != Status::Open);
    CHECK((r.status == Status::Sat) == expect);
    if (r.status == Status::Sat) {
      std::vector<std::int64_t> x;
      for (std::size_t v = 0; v < n; ++v) x.push_back(a.model_value(VarId(v)));
      for (const auto& c : cs) CHECK(holds(c, x));
    } else {
      CHECK_FALSE(grid_feasible(cs, &r.explanation, n, 6));
    }
  }
}
