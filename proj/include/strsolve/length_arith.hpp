// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace strsolve::arith {

using VarId = std::uint32_t;
/// Opaque tag naming the fact a constraint came from; kAxiom marks
/// constraints that need no justification.
using Origin = std::int32_t;
inline constexpr Origin kAxiom = -1;

inline constexpr std::int64_t kInf = INT64_MAX / 4;

enum class Rel : std::uint8_t { Eq, Le, Lt, Ge, Gt, Ne };

/// sum(coeff * var) + constant REL 0
struct LinearConstraint {
  std::vector<std::pair<VarId, std::int64_t>> terms;
  std::int64_t constant = 0;
  Rel rel = Rel::Eq;
  Origin origin = kAxiom;
};

enum class VarKind : std::uint8_t {
  Length,  // lower bound 0
  Fresh,   // lower bound 1
  Int,     // unbounded
};

struct Bounds {
  std::int64_t lo = -kInf;
  std::int64_t hi = kInf;

  bool fixed() const { return lo == hi; }
};

enum class Status : std::uint8_t {
  Sat,
  Unsat,
  /// Search gave up on open bounds; the caller must narrow lengths.
  Open,
};

struct CheckResult {
  Status status = Status::Sat;
  /// Origins of a jointly infeasible subset (Unsat only).
  std::vector<Origin> explanation;
  /// Variables left without a finite domain (Open only).
  std::vector<VarId> open_vars;
};

struct Limits {
  std::size_t max_bound_updates = 4000;
  std::size_t max_search_nodes = 20000;
  /// Values tried above the lower bound of a variable with no upper bound.
  std::int64_t open_window = 16;
  /// Explanations up to this size are shrunk by deletion.
  std::size_t minimize_up_to = 48;
};

/// Conjunctions of linear integer constraints with interval propagation,
/// equality elimination and bounded branch-and-bound.
class LengthArith {
 public:
  explicit LengthArith(Limits limits = {}) : limits_(limits) {}

  VarId new_var(VarKind kind);
  std::size_t num_vars() const { return kinds_.size(); }
  VarKind var_kind(VarId v) const { return kinds_[v]; }

  void push();
  void pop(std::size_t levels = 1);
  std::size_t scope_level() const { return scopes_.size(); }

  /// Stores c and propagates; returns a conflict explanation on failure.
  std::optional<std::vector<Origin>> assert_linear(LinearConstraint c);

  /// Decides the stored conjunction.
  CheckResult check();

  /// Least witness found by the last Sat check.
  std::int64_t model_value(VarId v) const;
  bool has_model() const { return has_model_; }

  /// Bounds after the last propagation.
  Bounds bounds(VarId v) const;
  bool is_fixed(VarId v) const { return bounds(v).fixed(); }

  std::uint64_t state_hash() const;
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

 private:
  enum class NRel : std::uint8_t { Eq, Le, Ne };
  struct Row {
    std::vector<std::pair<VarId, std::int64_t>> terms;
    std::int64_t constant = 0;
    NRel rel = NRel::Eq;
    std::vector<Origin> origins;
  };
  struct Reason {
    std::int32_t row = -1;  // -1: default bound or branch decision
    std::vector<std::int32_t> deps;
  };
  struct State {
    std::vector<Bounds> bounds;
    std::vector<std::int32_t> lo_reason;
    std::vector<std::int32_t> hi_reason;
  };
  struct Conflict {
    std::vector<Origin> origins;
  };

  static Row normalize(const LinearConstraint& c);
  std::vector<Row> build_rows(const std::vector<std::size_t>& subset, std::optional<Conflict>& conflict) const;
  State initial_state() const;
  // Interval propagation to fixpoint; returns false with `conflict` set on
  // infeasibility. `saturated` reports whether the fixpoint was reached.
  bool propagate(const std::vector<Row>& rows, State& st, std::vector<Reason>& reasons,
                 std::optional<Conflict>& conflict, bool& saturated) const;
  std::vector<Origin> collect(const std::vector<Row>& rows, const std::vector<Reason>& reasons,
                              std::vector<std::int32_t> roots) const;
  CheckResult check_subset(const std::vector<std::size_t>& subset, std::vector<std::int64_t>* model,
                           State* final_state) const;
  std::vector<Origin> minimize(std::vector<Origin> origins) const;

  Limits limits_;
  std::vector<VarKind> kinds_;
  std::vector<LinearConstraint> constraints_;
  std::vector<std::size_t> scopes_;
  std::vector<Bounds> last_bounds_;
  std::vector<std::int64_t> model_;
  bool has_model_ = false;
};

}  // namespace strsolve::arith
