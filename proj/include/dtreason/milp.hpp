#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>

#include "dtreason/lp.hpp"

namespace dtr {

/// Wall-clock limit shared by long-running engine calls.
struct Budget {
  std::optional<std::chrono::steady_clock::time_point> deadline;

  static Budget unlimited() { return {}; }
  static Budget for_duration(std::chrono::milliseconds d) {
    return {std::chrono::steady_clock::now() + d};
  }
  bool exceeded() const {
    return deadline && std::chrono::steady_clock::now() > *deadline;
  }
};

/// Thrown when a Budget runs out mid-computation.
struct BudgetExceeded {};

struct MilpResult {
  LpStatus status = LpStatus::Infeasible;
  /// Optimum over points integral on the masked variables; the infimum
  /// (supremum) when strict constraints keep it from being attained.
  Rat value;
  bool attained = false;
  /// Feasible, integral on the masked variables. eval(objective) == value when attained.
  Point witness;
  std::uint64_t nodes = 0;

  DeltaRat exact_value;
};

/// Depth-first branch and bound over the exact LP. Branches on the
/// most-fractional masked variable (lowest id on ties), floor branch first.
MilpResult solve_milp(const LinExpr& objective, const Conjunction& c,
                      const std::set<VarId>& int_vars, Sense sense,
                      const Budget& budget = Budget::unlimited());

}  // namespace dtr
