#pragma once

#include <map>
#include <optional>

#include "dtreason/linear.hpp"

namespace dtr {

/// real + eps * ε for a positive infinitesimal ε, ordered lexicographically.
/// Strict constraints e < 0 are solved as e <= -ε, so optima over strict
/// systems carry an ε part exactly when they are not attained.
struct DeltaRat {
  Rat real;
  Rat eps;

  DeltaRat() = default;
  DeltaRat(Rat r, Rat e = 0) : real(std::move(r)), eps(std::move(e)) {}  // NOLINT

  bool is_zero() const { return real.is_zero() && eps.is_zero(); }
  int sign() const { return real.sign() != 0 ? real.sign() : eps.sign(); }

  DeltaRat& operator+=(const DeltaRat& o) { real += o.real; eps += o.eps; return *this; }
  DeltaRat& operator-=(const DeltaRat& o) { real -= o.real; eps -= o.eps; return *this; }
  DeltaRat& operator*=(const Rat& k) { real *= k; eps *= k; return *this; }
  friend DeltaRat operator+(DeltaRat a, const DeltaRat& b) { return a += b; }
  friend DeltaRat operator-(DeltaRat a, const DeltaRat& b) { return a -= b; }
  friend DeltaRat operator*(DeltaRat a, const Rat& k) { return a *= k; }
  friend DeltaRat operator/(DeltaRat a, const Rat& k) { return a *= Rat(1) / k; }
  DeltaRat operator-() const { return {-real, -eps}; }

  friend bool operator==(const DeltaRat&, const DeltaRat&) = default;
  friend std::strong_ordering operator<=>(const DeltaRat& a, const DeltaRat& b) {
    if (auto c = a.real <=> b.real; c != 0) return c;
    return a.eps <=> b.eps;
  }
};

using DeltaPoint = std::map<VarId, DeltaRat>;

enum class LpStatus { Infeasible, Optimal, Unbounded };
enum class Sense { Min, Max };

std::string_view status_name(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  /// Optimal value (the infimum / supremum when not attained). Meaningless
  /// unless status is Optimal; Unbounded stands for -inf (Min) or +inf (Max).
  Rat value;
  bool attained = false;
  /// Concrete feasible point (strict constraints hold strictly). When attained,
  /// the objective evaluates to `value` here.
  Point witness;
  /// Recession direction along which the objective improves without bound.
  Point ray;

  /// Symbolic optimum and optimal vertex over the ε-extended field.
  DeltaRat exact_value;
  DeltaPoint delta_witness;
};

/// Exact simplex (Bland's rule, deterministic lowest-index pivoting) over the
/// variables of `c` and `objective`. All variables are free.
LpResult optimize(const LinExpr& objective, const Conjunction& c, Sense sense);

struct SatResult {
  bool sat = false;
  Point witness;
};

SatResult is_satisfiable(const Conjunction& c);

/// Picks a concrete ε so that the symbolic point satisfies every constraint of `c`.
Point concretize(const Conjunction& c, const DeltaPoint& point);

}  // namespace dtr
