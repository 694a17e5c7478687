#include "dtreason/milp.hpp"

#include <vector>

#include "dtreason/error.hpp"

namespace dtr {

namespace {

constexpr std::uint64_t kNodeLimit = 1'000'000;

struct Branch {
  VarId var;
  Rat floor;  // left child: var <= floor, right child: var >= floor + 1
};

// Most-fractional masked variable of a symbolic vertex, if any.
std::optional<Branch> pick_branch(const DeltaPoint& point, const std::set<VarId>& int_vars) {
  std::optional<Branch> best;
  Rat best_dist = -1;
  for (VarId v : int_vars) {
    auto it = point.find(v);
    if (it == point.end()) continue;
    const DeltaRat& x = it->second;
    if (x.eps.is_zero() && x.real.is_integer()) continue;
    Rat fl;
    Rat dist;
    if (x.real.is_integer()) {
      fl = x.eps.sign() < 0 ? x.real - 1 : x.real;
      dist = 0;
    } else {
      fl = x.real.floor();
      Rat f = x.real - fl;
      dist = min(f, Rat(1) - f);
    }
    if (!best || dist > best_dist) {
      best = Branch{v, fl};
      best_dist = dist;
    }
  }
  return best;
}

// An equality over integer variables only has integer solutions only if
// the gcd of its (integer-scaled) coefficients divides the constant.
bool gcd_infeasible(const Conjunction& c, const std::set<VarId>& int_vars) {
  for (const auto& con : c) {
    if (con.rel() != Rel::EQ || con.lhs().is_constant()) continue;
    mpz_class scale = con.lhs().constant().den();
    bool integral = true;
    for (const auto& [v, k] : con.lhs().terms()) {
      if (!int_vars.count(v)) {
        integral = false;
        break;
      }
      mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), k.den().get_mpz_t());
    }
    if (!integral) continue;
    mpz_class g = 0;
    for (const auto& [v, k] : con.lhs().terms()) {
      mpz_class coef = k.num() * (scale / k.den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), coef.get_mpz_t());
    }
    const Rat& k0 = con.lhs().constant();
    mpz_class constant = k0.num() * (scale / k0.den());
    if (constant % g != 0) return true;
  }
  return false;
}

}  // namespace

MilpResult solve_milp(const LinExpr& objective, const Conjunction& c,
                      const std::set<VarId>& int_vars, Sense sense, const Budget& budget) {
  MilpResult result;
  if (gcd_infeasible(c, int_vars)) return result;
  const Rat orient = sense == Sense::Min ? Rat(1) : Rat(-1);
  std::optional<DeltaRat> incumbent;  // in minimization orientation
  DeltaPoint incumbent_point;

  std::vector<Conjunction> stack;
  stack.emplace_back();
  while (!stack.empty()) {
    if (budget.exceeded()) throw BudgetExceeded{};
    if (++result.nodes > kNodeLimit) {
      throw Error(ErrorKind::Unsupported, "branch-and-bound node limit exceeded");
    }
    Conjunction bounds = std::move(stack.back());
    stack.pop_back();
    Conjunction node = concat(c, bounds);
    LpResult lp = optimize(objective, node, sense);
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) {
      // A rational MILP with an unbounded relaxation is unbounded iff it is feasible.
      MilpResult feas = solve_milp(LinExpr{}, node, int_vars, sense, budget);
      result.nodes += feas.nodes;
      if (feas.status == LpStatus::Optimal) {
        result.status = LpStatus::Unbounded;
        result.witness = std::move(feas.witness);
        return result;
      }
      continue;
    }
    DeltaRat oriented = lp.exact_value * orient;
    if (incumbent && oriented >= *incumbent) continue;
    auto branch = pick_branch(lp.delta_witness, int_vars);
    if (!branch) {
      incumbent = oriented;
      incumbent_point = std::move(lp.delta_witness);
      continue;
    }
    LinExpr x = LinExpr::var(branch->var);
    Conjunction up = bounds;
    up.push_back(LinearConstraint::normalize(x, RawRel::GE, LinExpr(branch->floor + 1)));
    Conjunction down = std::move(bounds);
    down.push_back(LinearConstraint::normalize(x, RawRel::LE, LinExpr(branch->floor)));
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));
  }
  if (!incumbent) return result;
  result.status = LpStatus::Optimal;
  result.exact_value = *incumbent * orient;
  result.value = result.exact_value.real;
  result.attained = result.exact_value.eps.is_zero();
  result.witness = concretize(c, incumbent_point);
  return result;
}

}  // namespace dtr
