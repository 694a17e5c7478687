#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dtreason/distance.hpp"
#include "dtreason/milp.hpp"
#include "dtreason/tree.hpp"

namespace dtr {

struct InstanceDecl {
  std::string name;
  std::string model_id;
  std::string label;
  Rat min_confidence;
};

/// Everything a query reads: an immutable view of a session.
struct EngineContext {
  VarLayout layout;
  std::map<std::string, std::shared_ptr<const DecisionTree>> models;
  std::vector<InstanceDecl> instances;  // in layout order
  Conjunction user;
};

/// Counters reported when a budget interrupts a query.
struct EvalStats {
  std::size_t members_solved = 0;
};

/// [implicit constraints of every declared instance]
Theory theory_typec(const EngineContext& ctx);
/// [all user constraints as one conjunction]
Theory theory_userc(const EngineContext& ctx);
/// One member per path of the instance's model that ends in its declared
/// label with at least its minimum confidence.
Theory theory_inst(const EngineContext& ctx, std::string_view instance);

/// Pairwise concatenation, first operand major.
Theory cross_product(const Theory& a, const Theory& b);
/// Members with a solution that is integral on `int_vars`, order preserved.
Theory satisfiable(const Theory& t, const std::set<VarId>& int_vars,
                   const Budget& budget = Budget::unlimited(), EvalStats* stats = nullptr);
/// Member-wise projection; syntactically identical results are merged.
Theory project_theory(const Theory& t, const std::set<VarId>& keep,
                      const Budget& budget = Budget::unlimited(), EvalStats* stats = nullptr);

struct MinMember {
  Conjunction constraints;
  Point witness;  // layout variables only
  bool attained = false;
};

/// Members attaining the smallest distance. Empty when no member is feasible.
struct MinOutcome {
  Rat value;
  bool attained = false;
  std::vector<MinMember> members;

  bool empty() const { return members.empty(); }
};

MinOutcome minimize_theory(const Theory& t, const DistanceSpec& spec, const VarLayout& layout,
                           const Budget& budget = Budget::unlimited(), EvalStats* stats = nullptr);

/// Expression over theories. MINIMIZE may only appear at the root.
struct TheoryExpr {
  enum class Op { Typec, Userc, Inst, Cross, Sat, Project, Minimize };

  Op op = Op::Typec;
  std::string instance;
  std::vector<TheoryExpr> args;
  std::set<VarId> keep;
  DistanceSpec distance;

  static TheoryExpr typec() { return {}; }
  static TheoryExpr userc();
  static TheoryExpr inst(std::string name);
  static TheoryExpr cross(TheoryExpr a, TheoryExpr b);
  static TheoryExpr sat(TheoryExpr e);
  static TheoryExpr project(TheoryExpr e, std::set<VarId> keep);
  static TheoryExpr minimize(TheoryExpr e, DistanceSpec spec);
};

using EvalResult = std::variant<Theory, MinOutcome>;

/// Bottom-up evaluation. Throws BudgetExceeded when the budget runs out.
EvalResult evaluate(const TheoryExpr& expr, const EngineContext& ctx,
                    const Budget& budget = Budget::unlimited(), EvalStats* stats = nullptr);

/// SAT(TYPEC x USERC x INST(I1) x ... x INST(In)) over every declared instance.
TheoryExpr default_query(const EngineContext& ctx);

}  // namespace dtr
