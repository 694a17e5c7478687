#include "dtreason/theory.hpp"

#include <algorithm>

#include "dtreason/error.hpp"
#include "dtreason/projection.hpp"

namespace dtr {

Theory theory_typec(const EngineContext& ctx) {
  return Theory{{implicit_constraints(ctx.layout)}};
}

Theory theory_userc(const EngineContext& ctx) { return Theory{{ctx.user}}; }

Theory theory_inst(const EngineContext& ctx, std::string_view instance) {
  auto idx = ctx.layout.instance_index(instance);
  auto decl = std::find_if(ctx.instances.begin(), ctx.instances.end(),
                           [&](const InstanceDecl& d) { return d.name == instance; });
  if (!idx || decl == ctx.instances.end()) {
    throw Error(ErrorKind::UnknownName, "unknown instance '" + std::string(instance) + "'");
  }
  auto model = ctx.models.find(decl->model_id);
  if (model == ctx.models.end()) {
    throw Error(ErrorKind::UnknownName, "unknown model '" + decl->model_id + "'");
  }
  Theory out;
  for (auto& fact : enumerate_paths(*model->second, ctx.layout, *idx)) {
    if (fact.label == decl->label && fact.confidence >= decl->min_confidence) {
      out.members.push_back(std::move(fact.constraints));
    }
  }
  return out;
}

Theory cross_product(const Theory& a, const Theory& b) {
  Theory out;
  out.members.reserve(a.size() * b.size());
  for (const auto& x : a.members) {
    for (const auto& y : b.members) out.members.push_back(concat(x, y));
  }
  return out;
}

Theory satisfiable(const Theory& t, const std::set<VarId>& int_vars, const Budget& budget,
                   EvalStats* stats) {
  Theory out;
  for (const auto& m : t.members) {
    if (budget.exceeded()) throw BudgetExceeded{};
    auto r = solve_milp(LinExpr{}, m, int_vars, Sense::Min, budget);
    if (stats) ++stats->members_solved;
    if (r.status != LpStatus::Infeasible) out.members.push_back(m);
  }
  return out;
}

Theory project_theory(const Theory& t, const std::set<VarId>& keep, const Budget& budget,
                      EvalStats* stats) {
  Theory out;
  for (const auto& m : t.members) {
    if (budget.exceeded()) throw BudgetExceeded{};
    Conjunction p = project(m, keep);
    if (stats) ++stats->members_solved;
    if (std::find(out.members.begin(), out.members.end(), p) == out.members.end()) {
      out.members.push_back(std::move(p));
    }
  }
  return out;
}

MinOutcome minimize_theory(const Theory& t, const DistanceSpec& spec, const VarLayout& layout,
                           const Budget& budget, EvalStats* stats) {
  ObjectiveBuild build = build_objective(spec, layout);
  std::set<VarId> int_vars = layout.integral();
  int_vars.insert(build.new_integral.begin(), build.new_integral.end());

  struct Solved {
    const Conjunction* member;
    MilpResult result;
  };
  std::vector<Solved> solved;
  for (const auto& m : t.members) {
    if (budget.exceeded()) throw BudgetExceeded{};
    auto r = solve_milp(build.objective, concat(m, build.side), int_vars, Sense::Min, budget);
    if (stats) ++stats->members_solved;
    if (r.status == LpStatus::Optimal) solved.push_back({&m, std::move(r)});
  }
  MinOutcome out;
  if (solved.empty()) return out;
  out.value = solved.front().result.value;
  for (const auto& s : solved) out.value = min(out.value, s.result.value);
  for (auto& s : solved) {
    if (s.result.value != out.value) continue;
    Point witness;
    for (const auto& [id, v] : s.result.witness) {
      if (id < build.first_slack) witness.emplace(id, v);
    }
    out.attained = out.attained || s.result.attained;
    out.members.push_back({*s.member, std::move(witness), s.result.attained});
  }
  return out;
}

TheoryExpr TheoryExpr::userc() {
  TheoryExpr e;
  e.op = Op::Userc;
  return e;
}

TheoryExpr TheoryExpr::inst(std::string name) {
  TheoryExpr e;
  e.op = Op::Inst;
  e.instance = std::move(name);
  return e;
}

TheoryExpr TheoryExpr::cross(TheoryExpr a, TheoryExpr b) {
  TheoryExpr e;
  e.op = Op::Cross;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

TheoryExpr TheoryExpr::sat(TheoryExpr inner) {
  TheoryExpr e;
  e.op = Op::Sat;
  e.args.push_back(std::move(inner));
  return e;
}

TheoryExpr TheoryExpr::project(TheoryExpr inner, std::set<VarId> keep) {
  TheoryExpr e;
  e.op = Op::Project;
  e.args.push_back(std::move(inner));
  e.keep = std::move(keep);
  return e;
}

TheoryExpr TheoryExpr::minimize(TheoryExpr inner, DistanceSpec spec) {
  TheoryExpr e;
  e.op = Op::Minimize;
  e.args.push_back(std::move(inner));
  e.distance = std::move(spec);
  return e;
}

namespace {

Theory eval_theory(const TheoryExpr& e, const EngineContext& ctx, const Budget& budget,
                   EvalStats* stats) {
  using Op = TheoryExpr::Op;
  switch (e.op) {
    case Op::Typec: return theory_typec(ctx);
    case Op::Userc: return theory_userc(ctx);
    case Op::Inst: return theory_inst(ctx, e.instance);
    case Op::Cross:
      return cross_product(eval_theory(e.args.at(0), ctx, budget, stats),
                           eval_theory(e.args.at(1), ctx, budget, stats));
    case Op::Sat:
      return satisfiable(eval_theory(e.args.at(0), ctx, budget, stats), ctx.layout.integral(),
                         budget, stats);
    case Op::Project:
      return project_theory(eval_theory(e.args.at(0), ctx, budget, stats), e.keep, budget, stats);
    case Op::Minimize:
      throw Error(ErrorKind::Validation, "MINIMIZE may only appear at the root of a query");
  }
  return {};
}

}  // namespace

EvalResult evaluate(const TheoryExpr& expr, const EngineContext& ctx, const Budget& budget,
                    EvalStats* stats) {
  if (expr.op == TheoryExpr::Op::Minimize) {
    return minimize_theory(eval_theory(expr.args.at(0), ctx, budget, stats), expr.distance,
                           ctx.layout, budget, stats);
  }
  return eval_theory(expr, ctx, budget, stats);
}

TheoryExpr default_query(const EngineContext& ctx) {
  TheoryExpr e = TheoryExpr::cross(TheoryExpr::typec(), TheoryExpr::userc());
  for (const auto& d : ctx.instances) e = TheoryExpr::cross(std::move(e), TheoryExpr::inst(d.name));
  return TheoryExpr::sat(std::move(e));
}

}  // namespace dtr
