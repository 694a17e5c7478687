#include "dtreason/projection.hpp"

#include <algorithm>

#include "dtreason/lp.hpp"

namespace dtr {

namespace {

Conjunction falsum() { return Conjunction{LinearConstraint::false_()}; }

Conjunction without_true(const Conjunction& c) {
  Conjunction out;
  for (const auto& lc : c) {
    if (!lc.is_true()) out.push_back(lc);
  }
  return out;
}

// Does `rest` force `candidate` everywhere on its (non-empty) solution set?
bool implied_by(const Conjunction& rest, const LinearConstraint& candidate) {
  const LinExpr& e = candidate.lhs();
  LpResult hi = optimize(e, rest, Sense::Max);
  if (hi.status != LpStatus::Optimal) return false;
  switch (candidate.rel()) {
    case Rel::LE: return hi.value.sign() <= 0;
    case Rel::LT: return hi.exact_value.sign() < 0;
    case Rel::EQ: {
      if (hi.value.sign() > 0) return false;
      LpResult lo = optimize(e, rest, Sense::Min);
      return lo.status == LpStatus::Optimal && lo.value.sign() >= 0;
    }
  }
  return false;
}

}  // namespace

Conjunction eliminate_var(const Conjunction& c, VarId v) {
  if (c.contains_false()) return falsum();
  auto eq = std::find_if(c.begin(), c.end(), [v](const LinearConstraint& lc) {
    return lc.rel() == Rel::EQ && lc.mentions(v);
  });
  Conjunction out;
  if (eq != c.end()) {
    // v = -(rest of eq) / a
    const LinExpr& e = eq->lhs();
    Rat a = e.coef(v);
    LinExpr rest = e;
    rest.add_term(v, -a);
    LinExpr replacement = rest * (Rat(-1) / a);
    for (auto it = c.begin(); it != c.end(); ++it) {
      if (it == eq) continue;
      if (!it->mentions(v)) {
        out.push_back(*it);
        continue;
      }
      auto lc = LinearConstraint::normalize(it->lhs().substitute(v, replacement), it->rel());
      if (lc.is_false()) return falsum();
      if (!lc.is_true()) out.push_back(std::move(lc));
    }
    return out;
  }
  std::vector<const LinearConstraint*> lower;  // coefficient of v negative
  std::vector<const LinearConstraint*> upper;  // coefficient of v positive
  for (const auto& lc : c) {
    Rat a = lc.lhs().coef(v);
    if (a.is_zero()) {
      out.push_back(lc);
    } else if (a.sign() > 0) {
      upper.push_back(&lc);
    } else {
      lower.push_back(&lc);
    }
  }
  for (const auto* lo : lower) {
    for (const auto* up : upper) {
      Rat a_lo = -lo->lhs().coef(v);
      Rat a_up = up->lhs().coef(v);
      LinExpr combined = lo->lhs() * a_up + up->lhs() * a_lo;
      Rel rel = (lo->is_strict() || up->is_strict()) ? Rel::LT : Rel::LE;
      auto lc = LinearConstraint::normalize(combined, rel);
      if (lc.is_false()) return falsum();
      if (!lc.is_true()) out.push_back(std::move(lc));
    }
  }
  return out;
}

Conjunction remove_redundant(const Conjunction& c) {
  if (c.contains_false() || !is_satisfiable(c).sat) return falsum();
  std::vector<LinearConstraint> kept = without_true(c).constraints;
  for (std::size_t i = 0; i < kept.size();) {
    bool duplicate = std::find(kept.begin() + static_cast<std::ptrdiff_t>(i) + 1, kept.end(),
                               kept[i]) != kept.end();
    Conjunction rest;
    if (!duplicate) {
      for (std::size_t j = 0; j < kept.size(); ++j) {
        if (j != i) rest.push_back(kept[j]);
      }
    }
    if (duplicate || implied_by(rest, kept[i])) {
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return Conjunction(std::move(kept));
}

Conjunction project(const Conjunction& c, const std::set<VarId>& keep) {
  Conjunction cur = remove_redundant(c);
  for (VarId v : cur.variables()) {
    if (keep.count(v) != 0) continue;
    if (cur.contains_false()) break;
    cur = remove_redundant(eliminate_var(cur, v));
  }
  return cur;
}

bool entails(const Conjunction& a, const Conjunction& b) {
  if (!is_satisfiable(a).sat) return true;
  return std::all_of(b.begin(), b.end(), [&](const LinearConstraint& lc) {
    if (lc.is_true()) return true;
    if (lc.is_false()) return false;
    return implied_by(a, lc);
  });
}

}  // namespace dtr
