#include "dtreason/lp.hpp"

#include <algorithm>

#include "dtreason/error.hpp"

namespace dtr {

std::string_view status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

// Dense tableau over rows `a x = b`, all columns non-negative.
class Tableau {
 public:
  Tableau(std::size_t cols) : cols_(cols), banned_(cols, false) {}

  void add_row(std::vector<Rat> row, DeltaRat rhs, std::size_t basic) {
    a_.push_back(std::move(row));
    b_.push_back(std::move(rhs));
    basis_.push_back(basic);
  }

  std::size_t rows() const { return a_.size(); }
  std::size_t basic(std::size_t r) const { return basis_[r]; }
  const Rat& at(std::size_t r, std::size_t c) const { return a_[r][c]; }
  void ban(std::size_t c) { banned_[c] = true; }

  void pivot(std::size_t r, std::size_t c) {
    Rat inv = Rat(1) / a_[r][c];
    auto& prow = a_[r];
    for (auto& v : prow) {
      if (!v.is_zero()) v *= inv;
    }
    b_[r] *= inv;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (i == r || a_[i][c].is_zero()) continue;
      Rat f = a_[i][c];
      auto& row = a_[i];
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!prow[k].is_zero()) row[k] -= f * prow[k];
      }
      b_[i] -= b_[r] * f;
    }
    basis_[r] = c;
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
    b_.erase(b_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  DeltaRat value(const std::vector<Rat>& cost) const {
    DeltaRat v;
    for (std::size_t i = 0; i < a_.size(); ++i) v += b_[i] * cost[basis_[i]];
    return v;
  }

  std::vector<DeltaRat> column_values() const {
    std::vector<DeltaRat> out(cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out[basis_[i]] = b_[i];
    return out;
  }

  /// Maximizes cost . x. Returns the entering column of an unbounded ray, if any.
  std::optional<std::size_t> maximize(const std::vector<Rat>& cost) {
    std::vector<bool> is_basic(cols_, false);
    for (auto c : basis_) is_basic[c] = true;
    std::vector<Rat> reduced = cost;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const Rat& cb = cost[basis_[i]];
      if (cb.is_zero()) continue;
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!a_[i][k].is_zero()) reduced[k] -= cb * a_[i][k];
      }
    }
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!banned_[k] && !is_basic[k] && reduced[k].sign() > 0) {
          enter = k;
          break;
        }
      }
      if (!enter) return std::nullopt;
      std::optional<std::size_t> leave;
      DeltaRat best;
      for (std::size_t i = 0; i < a_.size(); ++i) {
        const Rat& p = a_[i][*enter];
        if (p.sign() <= 0) continue;
        DeltaRat ratio = b_[i] / p;
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return enter;
      is_basic[basis_[*leave]] = false;
      pivot(*leave, *enter);
      is_basic[*enter] = true;
      Rat d = reduced[*enter];
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!a_[*leave][k].is_zero()) reduced[k] -= d * a_[*leave][k];
      }
    }
  }

 private:
  std::size_t cols_;
  std::vector<std::vector<Rat>> a_;
  std::vector<DeltaRat> b_;
  std::vector<std::size_t> basis_;
  std::vector<bool> banned_;
};

DeltaRat delta_eval(const LinExpr& e, const DeltaPoint& point) {
  DeltaRat sum(e.constant());
  for (const auto& [id, c] : e.terms()) {
    auto it = point.find(id);
    if (it != point.end()) sum += it->second * c;
  }
  return sum;
}

}  // namespace

Point concretize(const Conjunction& c, const DeltaPoint& point) {
  Rat eps = 1;
  for (const auto& lc : c) {
    if (lc.is_true()) continue;
    DeltaRat v = delta_eval(lc.lhs(), point);
    // strict rows were solved as e <= -ε
    Rat slope = lc.is_strict() ? v.eps + 1 : v.eps;
    if (lc.rel() != Rel::EQ && v.real.sign() < 0 && slope.sign() > 0) {
      eps = min(eps, -v.real / slope);
    }
  }
  Point out;
  for (const auto& [id, v] : point) out.emplace(id, v.real + v.eps * eps);
  return out;
}

LpResult optimize(const LinExpr& objective, const Conjunction& c, Sense sense) {
  LpResult result;
  if (c.contains_false()) return result;

  std::vector<VarId> vars = c.variables();
  for (const auto& [id, k] : objective.terms()) vars.push_back(id);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  std::map<VarId, std::size_t> col_of;
  for (std::size_t j = 0; j < vars.size(); ++j) col_of[vars[j]] = j;

  std::vector<const LinearConstraint*> rows;
  for (const auto& lc : c) {
    if (!lc.is_true()) rows.push_back(&lc);
  }
  // Columns: [p_j, n_j] pairs for free x_j = p_j - n_j, then slacks, then artificials.
  const std::size_t nx = 2 * vars.size();
  std::size_t n_slack = 0;
  for (auto* lc : rows) n_slack += lc->rel() == Rel::EQ ? 0 : 1;
  std::vector<bool> needs_art(rows.size(), false);
  std::vector<DeltaRat> rhs(rows.size());
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& lc = *rows[i];
    rhs[i] = DeltaRat(-lc.lhs().constant(), lc.is_strict() ? Rat(-1) : Rat(0));
    needs_art[i] = lc.rel() == Rel::EQ || rhs[i].sign() < 0;
    n_art += needs_art[i] ? 1 : 0;
  }
  const std::size_t ncols = nx + n_slack + n_art;
  Tableau t(ncols);
  std::size_t slack = nx;
  std::size_t art = nx + n_slack;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& lc = *rows[i];
    std::vector<Rat> row(ncols);
    for (const auto& [id, k] : lc.lhs().terms()) {
      std::size_t j = col_of[id];
      row[2 * j] = k;
      row[2 * j + 1] = -k;
    }
    std::optional<std::size_t> slack_col;
    if (lc.rel() != Rel::EQ) {
      slack_col = slack++;
      row[*slack_col] = 1;
    }
    DeltaRat b = rhs[i];
    if (b.sign() < 0) {
      for (auto& v : row) v = -v;
      b = -b;
    }
    if (needs_art[i]) {
      row[art] = 1;
      t.add_row(std::move(row), b, art);
      ++art;
    } else {
      t.add_row(std::move(row), b, *slack_col);
    }
  }

  if (n_art > 0) {
    std::vector<Rat> phase1(ncols);
    for (std::size_t k = nx + n_slack; k < ncols; ++k) phase1[k] = -1;
    t.maximize(phase1);
    if (!t.value(phase1).is_zero()) return result;
    for (std::size_t r = 0; r < t.rows();) {
      if (t.basic(r) < nx + n_slack) {
        ++r;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t k = 0; k < nx + n_slack; ++k) {
        if (!t.at(r, k).is_zero()) {
          col = k;
          break;
        }
      }
      if (col) {
        t.pivot(r, *col);
        ++r;
      } else {
        t.drop_row(r);
      }
    }
    for (std::size_t k = nx + n_slack; k < ncols; ++k) t.ban(k);
  }

  const Rat orient = sense == Sense::Max ? Rat(1) : Rat(-1);
  std::vector<Rat> cost(ncols);
  for (const auto& [id, k] : objective.terms()) {
    std::size_t j = col_of[id];
    cost[2 * j] = k * orient;
    cost[2 * j + 1] = -k * orient;
  }
  auto unbounded_col = t.maximize(cost);

  auto values = t.column_values();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    result.delta_witness[vars[j]] = values[2 * j] - values[2 * j + 1];
  }
  result.witness = concretize(c, result.delta_witness);

  if (unbounded_col) {
    result.status = LpStatus::Unbounded;
    std::vector<Rat> dir(ncols);
    dir[*unbounded_col] = 1;
    for (std::size_t r = 0; r < t.rows(); ++r) dir[t.basic(r)] = -t.at(r, *unbounded_col);
    for (std::size_t j = 0; j < vars.size(); ++j) {
      Rat d = dir[2 * j] - dir[2 * j + 1];
      if (!d.is_zero()) result.ray[vars[j]] = d;
    }
    return result;
  }
  result.status = LpStatus::Optimal;
  result.exact_value = t.value(cost) * orient + DeltaRat(objective.constant());
  result.value = result.exact_value.real;
  result.attained = result.exact_value.eps.is_zero();
  return result;
}

SatResult is_satisfiable(const Conjunction& c) {
  LpResult r = optimize(LinExpr{}, c, Sense::Max);
  if (r.status == LpStatus::Infeasible) return {};
  return {true, std::move(r.witness)};
}

}  // namespace dtr
