#include "dtreason/linear.hpp"

#include <algorithm>
#include <set>

#include "dtreason/error.hpp"

namespace dtr {

std::string default_var_name(VarId id) { return "x" + std::to_string(id); }

LinExpr LinExpr::var(VarId id, Rat coef) {
  LinExpr e;
  e.add_term(id, coef);
  return e;
}

Rat LinExpr::coef(VarId id) const {
  auto it = terms_.find(id);
  return it == terms_.end() ? Rat(0) : it->second;
}

void LinExpr::add_term(VarId id, const Rat& coef) {
  if (coef.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(id, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (const auto& [id, c] : o.terms_) add_term(id, c);
  constant_ += o.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [id, c] : o.terms_) add_term(id, -c);
  constant_ -= o.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(const Rat& k) {
  if (k.is_zero()) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [id, c] : terms_) c *= k;
  constant_ *= k;
  return *this;
}

LinExpr LinExpr::substitute(VarId id, const LinExpr& replacement) const {
  auto it = terms_.find(id);
  if (it == terms_.end()) return *this;
  LinExpr out = *this;
  Rat k = it->second;
  out.terms_.erase(id);
  out += replacement * k;
  return out;
}

Rat eval_expr(const LinExpr& e, const Point& point) {
  Rat sum = e.constant();
  for (const auto& [id, c] : e.terms()) {
    auto it = point.find(id);
    if (it == point.end()) {
      throw Error(ErrorKind::Validation, "unbound variable " + default_var_name(id));
    }
    sum += c * it->second;
  }
  return sum;
}

std::string_view rel_symbol(Rel rel) {
  switch (rel) {
    case Rel::LE: return "<=";
    case Rel::LT: return "<";
    case Rel::EQ: return "=";
  }
  return "?";
}

LinearConstraint LinearConstraint::true_() { return {LinExpr(Rat(0)), Rel::LE}; }
LinearConstraint LinearConstraint::false_() { return {LinExpr(Rat(1)), Rel::LE}; }

namespace {

bool ground_holds(const Rat& k, Rel rel) {
  switch (rel) {
    case Rel::LE: return k.sign() <= 0;
    case Rel::LT: return k.sign() < 0;
    case Rel::EQ: return k.is_zero();
  }
  return false;
}

// Positive factor turning the coefficients into coprime integers.
Rat primitive_scale(const LinExpr& e) {
  mpz_class l = 1;
  mpz_class g = 0;
  for (const auto& [id, c] : e.terms()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.raw().get_den_mpz_t());
  }
  for (const auto& [id, c] : e.terms()) {
    mpz_class scaled = c.raw().get_num() * (l / c.raw().get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.get_mpz_t());
  }
  return Rat(mpq_class(l, g));
}

}  // namespace

LinearConstraint LinearConstraint::normalize(const LinExpr& lhs, RawRel raw, const LinExpr& rhs) {
  LinExpr e = lhs - rhs;
  Rel rel = Rel::LE;
  switch (raw) {
    case RawRel::LE: rel = Rel::LE; break;
    case RawRel::LT: rel = Rel::LT; break;
    case RawRel::EQ: rel = Rel::EQ; break;
    case RawRel::GE: rel = Rel::LE; e = -e; break;
    case RawRel::GT: rel = Rel::LT; e = -e; break;
  }
  if (e.is_constant()) return ground_holds(e.constant(), rel) ? true_() : false_();
  Rat k = primitive_scale(e);
  if (rel == Rel::EQ && e.terms().begin()->second.sign() < 0) k = -k;
  e *= k;
  return {std::move(e), rel};
}

bool LinearConstraint::is_true() const {
  return lhs_.is_constant() && ground_holds(lhs_.constant(), rel_);
}

bool LinearConstraint::is_false() const {
  return lhs_.is_constant() && !ground_holds(lhs_.constant(), rel_);
}

bool LinearConstraint::holds_at(const Point& point) const {
  return ground_holds(eval_expr(lhs_, point), rel_);
}

LinearConstraint negate(const LinearConstraint& c) {
  if (c.is_true()) return LinearConstraint::false_();
  if (c.is_false()) return LinearConstraint::true_();
  switch (c.rel()) {
    case Rel::LE: return LinearConstraint::normalize(-c.lhs(), RawRel::LT);
    case Rel::LT: return LinearConstraint::normalize(-c.lhs(), RawRel::LE);
    case Rel::EQ: break;
  }
  throw Error(ErrorKind::Validation, "cannot negate an equality constraint");
}

namespace {

std::string render_terms(const std::vector<std::pair<VarId, Rat>>& terms, const VarNamer& namer) {
  std::string out;
  for (const auto& [id, c] : terms) {
    if (!out.empty()) out += " + ";
    if (c != Rat(1)) out += c.str() + "*";
    out += namer(id);
  }
  return out;
}

}  // namespace

std::string render(const LinearConstraint& c, const VarNamer& namer) {
  if (c.is_true()) return "true";
  if (c.is_false()) return "false";
  const auto& terms = c.lhs().terms();
  const Rat& k = c.lhs().constant();
  std::string rel(rel_symbol(c.rel()));
  if (terms.size() == 1) {
    const auto& [id, a] = *terms.begin();
    Rat bound = -k / a.abs();
    if (a.sign() > 0 || c.rel() == Rel::EQ) {
      Rat value = c.rel() == Rel::EQ ? -k / a : bound;
      return namer(id) + " " + rel + " " + value.str();
    }
    // -|a| x + k rel 0  <=>  k/|a| rel x
    return (k / a.abs()).str() + " " + rel + " " + namer(id);
  }
  std::vector<std::pair<VarId, Rat>> pos;
  std::vector<std::pair<VarId, Rat>> neg;
  for (const auto& [id, a] : terms) {
    if (a.sign() > 0) {
      pos.emplace_back(id, a);
    } else {
      neg.emplace_back(id, -a);
    }
  }
  std::string left = render_terms(pos, namer);
  std::string right = render_terms(neg, namer);
  if (pos.empty()) return k.str() + " " + rel + " " + right;
  if (neg.empty()) return left + " " + rel + " " + (-k).str();
  if (k.sign() > 0) return left + " + " + k.str() + " " + rel + " " + right;
  if (k.sign() < 0) return left + " " + rel + " " + right + " + " + (-k).str();
  return left + " " + rel + " " + right;
}

void Conjunction::append(const Conjunction& o) {
  constraints.insert(constraints.end(), o.constraints.begin(), o.constraints.end());
}

bool Conjunction::contains_false() const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [](const LinearConstraint& c) { return c.is_false(); });
}

bool Conjunction::holds_at(const Point& point) const {
  return std::all_of(constraints.begin(), constraints.end(),
                     [&](const LinearConstraint& c) { return c.holds_at(point); });
}

std::vector<VarId> Conjunction::variables() const {
  std::set<VarId> ids;
  for (const auto& c : constraints) {
    for (const auto& [id, a] : c.lhs().terms()) ids.insert(id);
  }
  return {ids.begin(), ids.end()};
}

Conjunction concat(const Conjunction& a, const Conjunction& b) {
  Conjunction out = a;
  out.append(b);
  return out;
}

std::string render(const Conjunction& c, const VarNamer& namer) {
  std::string out;
  for (const auto& lc : c) {
    if (!out.empty()) out += ", ";
    out += render(lc, namer);
  }
  return out;
}

}  // namespace dtr
