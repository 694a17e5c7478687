#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dtreason/rational.hpp"

namespace dtr {

using VarId = std::uint32_t;

/// Assignment of rational values to solver variables.
using Point = std::map<VarId, Rat>;

/// Maps a variable id to its display name.
using VarNamer = std::function<std::string(VarId)>;

std::string default_var_name(VarId id);

/// Sum of coefficient * variable plus a constant. Zero coefficients are never stored.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(Rat constant) : constant_(std::move(constant)) {}
  static LinExpr var(VarId id, Rat coef = 1);

  const std::map<VarId, Rat>& terms() const { return terms_; }
  const Rat& constant() const { return constant_; }
  Rat coef(VarId id) const;
  bool is_constant() const { return terms_.empty(); }

  void add_term(VarId id, const Rat& coef);
  void add_constant(const Rat& c) { constant_ += c; }
  void set_constant(Rat c) { constant_ = std::move(c); }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(const Rat& k);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, const Rat& k) { return a *= k; }
  friend LinExpr operator*(const Rat& k, LinExpr a) { return a *= k; }
  LinExpr operator-() const { return *this * Rat(-1); }

  /// Replaces variable `id` by `replacement`.
  LinExpr substitute(VarId id, const LinExpr& replacement) const;

  friend bool operator==(const LinExpr&, const LinExpr&) = default;

 private:
  std::map<VarId, Rat> terms_;
  Rat constant_;
};

/// Exact evaluation; throws if a variable of `e` is not bound in `point`.
Rat eval_expr(const LinExpr& e, const Point& point);

/// Relations accepted on input. GE/GT disappear under normalization.
enum class RawRel { LE, LT, EQ, GE, GT };

/// Normalized relation: constraints read `lhs rel 0`.
enum class Rel { LE, LT, EQ };

std::string_view rel_symbol(Rel rel);

class LinearConstraint {
 public:
  /// The distinguished trivially true / false constraints.
  static LinearConstraint true_();
  static LinearConstraint false_();

  /// Builds `lhs rel rhs` in normal form: rhs folded into lhs, >= and > flipped,
  /// coefficients scaled to coprime integers, ground constraints decided.
  static LinearConstraint normalize(const LinExpr& lhs, RawRel rel, const LinExpr& rhs = {});
  static LinearConstraint normalize(const LinExpr& lhs, Rel rel) {
    return normalize(lhs, rel == Rel::LE ? RawRel::LE : rel == Rel::LT ? RawRel::LT : RawRel::EQ);
  }

  const LinExpr& lhs() const { return lhs_; }
  Rel rel() const { return rel_; }
  bool is_strict() const { return rel_ == Rel::LT; }
  bool is_true() const;
  bool is_false() const;
  bool mentions(VarId id) const { return lhs_.terms().count(id) != 0; }

  bool holds_at(const Point& point) const;

  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;

 private:
  LinearConstraint(LinExpr lhs, Rel rel) : lhs_(std::move(lhs)), rel_(rel) {}
  LinExpr lhs_;
  Rel rel_ = Rel::LE;
};

/// Complement of an inequality: not(e <= 0) is -e < 0, not(e < 0) is -e <= 0.
/// Throws for equalities.
LinearConstraint negate(const LinearConstraint& c);

/// Canonical text form: only `<=`, `<`, `=`; single-variable constraints are
/// divided through by their coefficient ("30 <= CE.age").
std::string render(const LinearConstraint& c, const VarNamer& namer = default_var_name);

/// Conjunction of constraints. Order-preserving; never simplified implicitly.
struct Conjunction {
  std::vector<LinearConstraint> constraints;

  Conjunction() = default;
  Conjunction(std::initializer_list<LinearConstraint> cs) : constraints(cs) {}
  explicit Conjunction(std::vector<LinearConstraint> cs) : constraints(std::move(cs)) {}

  std::size_t size() const { return constraints.size(); }
  bool empty() const { return constraints.empty(); }
  void push_back(LinearConstraint c) { constraints.push_back(std::move(c)); }
  void append(const Conjunction& o);
  bool contains_false() const;
  bool holds_at(const Point& point) const;
  /// Sorted, deduplicated ids of every variable mentioned.
  std::vector<VarId> variables() const;

  auto begin() const { return constraints.begin(); }
  auto end() const { return constraints.end(); }

  friend bool operator==(const Conjunction&, const Conjunction&) = default;
};

Conjunction concat(const Conjunction& a, const Conjunction& b);

std::string render(const Conjunction& c, const VarNamer& namer = default_var_name);

/// Finite disjunction of conjunctions. The empty theory is unsatisfiable.
struct Theory {
  std::vector<Conjunction> members;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
  friend bool operator==(const Theory&, const Theory&) = default;
};

}  // namespace dtr
