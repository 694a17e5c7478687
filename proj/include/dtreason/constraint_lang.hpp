#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dtreason/error.hpp"
#include "dtreason/features.hpp"

namespace dtr {

/// Expression node of the user constraint language.
struct Expr {
  enum class Kind {
    Number,  // rational literal
    Ref,     // Instance.feature
    Value,   // bare identifier or quoted string: a nominal domain value
    Neg,     // - children[0]
    Scale,   // number * children[0]
    Add,     // children[0] + children[1]
    Sub,     // children[0] - children[1]
  };

  Kind kind = Kind::Number;
  Rat number;
  std::string text;  // literal text (Number, Value)
  std::string instance;
  std::string feature;
  std::vector<Expr> children;
  SourcePos pos;
};

enum class CmpOp { LE, LT, EQ, GE, GT, NE };

struct Comparison {
  Expr lhs;
  CmpOp op = CmpOp::EQ;
  Expr rhs;
  SourcePos pos;
};

/// Comma-separated conjunction of comparisons.
struct ConstraintAst {
  std::vector<Comparison> comparisons;
};

/// Grammar:
///   conj := cmp ("," cmp)*        cmp := sum rel sum
///   rel  := "<=" | "<" | "=" | ">=" | ">" | "!="
///   sum  := term (("+" | "-") term)*
///   term := number | number "*" ref | ref | "-" term | "(" sum ")" | value
///   ref  := ident "." ident        number := int ["." digits] | int "/" int
/// `value` (an identifier or quoted string) names a nominal domain value.
/// Throws Error(Parse) or Error(Nonlinear) with line and column.
ConstraintAst parse_constraints(std::string_view text);

/// Lowers to normalized linear constraints over `layout`. Nominal `I.f = v`
/// becomes x^v = 1, `I.f != v` becomes x^v = 0, `I.f = J.f` equates the two
/// one-hot vectors and `I.f != J.f` forbids a shared value.
Conjunction compile(const ConstraintAst& ast, const VarLayout& layout);

inline Conjunction compile_constraints(std::string_view text, const VarLayout& layout) {
  return compile(parse_constraints(text), layout);
}

}  // namespace dtr
