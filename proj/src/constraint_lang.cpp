#include "dtreason/constraint_lang.hpp"

#include <cctype>

namespace dtr {

namespace {

enum class Tok { Number, Ident, String, Dot, Comma, Plus, Minus, Star, LParen, RParen, Rel, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourcePos p = pos();
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, "", p});
        return out;
      }
      char c = src_[i_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back({Tok::Number, number(), p});
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i_;
        while (i_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
          ++i_;
        }
        out.push_back({Tok::Ident, std::string(src_.substr(start, i_ - start)), p});
      } else if (c == '\'' || c == '"') {
        std::size_t end = src_.find(c, i_ + 1);
        if (end == std::string_view::npos) throw Error(ErrorKind::Parse, "unterminated string", p);
        out.push_back({Tok::String, std::string(src_.substr(i_ + 1, end - i_ - 1)), p});
        i_ = end + 1;
      } else if (c == '<' || c == '>' || c == '=' || c == '!') {
        std::string op(1, c);
        ++i_;
        if (i_ < src_.size() && src_[i_] == '=' && c != '=') {
          op += '=';
          ++i_;
        }
        if (op == "!") throw Error(ErrorKind::Parse, "expected '!='", p);
        out.push_back({Tok::Rel, op, p});
      } else {
        Tok k;
        switch (c) {
          case '.': k = Tok::Dot; break;
          case ',': k = Tok::Comma; break;
          case '+': k = Tok::Plus; break;
          case '-': k = Tok::Minus; break;
          case '*': k = Tok::Star; break;
          case '(': k = Tok::LParen; break;
          case ')': k = Tok::RParen; break;
          default:
            throw Error(ErrorKind::Parse, std::string("unexpected character '") + c + "'", p);
        }
        ++i_;
        out.push_back({k, std::string(1, c), p});
      }
    }
  }

 private:
  SourcePos pos() const { return {line_, i_ - line_start_ + 1}; }

  void skip_space() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) {
      if (src_[i_] == '\n') {
        ++line_;
        line_start_ = i_ + 1;
      }
      ++i_;
    }
  }

  std::string digits() {
    std::size_t start = i_;
    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
    return std::string(src_.substr(start, i_ - start));
  }

  std::string number() {
    SourcePos p = pos();
    std::string text = digits();
    if (i_ + 1 < src_.size() && (src_[i_] == '.' || src_[i_] == '/') &&
        std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      text += src_[i_++];
      text += digits();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      throw Error(ErrorKind::Parse, "exponent notation is not supported", p);
    }
    return text;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ConstraintAst conj() {
    ConstraintAst ast;
    ast.comparisons.push_back(cmp());
    while (peek().kind == Tok::Comma) {
      next();
      ast.comparisons.push_back(cmp());
    }
    if (peek().kind != Tok::End) unexpected("',' or end of input");
    return ast;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(i_++, toks_.size() - 1)]; }

  [[noreturn]] void unexpected(const std::string& wanted) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorKind::Parse, "expected " + wanted + ", found " + got, t.pos);
  }

  Comparison cmp() {
    Comparison c;
    c.pos = peek().pos;
    c.lhs = sum();
    if (peek().kind != Tok::Rel) unexpected("a relation (<=, <, =, >=, >, !=)");
    const std::string& op = next().text;
    if (op == "<=") c.op = CmpOp::LE;
    else if (op == "<") c.op = CmpOp::LT;
    else if (op == "=") c.op = CmpOp::EQ;
    else if (op == ">=") c.op = CmpOp::GE;
    else if (op == ">") c.op = CmpOp::GT;
    else c.op = CmpOp::NE;
    c.rhs = sum();
    return c;
  }

  Expr sum() {
    Expr acc = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& op = next();
      Expr node;
      node.kind = op.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      node.pos = op.pos;
      node.children.push_back(std::move(acc));
      node.children.push_back(term());
      acc = std::move(node);
    }
    return acc;
  }

  Expr ref() {
    const Token& inst = next();
    next();  // '.'
    if (peek().kind != Tok::Ident) unexpected("a feature name after '.'");
    Expr e;
    e.kind = Expr::Kind::Ref;
    e.instance = inst.text;
    e.feature = next().text;
    e.pos = inst.pos;
    return e;
  }

  // A product whose left operand is not a number literal.
  void reject_product() const {
    if (peek().kind != Tok::Star) return;
    const Token& rhs = peek(1);
    if (rhs.kind == Tok::Ident || rhs.kind == Tok::LParen) {
      throw Error(ErrorKind::Nonlinear, "product of two non-constant terms is not linear",
                  peek().pos);
    }
    throw Error(ErrorKind::Parse, "coefficients must precede the feature reference", peek().pos);
  }

  Expr term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        next();
        Expr num;
        num.kind = Expr::Kind::Number;
        num.number = Rat::parse(t.text);
        num.text = t.text;
        num.pos = t.pos;
        if (peek().kind != Tok::Star) return num;
        next();
        Expr operand;
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Dot) {
          operand = ref();
        } else if (peek().kind == Tok::LParen) {
          operand = paren();
        } else {
          unexpected("a feature reference after '*'");
        }
        reject_product();
        Expr scaled;
        scaled.kind = Expr::Kind::Scale;
        scaled.number = num.number;
        scaled.pos = t.pos;
        scaled.children.push_back(std::move(operand));
        return scaled;
      }
      case Tok::Ident: {
        if (peek(1).kind == Tok::Dot) {
          Expr r = ref();
          reject_product();
          return r;
        }
        next();
        Expr v;
        v.kind = Expr::Kind::Value;
        v.text = t.text;
        v.pos = t.pos;
        return v;
      }
      case Tok::String: {
        next();
        Expr v;
        v.kind = Expr::Kind::Value;
        v.text = t.text;
        v.pos = t.pos;
        return v;
      }
      case Tok::Minus: {
        next();
        Expr neg;
        neg.kind = Expr::Kind::Neg;
        neg.pos = t.pos;
        neg.children.push_back(term());
        return neg;
      }
      case Tok::LParen: {
        Expr inner = paren();
        reject_product();
        return inner;
      }
      default:
        unexpected("a number, feature reference or '('");
    }
  }

  Expr paren() {
    next();  // '('
    Expr inner = sum();
    if (peek().kind != Tok::RParen) unexpected("')'");
    next();
    return inner;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

struct ResolvedRef {
  std::size_t instance;
  std::size_t feature;
};

ResolvedRef resolve(const Expr& e, const VarLayout& layout) {
  auto inst = layout.instance_index(e.instance);
  if (!inst) throw Error(ErrorKind::UnknownName, "unknown instance '" + e.instance + "'", e.pos);
  auto feat = layout.feature_index(e.feature);
  if (!feat) throw Error(ErrorKind::UnknownName, "unknown feature '" + e.feature + "'", e.pos);
  return {*inst, *feat};
}

LinExpr linearize(const Expr& e, const VarLayout& layout) {
  switch (e.kind) {
    case Expr::Kind::Number: return LinExpr(e.number);
    case Expr::Kind::Ref: {
      auto r = resolve(e, layout);
      if (layout.features()[r.feature].kind == FeatureKind::Nominal) {
        throw Error(ErrorKind::Type,
                    "nominal feature '" + e.feature + "' can only be compared with = or !=", e.pos);
      }
      return LinExpr::var(layout.var(r.instance, r.feature));
    }
    case Expr::Kind::Value:
      throw Error(ErrorKind::Type, "'" + e.text + "' is not a number or feature reference", e.pos);
    case Expr::Kind::Neg: return -linearize(e.children[0], layout);
    case Expr::Kind::Scale: return linearize(e.children[0], layout) * e.number;
    case Expr::Kind::Add:
      return linearize(e.children[0], layout) + linearize(e.children[1], layout);
    case Expr::Kind::Sub:
      return linearize(e.children[0], layout) - linearize(e.children[1], layout);
  }
  return {};
}

bool is_nominal_ref(const Expr& e, const VarLayout& layout) {
  if (e.kind != Expr::Kind::Ref) return false;
  auto r = resolve(e, layout);
  return layout.features()[r.feature].kind == FeatureKind::Nominal;
}

void compile_nominal(const Comparison& c, const VarLayout& layout, Conjunction& out) {
  if (c.op != CmpOp::EQ && c.op != CmpOp::NE) {
    throw Error(ErrorKind::Type, "nominal features can only be compared with = or !=", c.pos);
  }
  bool eq = c.op == CmpOp::EQ;
  bool lhs_nominal = is_nominal_ref(c.lhs, layout);
  bool rhs_nominal = is_nominal_ref(c.rhs, layout);
  if (lhs_nominal && rhs_nominal) {
    auto a = resolve(c.lhs, layout);
    auto b = resolve(c.rhs, layout);
    const auto& fa = layout.features()[a.feature];
    const auto& fb = layout.features()[b.feature];
    if (fa.values != fb.values) {
      throw Error(ErrorKind::Type, "nominal features with different domains", c.pos);
    }
    for (std::size_t k = 0; k < fa.values.size(); ++k) {
      LinExpr xa = LinExpr::var(layout.var(a.instance, a.feature, k));
      LinExpr xb = LinExpr::var(layout.var(b.instance, b.feature, k));
      out.push_back(eq ? LinearConstraint::normalize(xa, RawRel::EQ, xb)
                       : LinearConstraint::normalize(xa + xb, RawRel::LE, LinExpr(Rat(1))));
    }
    return;
  }
  const Expr& ref = lhs_nominal ? c.lhs : c.rhs;
  const Expr& lit = lhs_nominal ? c.rhs : c.lhs;
  if (lit.kind != Expr::Kind::Value && lit.kind != Expr::Kind::Number) {
    throw Error(ErrorKind::Type, "nominal feature '" + ref.feature + "' must be compared with a value",
                c.pos);
  }
  auto r = resolve(ref, layout);
  const auto& meta = layout.features()[r.feature];
  auto k = meta.value_index(lit.text);
  if (!k) {
    throw Error(ErrorKind::Domain,
                "value '" + lit.text + "' not in the domain of '" + meta.name + "'", lit.pos);
  }
  LinExpr x = LinExpr::var(layout.var(r.instance, r.feature, *k));
  out.push_back(LinearConstraint::normalize(x, RawRel::EQ, LinExpr(Rat(eq ? 1 : 0))));
}

}  // namespace

ConstraintAst parse_constraints(std::string_view text) {
  return Parser(Lexer(text).run()).conj();
}

Conjunction compile(const ConstraintAst& ast, const VarLayout& layout) {
  Conjunction out;
  for (const auto& c : ast.comparisons) {
    if (is_nominal_ref(c.lhs, layout) || is_nominal_ref(c.rhs, layout)) {
      compile_nominal(c, layout, out);
      continue;
    }
    if (c.op == CmpOp::NE) {
      throw Error(ErrorKind::Unsupported, "'!=' is only defined for nominal features", c.pos);
    }
    LinExpr lhs = linearize(c.lhs, layout);
    LinExpr rhs = linearize(c.rhs, layout);
    RawRel rel = RawRel::EQ;
    switch (c.op) {
      case CmpOp::LE: rel = RawRel::LE; break;
      case CmpOp::LT: rel = RawRel::LT; break;
      case CmpOp::EQ: rel = RawRel::EQ; break;
      case CmpOp::GE: rel = RawRel::GE; break;
      case CmpOp::GT: rel = RawRel::GT; break;
      case CmpOp::NE: break;
    }
    out.push_back(LinearConstraint::normalize(lhs, rel, rhs));
  }
  return out;
}

}  // namespace dtr
