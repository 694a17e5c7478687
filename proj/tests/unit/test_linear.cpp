#include "doctest.h"

#include "dtreason/error.hpp"
#include "dtreason/linear.hpp"
#include "support.hpp"

using namespace dtr;

namespace {

LinExpr x(VarId id, Rat c = 1) { return LinExpr::var(id, c); }
LinExpr k(Rat c) { return LinExpr(c); }

}  // namespace

TEST_CASE("normalization scales to coprime integers") {
  auto c = LinearConstraint::normalize(x(0, Rat(1, 2)) + x(1, Rat(1, 3)), RawRel::LE, k(1));
  CHECK(c.lhs().coef(0) == Rat(3));
  CHECK(c.lhs().coef(1) == Rat(2));
  CHECK(c.lhs().constant() == Rat(-6));
  CHECK(c.rel() == Rel::LE);
}

TEST_CASE("greater-than relations are flipped") {
  auto c = LinearConstraint::normalize(x(0), RawRel::GT, k(5));
  CHECK(c.rel() == Rel::LT);
  CHECK(c.lhs().coef(0) == Rat(-1));
  CHECK(c.lhs().constant() == Rat(5));
  CHECK(render(c) == "5 < x0");
}

TEST_CASE("equalities start with a positive coefficient") {
  auto a = LinearConstraint::normalize(x(0, -2) + x(1, 4), RawRel::EQ, k(6));
  auto b = LinearConstraint::normalize(x(0) - x(1, 2), RawRel::EQ, k(-3));
  CHECK(a == b);
  CHECK(a.lhs().coef(0) == Rat(1));
}

TEST_CASE("ground constraints collapse to true or false") {
  CHECK(LinearConstraint::normalize(k(3), RawRel::LE, k(4)).is_true());
  CHECK(LinearConstraint::normalize(k(3), RawRel::LT, k(3)).is_false());
  CHECK(LinearConstraint::normalize(x(0) - x(0), RawRel::EQ, k(0)).is_true());
  CHECK(LinearConstraint::true_() == LinearConstraint::normalize(k(0), RawRel::LE));
  CHECK(render(LinearConstraint::false_()) == "false");
}

TEST_CASE("rendering uses canonical sides") {
  CHECK(render(LinearConstraint::normalize(x(0), RawRel::GE, k(30))) == "30 <= x0");
  CHECK(render(LinearConstraint::normalize(x(0, 2), RawRel::LE, k(7))) == "x0 <= 7/2");
  CHECK(render(LinearConstraint::normalize(x(0), RawRel::EQ, k(-2))) == "x0 = -2");
  CHECK(render(LinearConstraint::normalize(x(1), RawRel::GE, x(0) + k(500))) == "x0 + 500 <= x1");
  CHECK(render(LinearConstraint::normalize(x(0) + x(1, 2), RawRel::LT, k(4))) == "x0 + 2*x1 < 4");
  CHECK(render(LinearConstraint::normalize(x(0), RawRel::LE, x(1))) == "x0 <= x1");
  CHECK(render(LinearConstraint::normalize(x(0) + k(3), RawRel::LE, x(1))) == "x0 + 3 <= x1");
  auto namer = [](VarId id) { return id == 0 ? std::string("CE.age") : std::string("F.age"); };
  CHECK(render(LinearConstraint::normalize(x(1), RawRel::LE, x(0)), namer) == "F.age <= CE.age");
}

TEST_CASE("negation is the strict complement") {
  auto c = LinearConstraint::normalize(x(0), RawRel::LE, k(5));
  auto n = negate(c);
  CHECK(render(n) == "5 < x0");
  CHECK(negate(n) == c);
  CHECK_THROWS_AS(negate(LinearConstraint::normalize(x(0), RawRel::EQ, k(1))), Error);

  dtr::testing::Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    auto conj = dtr::testing::random_conjunction(rng, 2, 1, false);
    const auto& lc = conj.constraints[0];
    Point p{{0, dtr::testing::random_rat(rng, -4, 4)}, {1, dtr::testing::random_rat(rng, -4, 4)}};
    CHECK(lc.holds_at(p) != negate(lc).holds_at(p));
  }
}

TEST_CASE("evaluation and substitution") {
  LinExpr e = x(0, 2) + x(1, -1) + k(3);
  CHECK(eval_expr(e, {{0, Rat(1)}, {1, Rat(5)}}) == Rat(0));
  CHECK_THROWS_AS(eval_expr(e, {{0, Rat(1)}}), Error);
  LinExpr s = e.substitute(1, x(2) + k(1));
  CHECK(s.coef(1).is_zero());
  CHECK(s.coef(2) == Rat(-1));
  CHECK(s.constant() == Rat(2));
  CHECK((e - e).is_constant());
}

TEST_CASE("normalization preserves solution sets") {
  dtr::testing::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    LinExpr e = x(0, dtr::testing::random_rat(rng, -3, 3)) + x(1, dtr::testing::random_rat(rng, -3, 3)) +
                k(dtr::testing::random_rat(rng, -3, 3));
    auto rel = static_cast<RawRel>(i % 5);
    auto c = LinearConstraint::normalize(e, rel);
    Point p{{0, dtr::testing::random_rat(rng, -3, 3, 2)}, {1, dtr::testing::random_rat(rng, -3, 3, 2)}};
    Rat v = eval_expr(e, p);
    bool expect = rel == RawRel::LE ? v <= 0 : rel == RawRel::LT ? v < 0 : rel == RawRel::EQ ? v == 0
                : rel == RawRel::GE ? v >= 0 : v > 0;
    CHECK(c.holds_at(p) == expect);
  }
}

TEST_CASE("conjunction helpers") {
  Conjunction c{LinearConstraint::normalize(x(3), RawRel::LE, k(1)),
                LinearConstraint::normalize(x(1) + x(3), RawRel::GE, k(0))};
  CHECK(c.variables() == std::vector<VarId>{1, 3});
  CHECK_FALSE(c.contains_false());
  CHECK(render(c) == "x3 <= 1, 0 <= x1 + x3");
  auto d = concat(c, Conjunction{LinearConstraint::false_()});
  CHECK(d.size() == 3);
  CHECK(d.contains_false());
}
