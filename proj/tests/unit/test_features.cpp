#include "doctest.h"

#include "dtreason/error.hpp"
#include "dtreason/features.hpp"
#include "support.hpp"

using namespace dtr;

namespace {

std::vector<FeatureMeta> credit_features() {
  return parse_metadata(nlohmann::json::parse(R"({"features": [
    {"name": "income", "kind": "continuous", "min": "0", "max": "200000"},
    {"name": "lease", "kind": "nominal", "values": ["yes", "no"]},
    {"name": "age", "kind": "ordinal", "min": 18, "max": "90"},
    {"name": "job", "kind": "nominal", "values": ["a", "b", "c"]}
  ]})"));
}

LinExpr x(VarId id, Rat c = 1) { return LinExpr::var(id, c); }
LinExpr k(Rat c) { return LinExpr(c); }

ErrorKind kind_of(const char* doc) {
  try {
    parse_metadata(nlohmann::json::parse(doc));
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("metadata round trip") {
  auto f = credit_features();
  REQUIRE(f.size() == 4);
  CHECK(f[0].kind == FeatureKind::Continuous);
  CHECK(*f[2].min == Rat(18));
  CHECK(f[3].width() == 3);
  CHECK(parse_metadata(metadata_to_json(f)).size() == 4);
  CHECK(metadata_to_json(parse_metadata(metadata_to_json(f))) == metadata_to_json(f));
}

TEST_CASE("metadata validation") {
  CHECK(kind_of(R"({"features": [{"name": "a", "kind": "ordinal"}]})") == ErrorKind::Validation);
  CHECK(kind_of(R"({"features": [{"name": "a", "kind": "ordinal", "min": "1.5", "max": 4}]})") ==
        ErrorKind::Validation);
  CHECK(kind_of(R"({"features": [{"name": "a", "kind": "ordinal", "min": 5, "max": 4}]})") ==
        ErrorKind::Validation);
  CHECK(kind_of(R"({"features": [{"name": "a", "kind": "nominal", "values": []}]})") ==
        ErrorKind::Validation);
  CHECK(kind_of(R"({"features": [{"name": "a", "kind": "nominal", "values": ["x", "x"]}]})") ==
        ErrorKind::Validation);
  CHECK(kind_of(R"({"features": [{"name": "a", "kind": "real"}]})") == ErrorKind::Parse);
  CHECK(kind_of(R"({"features": [{"name": "a", "kind": "continuous"},
                                 {"name": "a", "kind": "continuous"}]})") == ErrorKind::Duplicate);
  CHECK(kind_of(R"({"nope": 1})") == ErrorKind::Parse);
}

TEST_CASE("layout is instance-major with one-hot blocks") {
  VarLayout layout(credit_features(), {"F", "CE"});
  CHECK(layout.instance_width() == 7);
  CHECK(layout.size() == 14);
  CHECK(layout.var(0, 0) == 0);
  CHECK(layout.var(0, 1, 1) == 2);
  CHECK(layout.var(1, 2) == 10);
  CHECK(layout.var_name(10) == "CE.age");
  CHECK(layout.var_name(2) == "[F.lease = no]");
  CHECK(layout.is_one_hot(1));
  CHECK_FALSE(layout.is_one_hot(3));
  auto s = layout.slot(13);
  CHECK(s.instance == 1);
  CHECK(s.feature == 3);
  CHECK(s.value == 2);
  // ordinal and one-hot variables are integral, continuous ones are not
  CHECK(layout.integral().count(0) == 0);
  CHECK(layout.integral().count(3) == 1);
  CHECK(layout.integral().count(1) == 1);
  CHECK(layout.integral().size() == 12);
}

TEST_CASE("adding an instance keeps existing ids") {
  VarLayout a(credit_features(), {"F"});
  VarLayout b(credit_features(), {"F", "CE"});
  for (VarId v = 0; v < a.size(); ++v) CHECK(a.var_name(v) == b.var_name(v));
  CHECK_THROWS_AS(VarLayout(credit_features(), {"F", "F"}), Error);
}

TEST_CASE("implicit constraints encode the datatypes") {
  VarLayout layout(credit_features(), {"F"});
  auto psi = implicit_constraints(layout);
  CHECK(render(psi, layout.namer()) ==
        "0 <= [F.lease = yes], [F.lease = yes] <= 1, 0 <= [F.lease = no], [F.lease = no] <= 1, "
        "[F.lease = yes] + [F.lease = no] = 1, 18 <= F.age, F.age <= 90, "
        "0 <= [F.job = a], [F.job = a] <= 1, 0 <= [F.job = b], [F.job = b] <= 1, "
        "0 <= [F.job = c], [F.job = c] <= 1, [F.job = a] + [F.job = b] + [F.job = c] = 1");
}

TEST_CASE("encode and decode are inverse") {
  VarLayout layout(credit_features(), {"F", "CE"});
  NamedPoint p{{"income", Rat(30000)}, {"lease", std::string("no")}, {"age", Rat(35)},
               {"job", std::string("c")}};
  Point enc = encode_point(layout, 1, p);
  CHECK(enc.at(layout.var(1, 1, 1)) == Rat(1));
  CHECK(enc.at(layout.var(1, 1, 0)) == Rat(0));
  CHECK(implicit_constraints(layout, 1).holds_at(enc));
  CHECK(decode_point(layout, 1, enc) == p);

  CHECK_THROWS_AS(encode_point(layout, 0, {{"age", Rat(17)}}), Error);
  CHECK_THROWS_AS(encode_point(layout, 0, {{"age", Rat(41, 2)}}), Error);
  CHECK_THROWS_AS(encode_point(layout, 0, {{"lease", std::string("maybe")}}), Error);
  CHECK_THROWS_AS(encode_point(layout, 0, {{"lease", Rat(1)}}), Error);
  CHECK_THROWS_AS(encode_point(layout, 0, {{"height", Rat(1)}}), Error);

  dtr::testing::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    auto feats = dtr::testing::random_features(rng, 5);
    VarLayout l(feats, {"A"});
    auto q = dtr::testing::random_point(rng, feats);
    auto e = encode_point(l, 0, q);
    CHECK(implicit_constraints(l).holds_at(e));
    CHECK(decode_point(l, 0, e) == q);
  }
}

TEST_CASE("decoded answers read nominal blocks back") {
  VarLayout layout(credit_features(), {"F", "CE"});
  auto with_psi = [&](Conjunction c) { return concat(implicit_constraints(layout), c); };
  auto one = [&](std::size_t inst, std::size_t f, std::size_t v, long val) {
    return LinearConstraint::normalize(x(layout.var(inst, f, v)), RawRel::EQ, k(val));
  };

  auto fixed = decode_answer(with_psi({one(0, 1, 0, 1)}), layout);
  CHECK(fixed == std::vector<std::string>{"F.lease = yes"});

  auto excluded = decode_answer(with_psi({one(0, 3, 1, 0)}), layout);
  CHECK(excluded == std::vector<std::string>{"F.job != b"});

  // x^a = 0 and x^b = 0 leave only c
  auto forced = decode_answer(with_psi({one(0, 3, 0, 0), one(0, 3, 1, 0)}), layout);
  CHECK(forced == std::vector<std::string>{"F.job = c"});

  Conjunction link;
  for (std::size_t v = 0; v < 2; ++v) {
    link.push_back(LinearConstraint::normalize(x(layout.var(1, 1, v)), RawRel::EQ, x(layout.var(0, 1, v))));
  }
  CHECK(decode_answer(with_psi(link), layout) == std::vector<std::string>{"F.lease = CE.lease"});

  // no datatype constraint survives decoding
  CHECK(decode_answer(implicit_constraints(layout), layout).empty());
}

TEST_CASE("ordinal bounds are shown as integer bounds") {
  VarLayout layout(credit_features(), {"CE"});
  VarId age = layout.var(0, 2);
  auto a = decode_answer({LinearConstraint::normalize(k(Rat(79, 2)), RawRel::LT, x(age))}, layout);
  CHECK(a == std::vector<std::string>{"40 <= CE.age"});
  auto b = decode_answer({LinearConstraint::normalize(x(age), RawRel::LT, k(44))}, layout);
  CHECK(b == std::vector<std::string>{"CE.age <= 43"});
  auto c = decode_answer({LinearConstraint::normalize(x(age), RawRel::LE, k(Rat(89, 2)))}, layout);
  CHECK(c == std::vector<std::string>{"CE.age <= 44"});
  // a bound equal to the domain bound is a datatype constraint
  auto d = decode_answer({LinearConstraint::normalize(k(Rat(35, 2)), RawRel::LT, x(age))}, layout);
  CHECK(d.empty());
  // continuous bounds are left alone
  auto e = decode_answer({LinearConstraint::normalize(k(Rat(79, 2)), RawRel::LT, x(layout.var(0, 0)))}, layout);
  CHECK(e == std::vector<std::string>{"79/2 < CE.income"});
}

TEST_CASE("decoded answers are ordered by variable") {
  VarLayout layout(credit_features(), {"F", "CE"});
  Conjunction c{LinearConstraint::normalize(x(layout.var(1, 2)), RawRel::GE, k(30)),
                LinearConstraint::normalize(x(layout.var(0, 0)), RawRel::LE, k(100)),
                LinearConstraint::normalize(x(layout.var(1, 0)), RawRel::GE, x(layout.var(0, 0)))};
  CHECK(decode_answer(c, layout) ==
        std::vector<std::string>{"F.income <= 100", "F.income <= CE.income", "30 <= CE.age"});
}
