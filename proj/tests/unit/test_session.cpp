#include "doctest.h"

#include <fstream>
#include <thread>

#include "dtreason/error.hpp"
#include "dtreason/session.hpp"

using namespace dtr;

namespace {

nlohmann::json load(const std::string& path) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + path);
  return nlohmann::json::parse(in);
}

std::unique_ptr<Session> credit_session() {
  auto s = std::make_unique<Session>(parse_metadata(load("credit/meta.json")));
  s->declare_model(load("credit/tree.json"));
  s->declare_instance("F", "credit", "deny");
  s->declare_instance("CE", "credit", "approve");
  s->add_constraint("F.income = 30000, F.lease = yes, F.age = 35, F.amount = 10000");
  return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("declaration errors") {
  Session s(parse_metadata(load("credit/meta.json")));
  s.declare_model(load("credit/tree.json"));
  CHECK(kind_of([&] { s.declare_model(load("credit/tree.json")); }) == ErrorKind::Duplicate);
  CHECK(kind_of([&] { s.declare_instance("F", "nope", "deny"); }) == ErrorKind::UnknownName);
  CHECK(kind_of([&] { s.declare_instance("F.x", "credit", "deny"); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { s.declare_instance("F", "credit", "deny", Rat(2)); }) == ErrorKind::Validation);
  try {
    s.declare_instance("F", "credit", "maybe");
    FAIL("accepted an unknown label");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("approve") != std::string::npos);
    CHECK(std::string(e.what()).find("deny") != std::string::npos);
  }
  s.declare_instance("F", "credit", "deny");
  CHECK(kind_of([&] { s.declare_instance("F", "credit", "approve"); }) == ErrorKind::Duplicate);
  CHECK(kind_of([&] { s.add_constraint("G.age = 1"); }) == ErrorKind::UnknownName);
  CHECK(kind_of([&] { s.add_constraint("F.age <= "); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { s.remove_constraint(42); }) == ErrorKind::UnknownName);
  CHECK(s.snapshot()->constraints.empty());
}

TEST_CASE("why question") {
  Session s(parse_metadata(load("credit/meta.json")));
  s.declare_model(load("credit/tree.json"));
  s.declare_instance("F", "credit", "deny");
  auto a = s.solveopt({{"F"}, std::nullopt});
  REQUIRE(a.members.size() == 2);
  CHECK(a.members[0].constraints == std::vector<std::string>{"F.income <= 60000", "F.lease = yes", "F.age <= 44"});
  CHECK(a.members[1].constraints == std::vector<std::string>{"F.income <= 60000", "F.lease = no", "50000 < F.amount"});
  CHECK(render_text(a) ==
        "Answer: F.income <= 60000, F.lease = yes, F.age <= 44\n"
        "Answer: F.income <= 60000, F.lease = no, 50000 < F.amount\n");
}

TEST_CASE("minimal change with witness") {
  auto s = credit_session();
  auto a = s->solveopt({{"CE"}, "l1norm(F, CE)"});
  REQUIRE(a.min);
  CHECK(*a.min == Rat(5, 36));
  CHECK(a.min_attained);
  REQUIRE(a.members.size() == 1);
  REQUIRE(a.members[0].witnesses.size() == 1);
  const auto& w = a.members[0].witnesses[0];
  CHECK(w.instance == "CE");
  CHECK(w.values == std::vector<std::pair<std::string, std::string>>{
                        {"income", "30000"}, {"lease", "yes"}, {"age", "45"}, {"amount", "10000"}});
}

TEST_CASE("undo is the inverse of add") {
  auto s = credit_session();
  auto before = s->solveopt({{"CE"}, "l1norm(F, CE)"});
  auto state = s->state_json();
  s->add_constraint("CE.age <= 35");
  CHECK(render_text(s->solveopt({{"CE"}, "l1norm(F, CE)"})) != render_text(before));
  CHECK(s->undo());
  CHECK(s->state_json() == state);
  auto after = s->solveopt({{"CE"}, "l1norm(F, CE)"});
  CHECK(render_text(after) == render_text(before));
  CHECK(answer_to_json(after) == answer_to_json(before));
}

TEST_CASE("removal by id and reset") {
  auto s = credit_session();
  auto id = s->add_constraint("CE.age <= 35");
  s->add_constraint("CE.amount >= 0");
  s->remove_constraint(id);
  CHECK(s->snapshot()->constraints.size() == 2);
  s->reset();
  auto snap = s->snapshot();
  CHECK(snap->models.empty());
  CHECK(snap->instances.empty());
  CHECK(snap->constraints.empty());
  CHECK(snap->features.size() == 4);
  CHECK_FALSE(s->undo());
}

TEST_CASE("solves are deterministic") {
  auto s = credit_session();
  auto first = answer_to_json(s->solveopt({{}, "l1norm(F, CE)"})).dump();
  for (int i = 0; i < 3; ++i) CHECK(answer_to_json(s->solveopt({{}, "l1norm(F, CE)"})).dump() == first);
}

TEST_CASE("concurrent solves see consistent snapshots") {
  auto s = credit_session();
  auto expected = answer_to_json(s->solveopt({{"CE"}, "l1norm(F, CE)"})).dump();
  std::vector<std::string> results(4);
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < results.size(); ++i) {
      threads.emplace_back([&, i] { results[i] = answer_to_json(s->solveopt({{"CE"}, "l1norm(F, CE)"})).dump(); });
    }
  }
  for (const auto& r : results) CHECK(r == expected);
}

TEST_CASE("solve request validation") {
  auto s = credit_session();
  CHECK(kind_of([&] { s->solveopt({{"G"}, std::nullopt}); }) == ErrorKind::UnknownName);
  CHECK(kind_of([&] { s->solveopt({{"CE.height"}, std::nullopt}); }) == ErrorKind::UnknownName);
  CHECK(kind_of([&] { s->solveopt({{}, "l1norm(F, F)"}); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { s->solveopt({{}, "l1norm(F, G)"}); }) == ErrorKind::UnknownName);
}

TEST_CASE("feature projection") {
  auto s = credit_session();
  auto a = s->solveopt({{"CE.age"}, std::nullopt});
  REQUIRE_FALSE(a.members.empty());
  for (const auto& m : a.members) {
    for (const auto& c : m.constraints) CHECK(c.find("CE.age") != std::string::npos);
  }
}

TEST_CASE("an expired budget reports a timeout") {
  auto s = credit_session();
  Budget b{std::chrono::steady_clock::now() - std::chrono::seconds(1)};
  auto a = s->solveopt({{"CE"}, "l1norm(F, CE)"}, b);
  CHECK(a.status == "timeout");
  CHECK(answer_to_json(a)["status"] == "timeout");
  CHECK(answer_to_json(a).contains("members_solved"));
}

TEST_CASE("script replays to the same state") {
  auto s = credit_session();
  s->add_constraint("CE.age <= 50");
  auto text = s->script();
  CHECK(text.find("instance CE credit label=approve") != std::string::npos);
  CHECK(text.find("constraint CE.age <= 50") != std::string::npos);
}
