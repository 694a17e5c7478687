#include "doctest.h"

#include <fstream>
#include <sstream>

#include "dtreason/script.hpp"
#include "dtreason/service.hpp"

using namespace dtr;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json body_of(const HttpResponse& r) { return nlohmann::json::parse(r.body); }

std::string create(SessionStore& store) {
  auto r = store.handle("POST", "/sessions", read("credit/meta.json"));
  REQUIRE(r.status == 201);
  return body_of(r)["session_id"];
}

void post(SessionStore& store, const std::string& path, const nlohmann::json& body, int status = 201) {
  auto r = store.handle("POST", path, body.dump());
  INFO(r.body);
  CHECK(r.status == status);
}

std::string setup(SessionStore& store) {
  auto id = create(store);
  std::string base = "/sessions/" + id;
  post(store, base + "/models", nlohmann::json::parse(read("credit/tree.json")));
  post(store, base + "/instances", {{"name", "F"}, {"model_id", "credit"}, {"label", "deny"}});
  post(store, base + "/instances", {{"name", "CE"}, {"model_id", "credit"}, {"label", "approve"}});
  post(store, base + "/constraints", {{"text", "F.income = 30000, F.lease = yes, F.age = 35, F.amount = 10000"}});
  return base;
}

}  // namespace

TEST_CASE("a dialogue over the API") {
  SessionStore store;
  auto base = setup(store);
  auto r = store.handle("POST", base + "/solve", R"J({"project": ["CE"], "minimize": "l1norm(F, CE)"})J");
  REQUIRE(r.status == 200);
  auto answer = body_of(r);
  CHECK(answer["min"] == "5/36");
  CHECK(answer["members"][0][2]["text"] == "45 <= CE.age");

  auto state = body_of(store.handle("GET", base, ""));
  CHECK(state["session_id"] == base.substr(10));
  CHECK(state["instances"].size() == 2);
  CHECK(state["constraints"][0]["id"] == 1);

  auto script = store.handle("GET", base + "/script", "");
  CHECK(script.status == 200);
  CHECK(script.content_type == "text/plain");
  CHECK(script.body.find("instance CE credit label=approve") != std::string::npos);
}

TEST_CASE("deleting and re-adding a constraint restores the answer") {
  SessionStore store;
  auto base = setup(store);
  const std::string solve = R"({"project": ["CE"]})";
  auto before = store.handle("POST", base + "/solve", solve).body;
  auto added = store.handle("POST", base + "/constraints", R"({"text": "CE.age <= 35, CE.income = F.income"})");
  REQUIRE(added.status == 201);
  auto cid = body_of(added)["constraint_id"].get<std::size_t>();
  CHECK(store.handle("POST", base + "/solve", solve).body != before);
  CHECK(store.handle("DELETE", base + "/constraints/" + std::to_string(cid), "").status == 204);
  CHECK(store.handle("POST", base + "/solve", solve).body == before);
  CHECK(store.handle("DELETE", base + "/constraints/" + std::to_string(cid), "").status == 404);
  CHECK(store.handle("DELETE", base + "/constraints/abc", "").status == 404);
}

TEST_CASE("error responses") {
  SessionStore store;
  auto base = setup(store);
  auto bad = store.handle("POST", base + "/constraints", R"({"text": "F.age <= "})");
  CHECK(bad.status == 400);
  auto err = body_of(bad);
  CHECK(err["error"] == "parse_error");
  CHECK(err["line"] == 1);
  CHECK(err["column"] == 10);

  CHECK(store.handle("GET", "/sessions/s999", "").status == 404);
  CHECK(body_of(store.handle("GET", "/sessions/s999", ""))["error"] == "not_found");
  CHECK(store.handle("GET", "/nowhere", "").status == 404);
  CHECK(store.handle("GET", base + "/bogus", "").status == 404);
  CHECK(store.handle("DELETE", "/sessions", "").status == 405);
  CHECK(store.handle("POST", base, "").status == 405);

  auto dup = store.handle("POST", base + "/instances", R"({"name": "F", "model_id": "credit", "label": "deny"})");
  CHECK(dup.status == 409);
  CHECK(body_of(dup)["error"] == "duplicate");

  CHECK(store.handle("POST", "/sessions", "{not json").status == 400);
  CHECK(store.handle("POST", base + "/instances", R"({"name": "G"})").status == 400);
  CHECK(store.handle("POST", base + "/solve", R"({"project": ["Z"]})").status == 400);
}

TEST_CASE("sessions are isolated") {
  SessionStore store;
  auto a = setup(store);
  auto b = setup(store);
  CHECK(a != b);
  post(store, a + "/constraints", {{"text", "CE.age <= 20"}});
  CHECK(body_of(store.handle("GET", a, ""))["constraints"].size() == 2);
  CHECK(body_of(store.handle("GET", b, ""))["constraints"].size() == 1);
  CHECK(store.size() == 2);
}

TEST_CASE("the API and the script runner produce the same answer bytes") {
  SessionStore store;
  auto base = setup(store);
  auto api = store.handle("POST", base + "/solve", R"J({"project": ["CE"], "minimize": "l1norm(F, CE)"})J").body;

  ScriptRunner runner(OutputFormat::Json, std::string(FIXTURE_DIR) + "/credit");
  std::string out;
  auto err = run_script(runner,
                        "meta meta.json\nmodel tree.json\ninstance F credit label=deny\n"
                        "instance CE credit label=approve\n"
                        "constraint F.income = 30000, F.lease = yes, F.age = 35, F.amount = 10000\n"
                        "solve project=[CE] minimize=l1norm(F, CE)\n",
                        out);
  REQUIRE_FALSE(err);
  CHECK(out == api + "\n");
}

TEST_CASE("metadata may be wrapped") {
  SessionStore store;
  auto r = store.handle("POST", "/sessions", "{\"metadata\": " + read("adult/meta.json") + "}");
  CHECK(r.status == 201);
}

TEST_CASE("idle sessions expire") {
  ServiceOptions options;
  options.idle_timeout = std::chrono::seconds(60);
  SessionStore store(options);
  auto id = create(store);
  auto now = SessionStore::Clock::now();
  CHECK(store.expire(now) == 0);
  CHECK(store.expire(now + std::chrono::seconds(61)) == 1);
  CHECK(store.size() == 0);
  CHECK(store.handle("GET", "/sessions/" + id, "").status == 404);
}
