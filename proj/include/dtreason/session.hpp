#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dtreason/theory.hpp"

namespace dtr {

struct ConstraintEntry {
  std::size_t id;
  std::string text;
  Conjunction compiled;
};

/// Immutable session contents. Mutations produce a new state, so a solve
/// holding a snapshot never observes a half-applied change.
struct SessionState {
  std::vector<FeatureMeta> features;
  std::vector<std::shared_ptr<const DecisionTree>> models;  // declaration order
  std::vector<InstanceDecl> instances;
  std::vector<ConstraintEntry> constraints;
  std::size_t next_constraint_id = 1;
  VarLayout layout;

  EngineContext context() const;
  const DecisionTree* model(std::string_view id) const;
};

struct SolveRequest {
  /// Instance names ("CE") and/or feature references ("CE.age").
  std::vector<std::string> project;
  /// "l1norm(F, CE)" or "dist(F, CE, beta=.., gamma=..)".
  std::optional<std::string> minimize;
};

struct Witness {
  std::string instance;
  std::vector<std::pair<std::string, std::string>> values;  // feature order
};

struct AnswerMember {
  std::vector<std::string> constraints;
  std::vector<Witness> witnesses;
};

struct Answer {
  std::string status = "ok";  // "ok" or "timeout"
  std::vector<AnswerMember> members;
  std::optional<Rat> min;
  bool min_attained = true;
  std::vector<std::string> notes;
  std::size_t members_solved = 0;
};

/// Plain-text rendering: one "Answer:" line per member, optional witness
/// lines, "min = <rat>", or "no solution".
std::string render_text(const Answer& answer);
nlohmann::ordered_json answer_to_json(const Answer& answer);

/// Declared models, instances and user constraints, plus the query pipeline.
/// Single writer: mutations are serialized; solves run on snapshots.
class Session {
 public:
  explicit Session(std::vector<FeatureMeta> features);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Returns the document's model id.
  std::string declare_model(const nlohmann::json& doc);
  void declare_instance(const std::string& name, const std::string& model_id,
                        const std::string& label, const Rat& min_confidence = Rat(0));
  /// Compiles eagerly against the current instances; returns a stable id.
  std::size_t add_constraint(const std::string& text);
  void remove_constraint(std::size_t id);
  /// Removes the most recent constraint. False when there is none.
  bool undo();
  /// Forgets models, instances and constraints; keeps the feature metadata.
  void reset();

  Answer solveopt(const SolveRequest& request, const Budget& budget = Budget::unlimited()) const;

  std::shared_ptr<const SessionState> snapshot() const;
  nlohmann::ordered_json state_json() const;
  /// Replayable script ("meta", "model", "instance", "constraint" lines).
  std::string script() const;

 private:
  void commit(std::shared_ptr<const SessionState> next);

  mutable std::mutex mutex_;
  std::shared_ptr<const SessionState> state_;
};

Answer solve_snapshot(const SessionState& state, const SolveRequest& request, const Budget& budget);

}  // namespace dtr
