#include "dtreason/session.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dtreason/constraint_lang.hpp"
#include "dtreason/error.hpp"
#include "dtreason/projection.hpp"

namespace dtr {

EngineContext SessionState::context() const {
  EngineContext ctx;
  ctx.layout = layout;
  for (const auto& m : models) ctx.models.emplace(m->model_id, m);
  ctx.instances = instances;
  for (const auto& c : constraints) ctx.user.append(c.compiled);
  return ctx;
}

const DecisionTree* SessionState::model(std::string_view id) const {
  for (const auto& m : models) {
    if (m->model_id == id) return m.get();
  }
  return nullptr;
}

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

VarLayout layout_for(const std::vector<FeatureMeta>& features,
                     const std::vector<InstanceDecl>& instances) {
  std::vector<std::string> names;
  for (const auto& d : instances) names.push_back(d.name);
  return VarLayout(features, std::move(names));
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::vector<Witness> decode_witnesses(const VarLayout& layout, const Point& point,
                                      const std::vector<std::size_t>& instances) {
  std::vector<Witness> out;
  for (std::size_t i : instances) {
    Point full;
    for (VarId v : layout.instance_vars(i)) {
      auto it = point.find(v);
      full[v] = it == point.end() ? Rat(0) : it->second;
    }
    NamedPoint named = decode_point(layout, i, full);
    Witness w{layout.instances()[i], {}};
    for (const auto& f : layout.features()) {
      auto it = named.find(f.name);
      if (it != named.end()) w.values.emplace_back(f.name, render_value(it->second));
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

Session::Session(std::vector<FeatureMeta> features) {
  for (const auto& f : features) validate(f);
  auto s = std::make_shared<SessionState>();
  s->layout = VarLayout(features, {});
  s->features = std::move(features);
  state_ = std::move(s);
}

std::shared_ptr<const SessionState> Session::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Session::commit(std::shared_ptr<const SessionState> next) { state_ = std::move(next); }

std::string Session::declare_model(const nlohmann::json& doc) {
  std::lock_guard lock(mutex_);
  auto tree = std::make_shared<DecisionTree>(parse_tree(doc, state_->features));
  if (state_->model(tree->model_id)) {
    throw Error(ErrorKind::Duplicate, "model '" + tree->model_id + "' already declared");
  }
  auto next = std::make_shared<SessionState>(*state_);
  next->models.push_back(tree);
  commit(std::move(next));
  return tree->model_id;
}

void Session::declare_instance(const std::string& name, const std::string& model_id,
                               const std::string& label, const Rat& min_confidence) {
  std::lock_guard lock(mutex_);
  if (!is_identifier(name)) {
    throw Error(ErrorKind::Validation, "instance name '" + name + "' is not an identifier");
  }
  for (const auto& d : state_->instances) {
    if (d.name == name) throw Error(ErrorKind::Duplicate, "instance '" + name + "' already declared");
  }
  const DecisionTree* tree = state_->model(model_id);
  if (!tree) throw Error(ErrorKind::UnknownName, "unknown model '" + model_id + "'");
  auto classes = tree->classes();
  if (std::find(classes.begin(), classes.end(), label) == classes.end()) {
    throw Error(ErrorKind::Validation, "model '" + model_id + "' has no class '" + label +
                                           "'; available: " + join(classes, ", "));
  }
  if (min_confidence.sign() < 0 || min_confidence > Rat(1)) {
    throw Error(ErrorKind::Validation, "minimum confidence must lie in [0, 1]");
  }
  auto next = std::make_shared<SessionState>(*state_);
  next->instances.push_back({name, model_id, label, min_confidence});
  next->layout = layout_for(next->features, next->instances);
  for (auto& c : next->constraints) c.compiled = compile_constraints(c.text, next->layout);
  commit(std::move(next));
}

std::size_t Session::add_constraint(const std::string& text) {
  std::lock_guard lock(mutex_);
  Conjunction compiled = compile_constraints(text, state_->layout);
  auto next = std::make_shared<SessionState>(*state_);
  std::size_t id = next->next_constraint_id++;
  next->constraints.push_back({id, text, std::move(compiled)});
  commit(std::move(next));
  return id;
}

void Session::remove_constraint(std::size_t id) {
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<SessionState>(*state_);
  auto it = std::find_if(next->constraints.begin(), next->constraints.end(),
                         [id](const ConstraintEntry& c) { return c.id == id; });
  if (it == next->constraints.end()) {
    throw Error(ErrorKind::UnknownName, "no constraint with id " + std::to_string(id));
  }
  next->constraints.erase(it);
  commit(std::move(next));
}

bool Session::undo() {
  std::lock_guard lock(mutex_);
  if (state_->constraints.empty()) return false;
  auto next = std::make_shared<SessionState>(*state_);
  next->constraints.pop_back();
  commit(std::move(next));
  return true;
}

void Session::reset() {
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<SessionState>();
  next->features = state_->features;
  next->layout = VarLayout(next->features, {});
  commit(std::move(next));
}

Answer Session::solveopt(const SolveRequest& request, const Budget& budget) const {
  auto snap = snapshot();
  return solve_snapshot(*snap, request, budget);
}

Answer solve_snapshot(const SessionState& state, const SolveRequest& request, const Budget& budget) {
  const VarLayout& layout = state.layout;
  EngineContext ctx = state.context();

  std::optional<std::set<VarId>> keep;
  std::vector<std::size_t> shown_instances;
  for (const auto& ref : request.project) {
    if (!keep) keep.emplace();
    auto dot = ref.find('.');
    std::string inst = ref.substr(0, dot);
    auto i = layout.instance_index(inst);
    if (!i) throw Error(ErrorKind::UnknownName, "unknown instance '" + inst + "' in projection");
    if (std::find(shown_instances.begin(), shown_instances.end(), *i) == shown_instances.end()) {
      shown_instances.push_back(*i);
    }
    if (dot == std::string::npos) {
      for (VarId v : layout.instance_vars(*i)) keep->insert(v);
      continue;
    }
    auto f = layout.feature_index(ref.substr(dot + 1));
    if (!f) throw Error(ErrorKind::UnknownName, "unknown feature in projection '" + ref + "'");
    for (VarId v : layout.feature_vars(*i, *f)) keep->insert(v);
  }
  std::sort(shown_instances.begin(), shown_instances.end());
  if (!keep) {
    for (std::size_t i = 0; i < layout.instances().size(); ++i) shown_instances.push_back(i);
  }

  std::optional<DistanceSpec> spec;
  if (request.minimize) {
    spec = parse_distance_spec(*request.minimize);
    if (!layout.instance_index(spec->from) || !layout.instance_index(spec->to)) {
      throw Error(ErrorKind::UnknownName, "minimize refers to an undeclared instance");
    }
    if (spec->from == spec->to) throw Error(ErrorKind::Validation, "minimize needs two distinct instances");
  }

  Answer answer;
  EvalStats stats;
  try {
    TheoryExpr query = default_query(ctx);
    std::vector<Conjunction> members;
    std::vector<Point> witnesses;
    if (spec) {
      auto outcome = std::get<MinOutcome>(
          evaluate(TheoryExpr::minimize(std::move(query), *spec), ctx, budget, &stats));
      if (!outcome.empty()) {
        answer.min = outcome.value;
        answer.min_attained = outcome.attained;
      }
      for (auto& m : outcome.members) {
        members.push_back(std::move(m.constraints));
        witnesses.push_back(std::move(m.witness));
      }
    } else {
      members = std::get<Theory>(evaluate(query, ctx, budget, &stats)).members;
    }

    if (keep) {
      bool relaxed = false;
      for (const auto& m : members) {
        for (VarId v : m.variables()) {
          relaxed = relaxed || (keep->count(v) == 0 && layout.integral().count(v) != 0);
        }
      }
      std::vector<Conjunction> projected;
      std::vector<Point> kept_witnesses;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (budget.exceeded()) throw BudgetExceeded{};
        Conjunction p = project(members[i], *keep);
        ++stats.members_solved;
        if (std::find(projected.begin(), projected.end(), p) != projected.end()) continue;
        projected.push_back(std::move(p));
        if (spec) kept_witnesses.push_back(witnesses[i]);
      }
      members = std::move(projected);
      witnesses = std::move(kept_witnesses);
      if (relaxed && !members.empty()) {
        answer.notes.push_back("projection eliminated integer variables; answers are real shadows");
      }
    } else {
      for (auto& m : members) {
        if (budget.exceeded()) throw BudgetExceeded{};
        m = remove_redundant(m);
      }
    }

    for (std::size_t i = 0; i < members.size(); ++i) {
      AnswerMember m;
      m.constraints = decode_answer(members[i], layout);
      if (spec) m.witnesses = decode_witnesses(layout, witnesses[i], shown_instances);
      answer.members.push_back(std::move(m));
    }
  } catch (const BudgetExceeded&) {
    answer = Answer{};
    answer.status = "timeout";
    answer.notes.push_back("solve budget exceeded after " + std::to_string(stats.members_solved) +
                           " members");
  }
  answer.members_solved = stats.members_solved;
  return answer;
}

nlohmann::ordered_json Session::state_json() const {
  auto s = snapshot();
  nlohmann::ordered_json out;
  out["features"] = metadata_to_json(s->features)["features"];
  auto models = nlohmann::ordered_json::array();
  for (const auto& m : s->models) models.push_back(m->model_id);
  out["models"] = models;
  auto instances = nlohmann::ordered_json::array();
  for (const auto& d : s->instances) {
    instances.push_back({{"name", d.name},
                         {"model_id", d.model_id},
                         {"label", d.label},
                         {"minconf", d.min_confidence.str()}});
  }
  out["instances"] = instances;
  auto constraints = nlohmann::ordered_json::array();
  for (const auto& c : s->constraints) constraints.push_back({{"id", c.id}, {"text", c.text}});
  out["constraints"] = constraints;
  return out;
}

std::string Session::script() const {
  auto s = snapshot();
  std::ostringstream out;
  out << "meta " << metadata_to_json(s->features).dump() << "\n";
  for (const auto& m : s->models) out << "model " << tree_to_json(*m).dump() << "\n";
  for (const auto& d : s->instances) {
    out << "instance " << d.name << " " << d.model_id << " label=" << d.label;
    if (!d.min_confidence.is_zero()) out << " minconf=" << d.min_confidence.str();
    out << "\n";
  }
  for (const auto& c : s->constraints) out << "constraint " << c.text << "\n";
  return out.str();
}

std::string render_text(const Answer& answer) {
  std::ostringstream out;
  if (answer.status == "timeout") {
    out << "timeout: solved " << answer.members_solved << " members\n";
    return out.str();
  }
  if (answer.members.empty()) {
    out << "no solution\n";
  }
  for (const auto& m : answer.members) {
    out << "Answer: " << (m.constraints.empty() ? "true" : join(m.constraints, ", ")) << "\n";
    for (const auto& w : m.witnesses) {
      std::vector<std::string> parts;
      for (const auto& [f, v] : w.values) parts.push_back(f + "=" + v);
      out << "witness " << w.instance << ": " << join(parts, ", ") << "\n";
    }
  }
  if (answer.min) {
    out << "min = " << answer.min->str();
    if (!answer.min_attained) out << " (infimum, not attained)";
    out << "\n";
  }
  for (const auto& n : answer.notes) out << "note: " << n << "\n";
  return out.str();
}

nlohmann::ordered_json answer_to_json(const Answer& answer) {
  nlohmann::ordered_json out;
  out["status"] = answer.status;
  auto members = nlohmann::ordered_json::array();
  for (const auto& m : answer.members) {
    auto cs = nlohmann::ordered_json::array();
    for (const auto& c : m.constraints) cs.push_back({{"text", c}});
    members.push_back(cs);
  }
  out["members"] = members;
  if (answer.min) {
    out["min"] = answer.min->str();
    out["attained"] = answer.min_attained;
    auto ws = nlohmann::ordered_json::array();
    for (const auto& m : answer.members) {
      nlohmann::ordered_json per = nlohmann::ordered_json::object();
      for (const auto& w : m.witnesses) {
        nlohmann::ordered_json values = nlohmann::ordered_json::object();
        for (const auto& [f, v] : w.values) values[f] = v;
        per[w.instance] = values;
      }
      ws.push_back(per);
    }
    out["witnesses"] = ws;
  }
  out["notes"] = answer.notes;
  if (answer.status == "timeout") out["members_solved"] = answer.members_solved;
  return out;
}

}  // namespace dtr
