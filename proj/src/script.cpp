#include "dtreason/script.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "dtreason/error.hpp"

namespace dtr {

std::string ScriptError::str() const {
  std::string out = "line " + std::to_string(line);
  if (column) out += ", column " + std::to_string(*column);
  return out + ": " + std::string(error_kind_name(kind)) + ": " + message;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

/// Splits "key=value"; empty key when there is no '='.
std::pair<std::string, std::string> key_value(const std::string& token) {
  auto eq = token.find('=');
  if (eq == std::string::npos) return {"", token};
  return {token.substr(0, eq), token.substr(eq + 1)};
}

}  // namespace

std::vector<std::string> split_top_level(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  int depth = 0;
  bool quoted = false;
  for (char c : text) {
    if (c == '"') quoted = !quoted;
    if (!quoted) {
      if (c == '(' || c == '[') ++depth;
      if ((c == ')' || c == ']') && depth > 0) --depth;
      if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
        if (!current.empty()) out.push_back(std::move(current));
        current.clear();
        continue;
      }
    }
    current += c;
  }
  if (quoted || depth != 0) throw Error(ErrorKind::Parse, "unbalanced brackets or quotes");
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw Error(ErrorKind::Parse, "unterminated list");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != ',') continue;
    std::string name = unquote(trim(text.substr(start, i - start)));
    if (name.size() >= 2 && name.front() == '\'' && name.back() == '\'') {
      name = name.substr(1, name.size() - 2);
    }
    if (name.empty()) throw Error(ErrorKind::Parse, "empty name in list");
    out.push_back(std::move(name));
    start = i + 1;
  }
  return out;
}

ScriptRunner::ScriptRunner(OutputFormat format, std::filesystem::path base_dir,
                           std::optional<unsigned> budget_ms)
    : format_(format), base_dir_(std::move(base_dir)), budget_ms_(budget_ms) {}

void ScriptRunner::load_metadata(const nlohmann::json& doc) {
  session_ = std::make_unique<Session>(parse_metadata(doc));
}

std::string ScriptRunner::load_model(const nlohmann::json& doc) {
  return require_session().declare_model(doc);
}

Session& ScriptRunner::require_session() {
  if (!session_) {
    throw Error(ErrorKind::Validation, "no feature metadata loaded (use --meta or a 'meta' line)");
  }
  return *session_;
}

nlohmann::json ScriptRunner::load_document(std::string_view arg) const {
  arg = trim(arg);
  if (arg.empty()) throw Error(ErrorKind::Parse, "expected a path or an inline JSON document");
  try {
    if (arg.front() == '{') return nlohmann::json::parse(arg);
    std::filesystem::path path = unquote(arg);
    if (path.is_relative() && !base_dir_.empty()) path = base_dir_ / path;
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Validation, "cannot open '" + path.string() + "'");
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
  }
}

std::string ScriptRunner::execute(std::string_view raw) {
  std::string_view line = trim(raw);
  if (line.empty() || line.front() == '#') return {};
  auto space = line.find_first_of(" \t");
  std::string verb(line.substr(0, space));
  std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));

  if (verb == "meta") {
    load_metadata(load_document(rest));
    return {};
  }
  if (verb == "model") {
    load_model(load_document(rest));
    return {};
  }
  if (verb == "instance") {
    auto tokens = split_top_level(rest);
    if (tokens.size() < 3) {
      throw Error(ErrorKind::Parse, "usage: instance <name> <model-id> label=<class> [minconf=<rat>]");
    }
    std::optional<std::string> label;
    Rat minconf;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      auto [key, value] = key_value(tokens[i]);
      if (key == "label") {
        label = unquote(value);
      } else if (key == "minconf") {
        minconf = Rat::parse(value);
      } else {
        throw Error(ErrorKind::Parse, "unexpected argument '" + tokens[i] + "'");
      }
    }
    if (!label) throw Error(ErrorKind::Parse, "instance needs label=<class>");
    require_session().declare_instance(tokens[0], tokens[1], *label, minconf);
    return {};
  }
  if (verb == "constraint") {
    require_session().add_constraint(std::string(rest));
    return {};
  }
  if (verb == "solve") return solve(rest);
  if (verb == "undo") {
    if (!rest.empty()) throw Error(ErrorKind::Parse, "undo takes no arguments");
    if (!require_session().undo()) throw Error(ErrorKind::Validation, "nothing to undo");
    return {};
  }
  if (verb == "reset") {
    if (!rest.empty()) throw Error(ErrorKind::Parse, "reset takes no arguments");
    require_session().reset();
    return {};
  }
  if (verb == "show") return show();
  throw Error(ErrorKind::Parse, "unknown command '" + verb + "'");
}

std::string ScriptRunner::solve(std::string_view args) {
  SolveRequest request;
  for (const auto& token : split_top_level(args)) {
    auto [key, value] = key_value(token);
    if (key == "project") {
      request.project = parse_name_list(value);
    } else if (key == "minimize") {
      request.minimize = unquote(value);
    } else {
      throw Error(ErrorKind::Parse, "unexpected solve argument '" + token + "'");
    }
  }
  Budget budget = budget_ms_ ? Budget::for_duration(std::chrono::milliseconds(*budget_ms_)) : Budget::unlimited();
  Answer answer = require_session().solveopt(request, budget);
  if (format_ == OutputFormat::Json) return answer_to_json(answer).dump() + "\n";
  std::string out = printed_answer_ ? "\n" : "";
  printed_answer_ = true;
  return out + render_text(answer);
}

std::string ScriptRunner::show() const {
  if (!session_) return format_ == OutputFormat::Json ? "null\n" : "no session\n";
  if (format_ == OutputFormat::Json) return session_->state_json().dump() + "\n";
  auto s = session_->snapshot();
  std::ostringstream out;
  for (const auto& m : s->models) out << "model " << m->model_id << "\n";
  for (const auto& d : s->instances) {
    out << "instance " << d.name << " " << d.model_id << " label=" << d.label;
    if (!d.min_confidence.is_zero()) out << " minconf=" << d.min_confidence.str();
    out << "\n";
  }
  for (const auto& c : s->constraints) out << "constraint [" << c.id << "] " << c.text << "\n";
  return out.str();
}

std::optional<ScriptError> run_script(ScriptRunner& runner, std::string_view text,
                                      std::string& out) {
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++number;
    try {
      out += runner.execute(line);
    } catch (const Error& e) {
      std::optional<std::size_t> column;
      if (e.pos() && e.pos()->line == 1) {
        // positions inside constraint text are relative to the text itself
        std::string_view body = trim(line);
        auto space = body.find_first_of(" \t");
        std::size_t offset = static_cast<std::size_t>(body.data() - line.data());
        if (space != std::string_view::npos) {
          std::string_view rest = trim(body.substr(space));
          offset = static_cast<std::size_t>(rest.data() - line.data());
        }
        column = offset + e.pos()->column;
      }
      return ScriptError{number, column, e.kind(), e.detail()};
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return std::nullopt;
}

}  // namespace dtr
