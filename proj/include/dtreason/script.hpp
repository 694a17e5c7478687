#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtreason/error.hpp"
#include "dtreason/session.hpp"

namespace dtr {

enum class OutputFormat { Text, Json };

/// A failed script line. `column` counts from the start of the line.
struct ScriptError {
  std::size_t line;
  std::optional<std::size_t> column;
  ErrorKind kind;
  std::string message;

  std::string str() const;
};

/// Splits on whitespace outside (), [] and double quotes.
std::vector<std::string> split_top_level(std::string_view text);
/// "[CE, F.age]", "CE,F" or "CE" -> names.
std::vector<std::string> parse_name_list(std::string_view text);

/// Executes session-script lines. Shared by batch mode, the REPL and the
/// Python bindings, so all three render identical bytes.
class ScriptRunner {
 public:
  ScriptRunner(OutputFormat format = OutputFormat::Text, std::filesystem::path base_dir = {},
               std::optional<unsigned> budget_ms = std::nullopt);

  /// Runs one line and returns its output (possibly empty). Throws Error.
  std::string execute(std::string_view line);

  void load_metadata(const nlohmann::json& doc);
  std::string load_model(const nlohmann::json& doc);

  Session* session() { return session_.get(); }

 private:
  std::string solve(std::string_view args);
  std::string show() const;
  Session& require_session();
  nlohmann::json load_document(std::string_view arg) const;

  OutputFormat format_;
  std::filesystem::path base_dir_;
  std::optional<unsigned> budget_ms_;
  std::unique_ptr<Session> session_;
  bool printed_answer_ = false;
};

/// Runs every line; stops at the first error. Output goes to `out`.
std::optional<ScriptError> run_script(ScriptRunner& runner, std::string_view text,
                                      std::string& out);

}  // namespace dtr
