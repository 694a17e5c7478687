#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "dtreason/error.hpp"
#include "dtreason/script.hpp"
#include "dtreason/service.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kInput = 3;
constexpr int kInternal = 4;

int exit_code_for(dtr::ErrorKind kind) {
  return kind == dtr::ErrorKind::Internal ? kInternal : kInput;
}

void configure_logging() {
  // stdout carries answers, so logs go to stderr
  spdlog::set_default_logger(spdlog::stderr_color_mt("dtreason"));
  const char* level = std::getenv("REASON_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dtr::Error(dtr::ErrorKind::Validation, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw dtr::Error(dtr::ErrorKind::Parse, path + ": " + e.what());
  }
}

int run_repl(dtr::ScriptRunner& runner) {
  bool interactive = isatty(STDIN_FILENO) != 0;
  std::string line;
  std::size_t number = 0;
  while (true) {
    if (interactive) std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    ++number;
    std::string out;
    auto err = dtr::run_script(runner, line, out);
    std::cout << out << std::flush;
    if (err) {
      err->line = number;
      std::cerr << err->str() << "\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explain decision-tree predictions with linear constraint reasoning"};
  std::vector<std::string> models;
  std::string meta;
  std::string script;
  std::string listen;
  std::string format = "text";
  std::string cors;
  unsigned budget_ms = 0;
  unsigned idle_seconds = 3600;
  app.add_option("--model", models, "Tree document to load (repeatable)")->check(CLI::ExistingFile);
  app.add_option("--meta", meta, "Feature metadata document")->check(CLI::ExistingFile);
  app.add_option("--script", script, "Session script to run in batch mode")->check(CLI::ExistingFile);
  app.add_option("--serve", listen, "Start the HTTP service on host:port");
  app.add_option("--format", format, "Answer format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--cors", cors, "Origin allowed to call the HTTP service");
  auto* budget_opt = app.add_option("--budget-ms", budget_ms,
                                    "Time budget per solve in milliseconds (0 = none; the service defaults to 10000)");
  app.add_option("--idle-seconds", idle_seconds, "Service session idle expiry");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  configure_logging();

  if (!listen.empty()) {
    auto colon = listen.rfind(':');
    int port = 0;
    if (colon == std::string::npos ||
        (port = std::atoi(listen.c_str() + colon + 1)) <= 0 || port > 65535) {
      std::cerr << "--serve expects host:port\n";
      return kUsage;
    }
    dtr::ServiceOptions options;
    options.idle_timeout = std::chrono::seconds(idle_seconds);
    options.cors_origin = cors;
    if (budget_opt->count() > 0) options.budget_ms = budget_ms ? std::optional<unsigned>(budget_ms) : std::nullopt;
    spdlog::info("listening on {}", listen);
    if (!dtr::serve(listen.substr(0, colon), port, options)) {
      std::cerr << "cannot listen on " << listen << "\n";
      return kInternal;
    }
    return kOk;
  }

  auto fmt = format == "json" ? dtr::OutputFormat::Json : dtr::OutputFormat::Text;
  std::filesystem::path base = script.empty() ? std::filesystem::current_path()
                                              : std::filesystem::path(script).parent_path();
  dtr::ScriptRunner runner(fmt, base, budget_ms ? std::optional<unsigned>(budget_ms) : std::nullopt);
  try {
    if (!meta.empty()) runner.load_metadata(read_json(meta));
    for (const auto& m : models) runner.load_model(read_json(m));
    if (script.empty()) return run_repl(runner);

    std::string text = read_file(script);
    std::string out;
    auto err = dtr::run_script(runner, text, out);
    std::cout << out << std::flush;
    if (err) {
      std::cerr << script << ":" << err->str() << "\n";
      return exit_code_for(err->kind);
    }
    return kOk;
  } catch (const dtr::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
