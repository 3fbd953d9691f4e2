#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "calderon/error.hpp"
#include "calderon/parallel.hpp"
#include "calderon_cli/runner.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

/// --threads wins over CALDERON_LAB_THREADS; -1 means invalid.
int resolve_threads(int flag) {
  if (flag >= 0) return flag;
  const char* env = std::getenv("CALDERON_LAB_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const int value = std::stoi(env, &used);
    return used == std::string(env).size() && value >= 0 ? value : -1;
  } catch (const std::exception&) {
    return -1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for gauge invariances of the anisotropic Calderon problem", "calderon-lab"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int threads = -1;
  for (const char* name : calderon::cli::kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment file")->required();
    sub->add_option("--out", out_dir, "Output directory (default calderon-out/<command>)");
    sub->add_option("--threads", threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  const int resolved = resolve_threads(threads);
  if (resolved < 0) {
    std::cerr << "error: CALDERON_LAB_THREADS must be a non-negative integer\n";
    return kExitConfig;
  }
  calderon::set_thread_count(resolved);

  calderon::cli::ExperimentConfig config;
  try {
    config = calderon::cli::load_config(config_path, command);
    config.output_dir = out_dir.empty() ? std::filesystem::path("calderon-out") / command : std::filesystem::path(out_dir);
  } catch (const calderon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const calderon::cli::ExperimentReport report = calderon::cli::run(config);
    calderon::cli::emit_report(report, config.output_dir);
    for (const auto& v : report.verdicts) {
      std::cout << (v.passed ? "pass " : "FAIL ") << v.rule << " = " << calderon::cli::format_double(v.value)
                << '\n';
    }
    std::cout << command << ": " << (report.passed() ? "PASS" : "FAIL") << " (" << config.output_dir.string()
              << ")\n";
    return report.passed() ? kExitPass : kExitFailure;
  } catch (const calderon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == calderon::ErrorCode::kConfigInvalid ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
