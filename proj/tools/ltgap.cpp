// Command-line driver for scenario files and the acceptance battery.
//
//   ltgap run <scenario.json> [--out DIR] [--jobs N] [--emit-plots]
//   ltgap suite [--filter KIND] [--seed S] [--out DIR] [--jobs N] [--emit-plots]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 malformed input,
// 3 a numerical hypothesis failed after nudging.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ltgap/harness.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

int finish(const std::vector<ltgap::harness::Result>& results, const std::filesystem::path& out, bool plots,
           double seconds, std::size_t jobs) {
  ltgap::harness::write_outputs(results, out, plots);
  nlohmann::json runtime = {{"wall_time_seconds", seconds}, {"jobs", jobs}};
  std::ofstream(out / "runtime.json") << runtime.dump(2) << '\n';
  std::cout << ltgap::harness::summary_text(results);
  const int code = ltgap::harness::exit_code(results);
  std::cout << "report: " << (out / "report.json").string() << "  exit " << code << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap-eigenvalue counting and Lieb-Thirring experiments"};
  app.set_version_flag("--version", std::string(ltgap::harness::kVersion));
  app.require_subcommand(1);

  std::string out_dir = env_or("OUT_DIR", "out");
  std::size_t jobs = std::stoul(env_or("JOBS", std::to_string(std::max(1u, std::thread::hardware_concurrency()))));
  bool plots = false;

  auto* run = app.add_subcommand("run", "run one scenario file");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  auto* suite = app.add_subcommand("suite", "run the pinned acceptance battery");
  std::string filter;
  std::uint64_t seed = 42;
  suite->add_option("--filter", filter, "run only this scenario kind");
  suite->add_option("--seed", seed, "base seed");
  for (auto* sub : {run, suite}) {
    sub->add_option("--out", out_dir, "output directory (env OUT_DIR)");
    sub->add_option("--jobs", jobs, "worker threads (env JOBS)")->check(CLI::PositiveNumber);
    sub->add_flag("--emit-plots", plots, "write plot series as CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<ltgap::harness::Result> results;
  try {
    if (*run) {
      results.push_back(ltgap::harness::run(ltgap::harness::load_scenario(scenario_path), jobs));
    } else {
      if (!filter.empty()) {
        const auto& k = ltgap::harness::kinds();
        if (std::find(k.begin(), k.end(), filter) == k.end()) {
          std::cerr << "error: unknown kind '" << filter << "'\n";
          return 2;
        }
      }
      results = ltgap::harness::run_all(ltgap::harness::default_suite(seed, filter), jobs);
    }
  } catch (const ltgap::harness::ScenarioError& e) {
    std::cerr << (scenario_path.empty() ? std::string("suite") : scenario_path);
    if (e.line() > 0) std::cerr << ':' << e.line() << ':' << e.column();
    std::cerr << ": error: " << e.what() << '\n';
    return 2;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return finish(results, out_dir, plots, seconds, jobs);
}
