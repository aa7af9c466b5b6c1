#pragma once

// Scenario runner: strict JSON scenarios, per-kind experiment drivers, and
// deterministic JSON/CSV report emission.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace ltgap::harness {

inline constexpr const char* kVersion = "1.0.0";

/// Scenario kinds in suite order.
const std::vector<std::string>& kinds();

/// Parse or validation failure with a 1-based source position (0 when unknown).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

struct Scenario {
  std::string name;
  std::string kind;
  std::uint64_t seed = 42;
  nlohmann::json parameters = nlohmann::json::object();  // defaults merged in
};

/// Parses and validates a scenario document; unknown keys are rejected.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Default parameter table of a kind (also the list of accepted keys).
nlohmann::json default_parameters(const std::string& kind);

struct Check {
  int criterion = 0;  // acceptance criterion number, 0 for supplementary checks
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Column {
  std::string name;
  std::string doc;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
};

/// Two-column plot series.
struct Series {
  std::string name;
  std::string x_label, y_label;
  std::vector<double> x, y;
};

struct Result {
  Scenario scenario;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<Series> series;
  nlohmann::json summary = nlohmann::json::object();
  bool hypothesis_failure = false;
  std::string diagnostic;

  bool passed() const;
};

/// Runs one scenario. Numerical-hypothesis failures that survive nudging are
/// caught and reported through `hypothesis_failure`.
Result run(const Scenario& scenario, std::size_t jobs = 1);

/// The pinned acceptance battery; `filter` selects a single kind when nonempty.
std::vector<Scenario> default_suite(std::uint64_t seed, const std::string& filter = "");

std::vector<Result> run_all(const std::vector<Scenario>& scenarios, std::size_t jobs);

/// 0 when every check passes, 3 when a hypothesis failure occurred, 1 otherwise.
int exit_code(const std::vector<Result>& results);

/// Deterministic report document (no timing or host information).
nlohmann::json report_json(const std::vector<Result>& results);

/// One line per check: "[PASS] C<n> <kind>/<name>: <detail>".
std::string summary_text(const std::vector<Result>& results);

/// Writes report.json, tables/<kind>_<table>.csv and, when requested,
/// plots/<kind>_<series>.csv under `dir`.
void write_outputs(const std::vector<Result>& results, const std::filesystem::path& dir,
                   bool emit_plots);

/// CSV text with a header row and 17 significant digits.
std::string table_csv(const Table& table);
std::string series_csv(const Series& series);

}  // namespace ltgap::harness
