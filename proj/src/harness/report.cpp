#include <Eigen/Core>
#include <boost/version.hpp>

#include <cstdio>
#include <map>
#include <fstream>
#include <sstream>

#include "ltgap/harness.hpp"

namespace ltgap::harness {

using nlohmann::json;

bool Result::passed() const {
  if (hypothesis_failure) return false;
  for (const Check& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

std::vector<Scenario> default_suite(std::uint64_t seed, const std::string& filter) {
  std::vector<Scenario> out;
  for (const std::string& kind : kinds()) {
    if (!filter.empty() && filter != kind) continue;
    Scenario s;
    s.name = kind;
    s.kind = kind;
    s.seed = seed;
    s.parameters = default_parameters(kind);
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ScenarioError("unknown filter '" + filter + "'", 0, 0);
  return out;
}

std::vector<Result> run_all(const std::vector<Scenario>& scenarios, std::size_t jobs) {
  std::vector<Result> results;
  for (const Scenario& s : scenarios) results.push_back(run(s, jobs));
  return results;
}

int exit_code(const std::vector<Result>& results) {
  bool hypothesis = false, failed = false;
  for (const Result& r : results) {
    hypothesis = hypothesis || r.hypothesis_failure;
    failed = failed || !r.passed();
  }
  if (hypothesis) return 3;
  return failed ? 1 : 0;
}

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_stem(const Result& r, const std::string& name) { return r.scenario.name + "_" + name; }

}  // namespace

std::string table_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i].name;
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_real(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string series_csv(const Series& series) {
  std::ostringstream os;
  os << series.x_label << ',' << series.y_label << '\n';
  for (std::size_t i = 0; i < series.x.size(); ++i)
    os << format_real(series.x[i]) << ',' << format_real(series.y[i]) << '\n';
  return os.str();
}

json report_json(const std::vector<Result>& results) {
  json doc;
  doc["provenance"] = {
      {"ltgap", kVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"boost", BOOST_LIB_VERSION},
      {"compiler", __VERSION__},
      {"wall_time", "recorded separately in runtime.json"}};
  json scenarios = json::array();
  std::map<std::string, bool> criteria;
  for (const Result& r : results) {
    json s;
    s["name"] = r.scenario.name;
    s["kind"] = r.scenario.kind;
    s["seed"] = r.scenario.seed;
    s["parameters"] = r.scenario.parameters;
    s["passed"] = r.passed();
    s["hypothesis_failure"] = r.hypothesis_failure;
    if (!r.diagnostic.empty()) s["diagnostic"] = r.diagnostic;
    json checks = json::array();
    for (const Check& c : r.checks) {
      checks.push_back({{"criterion", c.criterion}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      if (c.criterion > 0) {
        const std::string key = std::to_string(c.criterion);
        auto it = criteria.find(key);
        criteria[key] = (it == criteria.end() ? true : it->second) && c.pass;
      }
    }
    s["checks"] = checks;
    s["summary"] = r.summary;
    json tables = json::array();
    for (const Table& t : r.tables) {
      json cols = json::array();
      for (const Column& c : t.columns) cols.push_back({{"name", c.name}, {"doc", c.doc}});
      tables.push_back({{"name", t.name},
                        {"file", "tables/" + file_stem(r, t.name) + ".csv"},
                        {"rows", t.rows.size()},
                        {"columns", cols}});
    }
    s["tables"] = tables;
    json series = json::array();
    for (const Series& p : r.series)
      series.push_back({{"name", p.name},
                        {"file", "plots/" + file_stem(r, p.name) + ".csv"},
                        {"x", p.x_label},
                        {"y", p.y_label},
                        {"points", p.x.size()}});
    s["plots"] = series;
    scenarios.push_back(s);
  }
  doc["scenarios"] = scenarios;
  doc["criteria"] = criteria;
  doc["exit_code"] = exit_code(results);
  return doc;
}

std::string summary_text(const std::vector<Result>& results) {
  std::ostringstream os;
  for (const Result& r : results) {
    for (const Check& c : r.checks) {
      os << (c.pass ? "[PASS] " : "[FAIL] ");
      if (c.criterion > 0)
        os << 'C' << c.criterion << ' ';
      else
        os << "-- ";
      os << r.scenario.name << '/' << c.name << ": " << c.detail << '\n';
    }
    if (r.hypothesis_failure) os << "[HYPOTHESIS] " << r.scenario.name << ": " << r.diagnostic << '\n';
  }
  return os.str();
}

void write_outputs(const std::vector<Result>& results, const std::filesystem::path& dir,
                   bool emit_plots) {
  std::filesystem::create_directories(dir / "tables");
  if (emit_plots) std::filesystem::create_directories(dir / "plots");
  {
    std::ofstream out(dir / "report.json");
    out << report_json(results).dump(2) << '\n';
  }
  for (const Result& r : results) {
    for (const Table& t : r.tables) {
      std::ofstream out(dir / "tables" / (file_stem(r, t.name) + ".csv"));
      out << table_csv(t);
    }
    if (!emit_plots) continue;
    for (const Series& s : r.series) {
      std::ofstream out(dir / "plots" / (file_stem(r, s.name) + ".csv"));
      out << series_csv(s);
    }
  }
}

}  // namespace ltgap::harness
