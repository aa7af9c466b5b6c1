#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ltgap/harness.hpp"

using namespace ltgap::harness;
using nlohmann::json;

TEST_CASE("scenario parsing") {
  const Scenario s = parse_scenario(R"({"name": "x", "kind": "index-suite", "seed": 9, "parameters": {"instances": 5}})");
  CHECK(s.name == "x");
  CHECK(s.kind == "index-suite");
  CHECK(s.seed == 9);
  CHECK(s.parameters["instances"] == 5);
  CHECK(s.parameters["max_size"] == default_parameters("index-suite")["max_size"]);

  const Scenario d = parse_scenario(R"({"kind": "szego"})");
  CHECK(d.seed == 42);
  CHECK(d.name == "szego");
}

TEST_CASE("malformed scenarios report line and column") {
  auto error_of = [](const std::string& text) {
    try {
      parse_scenario(text);
    } catch (const ScenarioError& e) {
      return std::make_pair(e.line(), e.column());
    }
    FAIL("no ScenarioError");
    return std::make_pair(std::size_t{0}, std::size_t{0});
  };
  CHECK(error_of("{\n  \"kind\": \"szego\",\n  \"sed\": 4\n}") == std::make_pair(std::size_t{3}, std::size_t{3}));
  CHECK(error_of("{\n  \"kind\": \"dirac\",\n  \"parameters\": {\n    \"instancez\": 4\n  }\n}") ==
        std::make_pair(std::size_t{4}, std::size_t{5}));
  CHECK(error_of("{\"kind\": \"dirac\", \"parameters\": {\"instances\": \"many\"}}").first == 1);
  CHECK(error_of("{\"kind\": \"spectral\"}").first == 1);
  CHECK(error_of("{\n  \"kind\": \"gap-sum\",\n  \"parameters\": {\"anchor_size\": 400,}\n}").first == 3);
  CHECK_THROWS_AS(parse_scenario("[1, 2]"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"name": "no kind"})"), ScenarioError);
}

TEST_CASE("identity suite passes") {
  Scenario s = parse_scenario(R"({"kind": "identity-suite", "parameters": {"instances": 60, "ky_fan_instances": 60}})");
  const Result r = run(s, 2);
  CHECK(r.passed());
  CHECK(exit_code({r}) == 0);
  std::set<int> criteria;
  for (const Check& c : r.checks) criteria.insert(c.criterion);
  CHECK(criteria == std::set<int>{1, 2, 3, 5});
}

TEST_CASE("planted degenerate decoupling instance is nudged") {
  const Result r = run(parse_scenario(R"({"kind": "decoupling-suite", "parameters": {"instances": 60, "min_strict": 5}})"));
  CHECK(exit_code({r}) == 0);
  bool found = false;
  for (const Check& c : r.checks)
    if (c.name == "decoupling_nudge_path") {
      found = true;
      CHECK(c.pass);
    }
  CHECK(found);
}

TEST_CASE("filtered suite and plot output") {
  const auto suite = default_suite(42, "dirac");
  REQUIRE(suite.size() == 1);
  CHECK(suite[0].kind == "dirac");
  CHECK(default_suite(42).size() == kinds().size());

  Scenario s = parse_scenario(
      R"({"kind": "dirac", "parameters": {"instances": 4, "symbol_points": 2000, "masses": [1.0], "lambdas": [0.5, 1.0]}})");
  const Result r = run(s);
  for (const Check& c : r.checks) CHECK((c.criterion == 13 || c.criterion == 0));

  const auto dir = std::filesystem::temp_directory_path() / "ltgap_harness_test";
  std::filesystem::remove_all(dir);
  const Result band = run(parse_scenario(R"({"kind": "band-structure"})"));
  write_outputs({band}, dir, true);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "plots" / "band-structure_mathieu_discriminant.csv"));
  CHECK(std::filesystem::exists(dir / "plots" / "band-structure_period2_band_0.csv"));
  std::ifstream in(dir / "tables" / "band-structure_c3_vs_gap.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "beta,gap_width,c3,c3_linear,c3_refined");
  std::filesystem::remove_all(dir);
}

TEST_CASE("CSV uses round-trip precision") {
  Table t{"t", {{"x", "value"}}, {{0.1}, {1.0 / 3.0}}};
  const std::string csv = table_csv(t);
  std::istringstream lines(csv);
  std::string header, a, b;
  std::getline(lines, header);
  std::getline(lines, a);
  std::getline(lines, b);
  CHECK(std::stod(a) == 0.1);
  CHECK(std::stod(b) == 1.0 / 3.0);
}

TEST_CASE("reports do not depend on the thread count") {
  const Scenario s = parse_scenario(R"({"kind": "index-suite", "seed": 5, "parameters": {"instances": 40}})");
  const json one = report_json({run(s, 1)});
  const json four = report_json({run(s, 4)});
  CHECK(one.dump() == four.dump());
  CHECK(one.dump().find("wall") != std::string::npos);  // pointer to runtime.json only
}
