// Acceptance battery: runs the default suite and prints one line per
// criterion. Criterion 15 reruns the suite and compares the reports.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ltgap/harness.hpp"

using namespace ltgap::harness;

namespace {

// Everything the CLI writes except runtime.json.
std::string artifacts(const std::vector<Result>& results) {
  std::string out = report_json(results).dump();
  for (const Result& r : results) {
    for (const Table& t : r.tables) out += table_csv(t);
    for (const Series& s : r.series) out += series_csv(s);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t jobs = argc > 1 ? std::stoul(argv[1]) : 8;
  const auto suite = default_suite(42);

  const auto first = run_all(suite, 1);
  const std::string report1 = artifacts(first);
  std::fputs(summary_text(first).c_str(), stdout);

  struct Tally {
    std::size_t pass = 0, total = 0;
    std::string failed;
  };
  std::map<int, Tally> by;
  for (const Result& r : first) {
    for (const Check& c : r.checks) {
      if (c.criterion == 0) continue;
      Tally& t = by[c.criterion];
      ++t.total;
      if (c.pass) ++t.pass;
      else if (t.failed.empty()) t.failed = r.scenario.kind + "/" + c.name + ": " + c.detail;
    }
    if (r.hypothesis_failure) std::printf("hypothesis failure in %s: %s\n", r.scenario.kind.c_str(), r.diagnostic.c_str());
  }

  const std::string report2 = artifacts(run_all(suite, 1));
  const std::string report8 = artifacts(run_all(suite, jobs));
  const bool deterministic = report1 == report2 && report1 == report8;

  std::puts("");
  bool all = true;
  for (int c = 1; c <= 14; ++c) {
    const Tally& t = by[c];
    const bool ok = t.total > 0 && t.pass == t.total;
    all = all && ok;
    std::printf("criterion %2d: %s (%zu/%zu checks)%s%s\n", c, ok ? "PASS" : "FAIL", t.pass, t.total,
                t.failed.empty() ? "" : "  first failure: ", t.failed.c_str());
  }
  all = all && deterministic;
  std::printf("criterion 15: %s (report and table bytes %zu; run 2 %s, jobs=%zu %s)\n", deterministic ? "PASS" : "FAIL",
              report1.size(), report1 == report2 ? "identical" : "differs", jobs,
              report1 == report8 ? "identical" : "differs");
  return all ? 0 : 1;
}
