// Acceptance run: one PASS/FAIL line per criterion, details below each line.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "adept/verify.hpp"

namespace {

using namespace adept;

struct Criterion {
  int id;
  std::string title;
  std::function<CheckReport()> run;
};

std::vector<Criterion> criteria() {
  return {
      {1, "exact distribution equivalence", [] { return verify_equivalence(); }},
      {2, "pascal telescoping", [] { return verify_pascal(64, 8); }},
      {3, "structural run invariants", [] { return verify_run_invariants(test_fleet(false), kCheckAll, "fleet"); }},
      {4, "regret bound", [] { return verify_regret_bound(); }},
      {5, "query-complexity separation", [] { return verify_query_separation(); }},
      {6, "lower bound", [] { return verify_lower_bound(); }},
      {7, "tradeoff wrapper", [] { return verify_tradeoff(); }},
      {8, "dimension oracle", [] { return verify_dims(); }},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  bool all_ok = true;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const CheckReport report = c.run();
    all_ok = all_ok && report.passed;
    std::cout << (report.passed ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << '\n';
    std::cout << describe(report) << std::flush;
  }
  return all_ok ? 0 : 1;
}
