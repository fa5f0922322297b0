#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "adept/config.hpp"
#include "adept/sweep.hpp"

namespace adept {

// Outcome of one verification suite. Failures are counterexamples in words.
struct CheckReport {
  std::string name;
  bool passed = true;
  std::uint64_t checks = 0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  double seconds = 0.0;

  void fail(std::string message);
  void note(std::string message) { notes.push_back(std::move(message)); }
  // Counts one check; records `message` as a failure when `ok` is false.
  bool expect(bool ok, const std::string& message);
};

// W_{t-1}(k) = W_t(k) + W_t(k+1) over every T <= max_horizon, M <= max_budget,
// exact with zero tolerance and log mode within 1e-9 relative, against an
// independent Pascal-triangle count.
CheckReport verify_pascal(std::size_t max_horizon = 64, int max_budget = 8);

struct EquivalenceOptions {
  std::size_t max_domain = 4;
  std::size_t max_concepts = 6;
  std::size_t max_horizon = 8;
  std::vector<int> budgets{1, 2};
  // Instance sequences drawn per (class, T).
  std::size_t sequences = 1;
  std::uint64_t seed = 11;
  // Every `variant_stride`-th class is also run with Halving and adaptive eta.
  std::size_t variant_stride = 4;
};
// Exact ADEPT vs pruned-expert reference on every class up to relabeling of
// the domain points, every T, every label sequence.
CheckReport verify_equivalence(const EquivalenceOptions& options = {});

struct FleetGame {
  std::string name;
  ExperimentConfig config;
  std::uint64_t seed = 0;
};
std::vector<FleetGame> test_fleet(bool quick = false);

enum RunCheck : unsigned {
  kCheckSauer = 1u << 0,
  kCheckProjection = 1u << 1,
  kCheckQueries = 1u << 2,
  kCheckSurvival = 1u << 3,
  kCheckPotentials = 1u << 4,
  kCheckPurity = 1u << 5,
  kCheckAll = 0x3Fu,
};
CheckReport verify_run_invariants(const std::vector<FleetGame>& fleet, unsigned checks, const std::string& name);

struct RegretBoundOptions {
  std::size_t horizon = 2048;
  std::size_t seeds = 200;
  double flip = 0.3;
};
CheckReport verify_regret_bound(const RegretBoundOptions& options = {});

struct SeparationOptions {
  std::size_t horizon = 512;
  int budget = 2;
  std::uint64_t seed = 5;
};
CheckReport verify_query_separation(const SeparationOptions& options = {});

struct LowerBoundOptions {
  std::size_t horizon = 2000;
  std::size_t seeds = 500;
  std::vector<std::uint64_t> budgets{0, 1, 4, 10};
  std::size_t max_blocks = 1;
};
CheckReport verify_lower_bound(const LowerBoundOptions& options = {});

struct TradeoffOptions {
  std::vector<std::size_t> horizons{256, 1024, 4096};
  std::size_t seeds = 100;
  double c = 0.5;
  double flip = 0.1;
  std::size_t blocks = 4;
  // Games used for the identity, blindness and replacement audits.
  std::size_t audit_games = 6;
};
// Lazy wrapper: K = T identity, sample blindness, restriction identity,
// query bound and the regret-per-round trend.
CheckReport verify_tradeoff(const TradeoffOptions& options = {});
// The audit part alone (no regret trend).
CheckReport verify_sample_blind(std::size_t games = 6);

// Brute-force VC and Littlestone dimensions against the known table.
CheckReport verify_dims();

// Suite names accepted by run_suite, in CLI order.
const std::vector<std::string>& suite_names();
// quick = reduced scale for smoke runs. Throws std::invalid_argument on an unknown name.
CheckReport run_suite(const std::string& name, bool quick = false);

std::string describe(const CheckReport& report, std::size_t max_failures = 20);

}  // namespace adept
