#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adept/config.hpp"
#include "adept/game.hpp"

namespace adept {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
};
MeanSe mean_se(std::span<const double> values);

// One grid cell: horizon, lazy exponent (nullopt runs the plain learner) and learner.
struct SweepCell {
  std::size_t horizon = 0;
  std::optional<double> c;
  LearnerSpec learner;
  ExperimentConfig config;
  std::string key() const;
};

struct SweepAggregate {
  std::string cell;
  std::size_t horizon = 0;
  std::string c;
  std::string learner;
  std::size_t seeds = 0;
  std::size_t failures = 0;
  MeanSe expected_regret;
  MeanSe realized_regret;
  MeanSe regret_per_round;
  MeanSe raw_queries;
  MeanSe charged_queries;
  MeanSe max_active;
  std::string expert_count;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  // Per-seed summaries keyed by (cell index, replicate).
  std::vector<std::vector<std::optional<Summary>>> runs;
  std::vector<SweepAggregate> aggregates;
  std::vector<std::string> failures;
};

// Grid document: {"base": <experiment config>, "grid": {"T": [...], "c": [...],
// "learner": [...], "seeds": n}}. Missing axes fall back to the base config.
std::vector<SweepCell> expand_grid(const nlohmann::json& doc, std::size_t& seeds);
SweepResult run_sweep(const nlohmann::json& doc, std::size_t jobs = 1);

void write_sweep_aggregates(std::ostream& out, const SweepResult& result);
void write_sweep_runs(std::ostream& out, const SweepResult& result);

}  // namespace adept
