#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adept/adversaries.hpp"
#include "adept/config.hpp"
#include "adept/learner.hpp"
#include "adept/oracles.hpp"
#include "adept/reductions.hpp"
#include "adept/rng.hpp"
#include "adept/subsampling.hpp"

namespace adept {

struct RoundRecord {
  std::size_t round = 0;
  Instance x;
  double p1 = 0.0;
  Label prediction = Label::Zero;
  Label label = Label::Zero;
  std::size_t active = 0;
  std::uint64_t queries = 0;
  std::uint64_t cum_raw_queries = 0;
  std::uint64_t cum_charged_queries = 0;
  double expected_loss = 0.0;
  int realized_loss = 0;
};

struct Summary {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::string learner;
  std::string adversary;
  int budget = 0;
  std::size_t internal_horizon = 0;
  std::uint64_t learner_loss = 0;
  double expected_loss = 0.0;
  std::uint64_t comparator_loss = 0;
  double realized_regret = 0.0;
  double expected_regret = 0.0;
  std::uint64_t raw_queries = 0;
  std::uint64_t charged_queries = 0;
  std::uint64_t reduction_queries = 0;
  std::uint64_t base_learner_queries = 0;
  std::uint64_t throttled_queries = 0;
  std::size_t max_active = 0;
  // Rounds in which at least one query reached the class.
  std::size_t query_rounds = 0;
  std::size_t non_query_rounds = 0;
  double non_query_expected_loss = 0.0;
  // sum_{j<=M} C(T, j), the explicit ensemble's size.
  std::string expert_count;
  std::size_t early_reads = 0;
  double wall_ms = 0.0;
};

struct GameResult {
  Summary summary;
  std::vector<RoundRecord> transcript;
  LabeledSequence sequence;
};

struct GameOptions {
  bool keep_transcript = true;
  bool record_potentials = false;
};

// One seeded game. Rounds follow the protocol order: the adversary fixes
// (x_t, y_t), the learner predicts, y_t is revealed, both sides update.
class Game {
 public:
  Game(const ExperimentConfig& config, std::uint64_t seed, GameOptions options = {});

  bool done() const { return round_ >= config_.horizon; }
  std::size_t round() const { return round_; }
  const RoundRecord& step();
  GameResult finish();

  OnlineLearner& learner() { return *learner_; }
  Adept* adept() { return adept_; }
  LazyAdept* lazy() { return lazy_; }
  Bdpss* bdpss() { return bdpss_; }
  const BaseLearner& base_learner() const { return *base_; }
  OracleFront& oracle() { return *oracle_; }
  Adversary& adversary() { return *adversary_; }
  const ConceptClass& concept_class() const { return *cls_; }
  std::shared_ptr<const ConceptClass> concept_class_ptr() const { return cls_; }
  const LabeledSequence& sequence() const { return sequence_; }
  const std::vector<RoundRecord>& transcript() const { return transcript_; }
  int mistake_budget() const { return budget_; }

 private:
  ExperimentConfig config_;
  std::uint64_t seed_;
  GameOptions options_;
  std::shared_ptr<const ConceptClass> cls_;
  std::shared_ptr<BaseLearner> base_;
  std::unique_ptr<OracleFront> oracle_;
  std::unique_ptr<Adversary> adversary_;
  std::unique_ptr<OnlineLearner> learner_;
  Adept* adept_ = nullptr;
  LazyAdept* lazy_ = nullptr;
  Bdpss* bdpss_ = nullptr;
  Rng learner_rng_;
  int budget_ = 0;
  std::size_t internal_horizon_ = 0;

  std::size_t round_ = 0;
  RoundRecord last_;
  std::vector<RoundRecord> transcript_;
  LabeledSequence sequence_;
  Summary summary_;
  double non_query_loss_sum_ = 0.0;
  double start_ms_ = 0.0;
};

// Runs a full game. Without keep_transcript only the summary is filled.
GameResult run_game(const ExperimentConfig& config, std::uint64_t seed, GameOptions options = {});

// Seeds used by replicate r: seed + r.
std::uint64_t replicate_seed(const ExperimentConfig& config, std::size_t replicate);

}  // namespace adept
