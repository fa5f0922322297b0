#include "adept/game.hpp"

#include <chrono>

#include "adept/errors.hpp"

namespace adept {
namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

double expected_loss(double p1, Label y) { return y == Label::One ? 1.0 - p1 : p1; }

HedgeParams hedge_params(const LearnerSpec& spec, std::size_t horizon, int budget) {
  if (spec.eta_mode == EtaMode::Adaptive) return HedgeParams::adaptive(horizon, budget);
  if (spec.eta_value) return HedgeParams::fixed_with_eta(horizon, budget, *spec.eta_value);
  return HedgeParams::fixed(horizon, budget);
}

}  // namespace

std::uint64_t replicate_seed(const ExperimentConfig& config, std::size_t replicate) {
  return config.seed + replicate;
}

Game::Game(const ExperimentConfig& config, std::uint64_t seed, GameOptions options)
    : config_(config),
      seed_(seed),
      options_(options),
      learner_rng_(Rng::stream(seed, kLearnerStream)) {
  start_ms_ = now_ms();
  cls_ = make_concept_class(config_.class_spec, nullptr);
  const auto& spec = config_.learner;
  const SinkPolicy policy = spec.reduction == Reduction::Bdpss ? SinkPolicy::PredictZero : SinkPolicy::Reject;
  base_ = make_base_learner(spec.base, cls_, policy);
  budget_ = spec.m_override ? *spec.m_override : base_->mistake_bound();

  OracleFront::Options oracle_options;
  oracle_options.dedup = config_.charging == Charging::Dedup;
  oracle_options.budget = spec.query_budget;
  oracle_ = std::make_unique<OracleFront>(cls_, oracle_options);

  adversary_ = make_adversary(config_.adversary_spec, cls_, Rng::stream(seed, kAdversaryStream));

  switch (spec.reduction) {
    case Reduction::Adept: {
      internal_horizon_ = config_.horizon;
      Adept::Options o{config_.numeric, options_.record_potentials};
      auto learner = std::make_unique<Adept>(base_, *oracle_, hedge_params(spec, config_.horizon, budget_), o);
      adept_ = learner.get();
      learner_ = std::move(learner);
      break;
    }
    case Reduction::LazyAdept: {
      internal_horizon_ = spec.k ? *spec.k : subsample_size(config_.horizon, *spec.c);
      if (internal_horizon_ > config_.horizon) {
        throw ConfigError("learner.K: must not exceed T (" + std::to_string(config_.horizon) + ")");
      }
      SampledSet sample;
      if (config_.horizon > 0) {
        Rng sampler = Rng::stream(seed, kSamplerStream);
        sample = draw_sample(config_.horizon, internal_horizon_, sampler);
      }
      Adept::Options o{config_.numeric, options_.record_potentials};
      auto learner = std::make_unique<LazyAdept>(base_, *oracle_, hedge_params(spec, internal_horizon_, budget_),
                                                 std::move(sample), o);
      lazy_ = learner.get();
      learner_ = std::move(learner);
      break;
    }
    case Reduction::Bdpss: {
      internal_horizon_ = config_.horizon;
      Bdpss::Options o{config_.numeric, spec.prune_experts};
      auto learner = std::make_unique<Bdpss>(base_, *oracle_, hedge_params(spec, config_.horizon, budget_), o);
      bdpss_ = learner.get();
      learner_ = std::move(learner);
      break;
    }
  }

  summary_.horizon = config_.horizon;
  summary_.seed = seed;
  summary_.learner = spec.label();
  summary_.adversary = adversary_->name();
  summary_.budget = budget_;
  summary_.internal_horizon = internal_horizon_;
  summary_.expert_count = schedule_count(config_.horizon, budget_).get_str();
  if (options_.keep_transcript) transcript_.reserve(config_.horizon);
  sequence_.reserve(config_.horizon);
}

const RoundRecord& Game::step() {
  if (done()) throw InvariantViolation("game: step past the horizon");
  const std::size_t t = ++round_;
  oracle_->begin_round(t);

  const Example example = adversary_->next_example(t);
  const PredictionDistribution dist = learner_->predict(example.x);
  if (!(dist.p1 >= 0.0 && dist.p1 <= 1.0)) {
    throw InvariantViolation("game: prediction probability " + std::to_string(dist.p1) + " outside [0, 1] at round " +
                             std::to_string(t));
  }
  const Label prediction = learner_rng_.bernoulli(dist.p1) ? Label::One : Label::Zero;
  learner_->observe(example.y);
  sequence_.push_back(example);

  const auto& stats = oracle_->stats();
  RoundRecord& rec = last_;
  rec.round = t;
  rec.x = example.x;
  rec.p1 = dist.p1;
  rec.prediction = prediction;
  rec.label = example.y;
  rec.active = learner_->active_count();
  rec.queries = oracle_->queries_this_round();
  rec.cum_raw_queries = stats.total_queries;
  rec.cum_charged_queries = stats.distinct_charged;
  rec.expected_loss = expected_loss(dist.p1, example.y);
  rec.realized_loss = prediction != example.y ? 1 : 0;
  if (options_.keep_transcript) transcript_.push_back(rec);

  summary_.learner_loss += static_cast<std::uint64_t>(rec.realized_loss);
  summary_.expected_loss += rec.expected_loss;
  summary_.max_active = std::max(summary_.max_active, rec.active);
  const auto& events = oracle_->events_this_round();
  if (events.empty()) {
    ++summary_.non_query_rounds;
    non_query_loss_sum_ += rec.expected_loss;
  } else {
    ++summary_.query_rounds;
  }

  adversary_->on_round_complete(RoundView{t, example, prediction, events});
  return rec;
}

GameResult Game::finish() {
  while (!done()) step();
  const auto& stats = oracle_->stats();
  summary_.comparator_loss = comparator_loss(sequence_, *cls_);
  summary_.realized_regret =
      static_cast<double>(summary_.learner_loss) - static_cast<double>(summary_.comparator_loss);
  summary_.expected_regret = summary_.expected_loss - static_cast<double>(summary_.comparator_loss);
  summary_.raw_queries = stats.total_queries;
  summary_.charged_queries = stats.distinct_charged;
  summary_.base_learner_queries = stats.base_learner_queries;
  summary_.reduction_queries = stats.total_queries - stats.base_learner_queries;
  summary_.throttled_queries = stats.throttled_queries;
  summary_.non_query_expected_loss =
      summary_.non_query_rounds > 0 ? non_query_loss_sum_ / static_cast<double>(summary_.non_query_rounds) : 0.0;
  if (lazy_) summary_.early_reads = lazy_->guard().early_reads();
  summary_.wall_ms = now_ms() - start_ms_;
  return GameResult{summary_, transcript_, sequence_};
}

GameResult run_game(const ExperimentConfig& config, std::uint64_t seed, GameOptions options) {
  Game game(config, seed, options);
  return game.finish();
}

}  // namespace adept
