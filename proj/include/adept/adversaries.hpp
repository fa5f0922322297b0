#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "adept/concepts.hpp"
#include "adept/oracles.hpp"
#include "adept/rng.hpp"

namespace adept {

// What an adversary learns about a finished round. No learner internals.
struct RoundView {
  std::size_t round = 0;
  Example example;
  Label prediction = Label::Zero;
  std::span<const QueryEvent> events;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  // Chooses (x_t, y_t) before the learner predicts.
  virtual Example next_example(std::size_t round) = 0;
  virtual void on_round_complete(const RoundView&) {}
};

// Draws instances for target-labeled streams: uniform domain points for finite
// classes, or a uniform block in 1..`blocks` with a fresh serial for block classes.
class InstanceSampler {
 public:
  static InstanceSampler finite(std::size_t domain_size);
  static InstanceSampler fresh_blocks(std::size_t blocks);

  Instance draw(Rng& rng);

 private:
  bool structured_ = false;
  std::size_t range_ = 0;
  std::vector<std::uint64_t> next_serial_;
};

// Labels each instance by a fixed target concept, flipping with probability
// `flip`. flip = 0 is the realizable stream.
class TargetAdversary final : public Adversary {
 public:
  TargetAdversary(std::shared_ptr<const ConceptClass> cls, ConceptId target, double flip, InstanceSampler sampler,
                  Rng rng);

  std::string name() const override { return flip_ > 0.0 ? "noisy" : "realizable"; }
  Example next_example(std::size_t round) override;

 private:
  std::shared_ptr<const ConceptClass> cls_;
  ConceptId target_;
  double flip_;
  InstanceSampler sampler_;
  Rng rng_;
};

// Replays a fixed list of examples.
class FixedAdversary final : public Adversary {
 public:
  explicit FixedAdversary(LabeledSequence pairs) : pairs_(std::move(pairs)) {}
  std::string name() const override { return "fixed"; }
  Example next_example(std::size_t round) override;

 private:
  LabeledSequence pairs_;
};

struct PhaseRecord {
  std::size_t index = 0;
  std::uint64_t positives = 0;
  std::uint64_t rounds = 0;
  std::uint64_t positive_block() const { return 2 * index + 1; }
  std::uint64_t negative_block() const { return 2 * index + 2; }
};

// Query-coupled lower-bound environment. Phase i labels fresh points of block
// 2i+1 by 1 and fresh points of block 2i+2 by 0 with a fair coin, and the phase
// ends after any round in which the learner's query reached the oracle.
class PhaseResetAdversary final : public Adversary {
 public:
  explicit PhaseResetAdversary(Rng rng);

  std::string name() const override { return "phase_reset"; }
  Example next_example(std::size_t round) override;
  void on_round_complete(const RoundView& view) override;

  const std::vector<PhaseRecord>& phases() const { return phases_; }
  std::size_t current_phase() const { return phases_.back().index; }

 private:
  Rng rng_;
  std::vector<PhaseRecord> phases_;
  std::unordered_map<std::uint64_t, std::uint64_t> next_serial_;
};

// min_c sum_t 1[c(x_t) != y_t], computed directly on the class (never charged).
std::size_t comparator_loss(std::span<const Example> sequence, const ConceptClass& cls);

// Builds an adversary from its config object. Throws ConfigError.
std::unique_ptr<Adversary> make_adversary(const nlohmann::json& spec, std::shared_ptr<const ConceptClass> cls,
                                          Rng rng);

}  // namespace adept
