#include "adept/adversaries.hpp"

#include <algorithm>

#include "adept/errors.hpp"

namespace adept {

InstanceSampler InstanceSampler::finite(std::size_t domain_size) {
  if (domain_size == 0) throw std::invalid_argument("finite sampler needs a nonempty domain");
  InstanceSampler s;
  s.range_ = domain_size;
  return s;
}

InstanceSampler InstanceSampler::fresh_blocks(std::size_t blocks) {
  if (blocks == 0) throw std::invalid_argument("block sampler needs at least one block");
  InstanceSampler s;
  s.structured_ = true;
  s.range_ = blocks;
  s.next_serial_.assign(blocks, 0);
  return s;
}

Instance InstanceSampler::draw(Rng& rng) {
  const auto pick = rng.below(range_);
  if (!structured_) return Instance::point(pick);
  return Instance::in_block(pick + 1, next_serial_[pick]++);
}

TargetAdversary::TargetAdversary(std::shared_ptr<const ConceptClass> cls, ConceptId target, double flip,
                                 InstanceSampler sampler, Rng rng)
    : cls_(std::move(cls)), target_(std::move(target)), flip_(flip), sampler_(std::move(sampler)), rng_(rng) {
  if (!(flip_ >= 0.0 && flip_ <= 1.0)) throw std::invalid_argument("flip probability must lie in [0, 1]");
}

Example TargetAdversary::next_example(std::size_t) {
  const Instance x = sampler_.draw(rng_);
  Label y = cls_->evaluate(target_, x);
  // The noise coin is drawn even at flip 0 so both streams consume identical draws.
  if (rng_.bernoulli(flip_)) y = adept::flip(y);
  return Example{x, y};
}

Example FixedAdversary::next_example(std::size_t round) {
  if (round == 0 || round > pairs_.size()) {
    throw InvariantViolation("fixed adversary has no example for round " + std::to_string(round));
  }
  return pairs_[round - 1];
}

PhaseResetAdversary::PhaseResetAdversary(Rng rng) : rng_(rng) { phases_.push_back(PhaseRecord{}); }

Example PhaseResetAdversary::next_example(std::size_t) {
  auto& phase = phases_.back();
  const bool positive = rng_.bernoulli(0.5);
  const std::uint64_t block = positive ? phase.positive_block() : phase.negative_block();
  const Instance x = Instance::in_block(block, next_serial_[block]++);
  ++phase.rounds;
  if (positive) ++phase.positives;
  return Example{x, positive ? Label::One : Label::Zero};
}

void PhaseResetAdversary::on_round_complete(const RoundView& view) {
  if (view.events.empty()) return;
  phases_.push_back(PhaseRecord{phases_.back().index + 1, 0, 0});
}

std::size_t comparator_loss(std::span<const Example> sequence, const ConceptClass& cls) {
  return cls.erm(sequence).errors;
}

// Config -----------------------------------------------------------------------

namespace {

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError("adversary." + key + ": unknown field");
    }
  }
}

ConceptId parse_concept(const nlohmann::json& spec, const ConceptClass& cls) {
  if (!spec.contains("concept")) throw ConfigError("adversary.concept: missing");
  const auto& c = spec.at("concept");
  ConceptId id;
  if (c.is_number_integer() && c.get<long long>() >= 0) {
    id.parts.push_back(c.get<std::uint64_t>());
  } else if (c.is_array()) {
    for (const auto& part : c) {
      if (!part.is_number_integer() || part.get<long long>() < 0) {
        throw ConfigError("adversary.concept: entries must be nonnegative integers");
      }
      id.parts.push_back(part.get<std::uint64_t>());
    }
    std::sort(id.parts.begin(), id.parts.end());
  } else {
    throw ConfigError("adversary.concept: expected an integer or an array of block ids");
  }
  try {
    const Instance probe = dynamic_cast<const BlockUnionClass*>(&cls) ? Instance::in_block(0, 0) : Instance::point(0);
    (void)cls.evaluate(id, probe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("adversary.concept: ") + e.what());
  }
  return id;
}

InstanceSampler parse_sampler(const nlohmann::json& spec, const ConceptClass& cls) {
  if (const auto* finite = dynamic_cast<const FiniteConceptClass*>(&cls)) {
    if (spec.contains("blocks")) throw ConfigError("adversary.blocks: only valid for block classes");
    if (finite->domain_size() == 0) throw ConfigError("adversary: finite class has an empty domain");
    return InstanceSampler::finite(finite->domain_size());
  }
  std::size_t blocks = 4;
  if (spec.contains("blocks")) {
    const auto& b = spec.at("blocks");
    if (!b.is_number_integer() || b.get<long long>() <= 0) throw ConfigError("adversary.blocks: expected a positive integer");
    blocks = b.get<std::size_t>();
  }
  return InstanceSampler::fresh_blocks(blocks);
}

Instance parse_pair_instance(const nlohmann::json& x, std::size_t i) {
  const std::string where = "adversary.pairs[" + std::to_string(i) + "]";
  if (x.is_number_integer() && x.get<long long>() >= 0) return Instance::point(x.get<std::uint64_t>());
  if (x.is_array() && x.size() == 2 && x[0].is_number_integer() && x[1].is_number_integer()) {
    return Instance::in_block(x[0].get<std::uint64_t>(), x[1].get<std::uint64_t>());
  }
  if (x.is_string()) {
    try {
      return parse_instance(x.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  throw ConfigError(where + ": instance must be an index, [block, serial] or \"block:serial\"");
}

}  // namespace

std::unique_ptr<Adversary> make_adversary(const nlohmann::json& spec, std::shared_ptr<const ConceptClass> cls,
                                          Rng rng) {
  if (!spec.is_object()) throw ConfigError("adversary: expected an object");
  if (!spec.contains("type") || !spec.at("type").is_string()) throw ConfigError("adversary.type: missing or not a string");
  const auto type = spec.at("type").get<std::string>();
  if (type == "realizable") {
    reject_unknown(spec, {"type", "concept", "blocks"});
    auto target = parse_concept(spec, *cls);
    auto sampler = parse_sampler(spec, *cls);
    return std::make_unique<TargetAdversary>(cls, std::move(target), 0.0, std::move(sampler), rng);
  }
  if (type == "noisy") {
    reject_unknown(spec, {"type", "concept", "flip", "blocks"});
    auto target = parse_concept(spec, *cls);
    if (!spec.contains("flip") || !spec.at("flip").is_number()) throw ConfigError("adversary.flip: missing or not a number");
    const double p = spec.at("flip").get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("adversary.flip: must lie in [0, 1]");
    auto sampler = parse_sampler(spec, *cls);
    return std::make_unique<TargetAdversary>(cls, std::move(target), p, std::move(sampler), rng);
  }
  if (type == "phase_reset") {
    reject_unknown(spec, {"type", "d"});
    const auto* blocks = dynamic_cast<const BlockUnionClass*>(cls.get());
    if (blocks == nullptr) throw ConfigError("adversary.type: phase_reset requires a block_union class");
    if (spec.contains("d")) {
      const auto& d = spec.at("d");
      if (!d.is_number_integer() || d.get<long long>() != static_cast<long long>(blocks->max_blocks())) {
        throw ConfigError("adversary.d: must equal class.d");
      }
    }
    return std::make_unique<PhaseResetAdversary>(rng);
  }
  if (type == "fixed") {
    reject_unknown(spec, {"type", "pairs"});
    if (!spec.contains("pairs") || !spec.at("pairs").is_array()) throw ConfigError("adversary.pairs: missing or not an array");
    LabeledSequence pairs;
    const auto& raw = spec.at("pairs");
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto& p = raw[i];
      const std::string where = "adversary.pairs[" + std::to_string(i) + "]";
      if (!p.is_array() || p.size() != 2) throw ConfigError(where + ": expected [instance, label]");
      if (!p[1].is_number_integer() || (p[1].get<int>() != 0 && p[1].get<int>() != 1)) {
        throw ConfigError(where + ": label must be 0 or 1");
      }
      const Instance x = parse_pair_instance(p[0], i);
      try {
        (void)cls->weak_consistent(std::span<const Example>(std::vector<Example>{Example{x, Label::Zero}}));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
      }
      pairs.push_back(Example{x, label_from_bit(p[1].get<int>())});
    }
    return std::make_unique<FixedAdversary>(std::move(pairs));
  }
  throw ConfigError("adversary.type: unknown adversary '" + type + "'");
}

}  // namespace adept
