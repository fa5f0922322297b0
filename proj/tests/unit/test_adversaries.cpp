#include <doctest.h>

#include <memory>
#include <set>
#include <vector>

#include "adept/adversaries.hpp"
#include "adept/errors.hpp"

using namespace adept;

namespace {

RoundView view(std::size_t round, const Example& e, const std::vector<QueryEvent>& events) {
  return RoundView{round, e, Label::Zero, events};
}

}  // namespace

TEST_CASE("phase reset advances only after forwarded queries") {
  PhaseResetAdversary adv(Rng(4));
  const std::vector<QueryEvent> none;
  const std::vector<QueryEvent> three(3, QueryEvent{1, OracleKind::WeakConsistency});
  auto e = adv.next_example(1);
  adv.on_round_complete(view(1, e, none));
  CHECK(adv.current_phase() == 0);
  e = adv.next_example(2);
  adv.on_round_complete(view(2, e, three));
  CHECK(adv.current_phase() == 1);
  CHECK(adv.phases().size() == 2);
  CHECK(adv.phases()[0].rounds == 2);
}

TEST_CASE("phase reset uses fresh points of the phase's two blocks") {
  PhaseResetAdversary adv(Rng(7));
  std::set<Instance> seen;
  const std::vector<QueryEvent> none;
  const std::vector<QueryEvent> one{QueryEvent{0, OracleKind::WeakConsistency}};
  std::size_t query_rounds = 0;
  for (std::size_t t = 1; t <= 400; ++t) {
    const auto phase = adv.phases().back();
    const auto e = adv.next_example(t);
    CHECK(e.x.structured);
    CHECK(seen.insert(e.x).second);
    if (e.y == Label::One) {
      CHECK(e.x.block() == phase.positive_block());
    } else {
      CHECK(e.x.block() == phase.negative_block());
    }
    const bool queried = t % 37 == 0;
    query_rounds += queried;
    adv.on_round_complete(view(t, e, queried ? one : none));
  }
  CHECK(adv.phases().size() <= query_rounds + 1);
  std::uint64_t positives = 0;
  for (const auto& p : adv.phases()) positives += p.positives;
  CHECK(positives > 150);
  CHECK(positives < 250);
}

TEST_CASE("comparator loss") {
  auto cls = std::make_shared<FiniteConceptClass>(FiniteConceptClass::powerset(2));
  TargetAdversary realizable(cls, ConceptId{{2}}, 0.0, InstanceSampler::finite(2), Rng(1));
  LabeledSequence seq;
  for (std::size_t t = 1; t <= 50; ++t) {
    seq.push_back(realizable.next_example(t));
    CHECK(seq.back().y == cls->evaluate(ConceptId{{2}}, seq.back().x));
  }
  CHECK(comparator_loss(seq, *cls) == 0);
  seq.push_back(Example{Instance::point(0), flip(cls->evaluate(ConceptId{{2}}, Instance::point(0)))});
  CHECK(comparator_loss(seq, *cls) == 1);
}

TEST_CASE("noisy adversary flips at the configured rate") {
  auto cls = std::make_shared<FiniteConceptClass>(FiniteConceptClass::powerset(2));
  TargetAdversary noisy(cls, ConceptId{{1}}, 0.3, InstanceSampler::finite(2), Rng(11));
  int flips = 0;
  const int n = 20000;
  for (int t = 1; t <= n; ++t) {
    const auto e = noisy.next_example(t);
    flips += e.y != cls->evaluate(ConceptId{{1}}, e.x);
  }
  CHECK(std::abs(flips / double(n) - 0.3) < 0.015);
  CHECK(noisy.name() == "noisy");
}

TEST_CASE("fresh block sampler never repeats a point") {
  auto sampler = InstanceSampler::fresh_blocks(3);
  Rng rng(2);
  std::set<Instance> seen;
  for (int i = 0; i < 300; ++i) {
    const auto x = sampler.draw(rng);
    CHECK(x.block() >= 1);
    CHECK(x.block() <= 3);
    CHECK(seen.insert(x).second);
  }
}

TEST_CASE("fixed adversary") {
  FixedAdversary fixed({{Instance::point(1), Label::One}});
  CHECK(fixed.next_example(1).y == Label::One);
  CHECK_THROWS_AS(fixed.next_example(2), InvariantViolation);
}

TEST_CASE("adversary specs") {
  using nlohmann::json;
  auto finite = std::make_shared<FiniteConceptClass>(FiniteConceptClass::powerset(2));
  auto blocks = std::make_shared<BlockUnionClass>(1);
  const auto make = [](const char* text, std::shared_ptr<const ConceptClass> cls) {
    return make_adversary(json::parse(text), std::move(cls), Rng(1));
  };
  CHECK(make(R"({"type":"realizable","concept":3})", finite)->name() == "realizable");
  CHECK(make(R"({"type":"noisy","concept":1,"flip":0.2})", finite)->name() == "noisy");
  CHECK(make(R"({"type":"realizable","concept":[2],"blocks":3})", blocks)->name() == "realizable");
  CHECK(make(R"({"type":"phase_reset","d":1})", blocks)->name() == "phase_reset");
  CHECK(make(R"({"type":"fixed","pairs":[[[1,0],1],["2:3",0]]})", blocks)->name() == "fixed");
  CHECK_THROWS_AS(make(R"({"type":"realizable","concept":9})", finite), ConfigError);
  CHECK_THROWS_AS(make(R"({"type":"noisy","concept":1,"flip":1.5})", finite), ConfigError);
  CHECK_THROWS_AS(make(R"({"type":"phase_reset","d":2})", blocks), ConfigError);
  CHECK_THROWS_AS(make(R"({"type":"phase_reset","d":1})", finite), ConfigError);
  CHECK_THROWS_AS(make(R"({"type":"realizable","concept":1,"x":1})", finite), ConfigError);
  CHECK_THROWS_AS(make(R"({"type":"sneaky"})", finite), ConfigError);
}
