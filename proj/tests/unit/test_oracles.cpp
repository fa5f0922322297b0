#include <doctest.h>

#include <memory>
#include <vector>

#include "adept/concepts.hpp"
#include "adept/errors.hpp"
#include "adept/oracles.hpp"

using namespace adept;

namespace {

std::shared_ptr<const ConceptClass> diagonal() {
  return std::make_shared<FiniteConceptClass>(2, std::vector<std::vector<int>>{{0, 0}, {1, 1}});
}

Example ex(std::uint64_t point, int y) { return Example{Instance::point(point), label_from_bit(y)}; }

}  // namespace

TEST_CASE("weak consistency answers") {
  OracleFront oracle(diagonal());
  oracle.begin_round(1);
  CHECK(oracle.weak_consistency(std::vector<Example>{}));
  CHECK_FALSE(oracle.weak_consistency(std::vector<Example>{ex(0, 0), ex(1, 1)}));
  CHECK(oracle.weak_consistency(std::vector<Example>{ex(0, 1), ex(1, 1)}));
  CHECK_FALSE(oracle.weak_consistency(std::vector<Example>{ex(0, 1), ex(0, 0)}));
  CHECK(oracle.stats().total_queries == 4);
  CHECK(oracle.stats().distinct_charged == 4);
  CHECK(oracle.queries_this_round() == 4);

  OracleFront blocks(std::make_shared<BlockUnionClass>(1));
  CHECK(blocks.weak_consistency(std::vector<Example>{{Instance::in_block(1, 0), Label::One}}));
}

TEST_CASE("erm through the front") {
  OracleFront oracle(diagonal());
  const auto r = oracle.erm(std::vector<Example>{ex(0, 0), ex(1, 1)});
  CHECK(r.errors == 1);
  CHECK(r.concept_id.parts == std::vector<std::uint64_t>{0});
  CHECK(oracle.stats().erm_queries == 1);
}

TEST_CASE("dedup charging") {
  OracleFront oracle(diagonal(), {.dedup = true, .budget = std::nullopt});
  const std::vector<Example> s{ex(0, 1), ex(1, 1)};
  oracle.weak_consistency(s);
  oracle.weak_consistency(s);
  CHECK(oracle.stats().total_queries == 2);
  CHECK(oracle.stats().distinct_charged == 1);
  oracle.weak_consistency(std::vector<Example>{ex(0, 1), ex(1, 0)});
  CHECK(oracle.stats().distinct_charged == 2);
  oracle.weak_consistency(std::vector<Example>{ex(1, 1), ex(0, 1)});
  CHECK(oracle.stats().distinct_charged == 2);
  // An ERM call on the same multiset is a different query.
  oracle.erm(s);
  CHECK(oracle.stats().distinct_charged == 3);
}

TEST_CASE("canonicalize sorts pairs") {
  const std::vector<Example> s{ex(1, 1), ex(0, 0), ex(1, 0)};
  const auto c = canonicalize(s);
  CHECK(c == LabeledSequence{ex(0, 0), ex(1, 0), ex(1, 1)});
}

TEST_CASE("budget throttling") {
  OracleFront oracle(diagonal(), {.dedup = false, .budget = 1});
  std::vector<QueryEvent> seen;
  oracle.subscribe([&](const QueryEvent& e) { seen.push_back(e); });
  oracle.begin_round(1);
  const std::vector<Example> bad{ex(0, 0), ex(1, 1)};
  CHECK_FALSE(oracle.exhausted());
  CHECK_FALSE(oracle.weak_consistency(bad));
  CHECK(oracle.exhausted());
  CHECK(oracle.events_this_round().size() == 1);
  oracle.begin_round(2);
  // Over budget: the fixed default answer, counted but not forwarded.
  CHECK(oracle.weak_consistency(bad));
  CHECK(oracle.events_this_round().empty());
  oracle.charge_exhausted(4, QuerySource::Reduction);
  CHECK(oracle.stats().total_queries == 6);
  CHECK(oracle.stats().throttled_queries == 5);
  CHECK(oracle.queries_this_round() == 5);
  CHECK(oracle.reduction_queries_this_round() == 5);
  CHECK(seen.size() == 1);
  CHECK(seen[0].round == 1);
}

TEST_CASE("bulk charge requires a spent budget") {
  OracleFront oracle(diagonal());
  CHECK_THROWS_AS(oracle.charge_exhausted(1, QuerySource::Reduction), InvariantViolation);
}

TEST_CASE("query sources are tallied separately") {
  OracleFront oracle(diagonal());
  oracle.begin_round(1);
  oracle.weak_consistency(std::vector<Example>{}, QuerySource::BaseLearner);
  oracle.weak_consistency(std::vector<Example>{}, QuerySource::Reduction);
  oracle.weak_consistency(std::vector<Example>{}, QuerySource::Reduction);
  CHECK(oracle.stats().base_learner_queries == 1);
  CHECK(oracle.reduction_queries_this_round() == 2);
  oracle.begin_round(2);
  CHECK(oracle.reduction_queries_this_round() == 0);
  CHECK(oracle.stats().per_round_queries.at(1) == 3);
}
