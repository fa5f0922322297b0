#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "adept/base_learners.hpp"
#include "adept/subsampling.hpp"

using namespace adept;

TEST_CASE("draw_sample edge cases") {
  Rng rng(1);
  const auto all = draw_sample(7, 7, rng);
  std::vector<std::size_t> expect(7);
  std::iota(expect.begin(), expect.end(), 1);
  CHECK(all.rounds() == expect);
  const auto one = draw_sample(9, 1, rng);
  CHECK(one.size() == 1);
  CHECK(one.rounds()[0] >= 1);
  CHECK(one.rounds()[0] <= 9);
  CHECK_THROWS_AS(draw_sample(5, 6, rng), std::invalid_argument);
  CHECK_THROWS_AS(draw_sample(5, 0, rng), std::invalid_argument);
}

TEST_CASE("draw_sample is uniform over indices") {
  Rng rng(2024);
  const int draws = 100000;
  std::vector<int> hits(11, 0);
  for (int i = 0; i < draws; ++i) {
    const auto s = draw_sample(10, 3, rng);
    REQUIRE(s.size() == 3);
    for (auto r : s.rounds()) ++hits[r];
  }
  const double se = std::sqrt(0.3 * 0.7 / draws);
  for (std::size_t r = 1; r <= 10; ++r) CHECK(std::abs(hits[r] / double(draws) - 0.3) <= 3 * se);
}

TEST_CASE("draw_sample is reproducible") {
  Rng a(77);
  Rng b(77);
  CHECK(draw_sample(100, 10, a).rounds() == draw_sample(100, 10, b).rounds());
}

TEST_CASE("subsample_size") {
  CHECK(subsample_size(4096, 0.5) == 64);
  CHECK(subsample_size(1000, 1.0 / 3.0) == 10);
  CHECK(subsample_size(256, 1.0) == 256);
  CHECK(subsample_size(1, 0.1) == 1);
  CHECK(subsample_size(0, 0.5) == 0);
}

TEST_CASE("sampled set validation") {
  CHECK_THROWS_AS(SampledSet(5, {0}), std::invalid_argument);
  CHECK_THROWS_AS(SampledSet(5, {6}), std::invalid_argument);
  CHECK_THROWS_AS(SampledSet(5, {2, 2}), std::invalid_argument);
  const SampledSet s(5, {4, 2});
  CHECK(s.rounds() == std::vector<std::size_t>{2, 4});
  CHECK(s.contains(4));
  CHECK_FALSE(s.contains(3));
}

TEST_CASE("guard counts reads before the prediction") {
  SampleGuard guard(SampledSet(5, {2}));
  guard.begin_round(2);
  CHECK(guard.contains(2));
  CHECK(guard.early_reads() == 1);
  guard.prediction_emitted();
  CHECK(guard.contains(2));
  CHECK_FALSE(guard.contains(1));
  CHECK_FALSE(guard.contains(3));
  CHECK(guard.early_reads() == 2);
  CHECK(guard.reads() == 4);
}

TEST_CASE("lazy wrapper commits only sampled rounds") {
  auto cls = std::make_shared<FiniteConceptClass>(FiniteConceptClass::powerset(3));
  auto learner = std::make_shared<SoaLearner>(cls);
  OracleFront oracle(cls);
  const std::size_t horizon = 30;
  const SampledSet sample(horizon, {3, 4, 9, 17, 25, 30});
  LazyAdept lazy(learner, oracle, HedgeParams::fixed(sample.size(), 3), sample);
  std::mt19937_64 gen(4);
  for (std::size_t t = 1; t <= horizon; ++t) {
    oracle.begin_round(t);
    const auto before = lazy.inner().active_prefixes();
    const auto committed = lazy.committed();
    lazy.predict(Instance::point(gen() % 3));
    CHECK(oracle.reduction_queries_this_round() == 2 * before.size());
    lazy.observe(label_from_bit(static_cast<int>(gen() & 1u)));
    if (sample.contains(t)) {
      CHECK(lazy.committed() == committed + 1);
    } else {
      CHECK(lazy.committed() == committed);
      CHECK(lazy.inner().active_prefixes() == before);
    }
  }
  CHECK(lazy.committed() == sample.size());
  CHECK(lazy.guard().early_reads() == 0);
}

TEST_CASE("lazy wrapper with K = T matches plain ADEPT") {
  auto cls = std::make_shared<FiniteConceptClass>(FiniteConceptClass::singletons(4));
  auto learner = std::make_shared<SoaLearner>(cls);
  OracleFront o1(cls);
  OracleFront o2(cls);
  const std::size_t horizon = 25;
  std::vector<std::size_t> every(horizon);
  std::iota(every.begin(), every.end(), 1);
  LazyAdept lazy(learner, o1, HedgeParams::fixed(horizon, 1), SampledSet(horizon, every));
  Adept plain(learner, o2, HedgeParams::fixed(horizon, 1));
  std::mt19937_64 gen(6);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto x = Instance::point(gen() % 4);
    CHECK(lazy.predict(x).p1 == plain.predict(x).p1);
    const Label y = label_from_bit(static_cast<int>(gen() & 1u));
    lazy.observe(y);
    plain.observe(y);
  }
  CHECK(o1.stats().total_queries == o2.stats().total_queries);
}
