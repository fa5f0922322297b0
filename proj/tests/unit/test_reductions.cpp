#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "adept/base_learners.hpp"
#include "adept/combinatorics.hpp"
#include "adept/errors.hpp"
#include "adept/oracles.hpp"
#include "adept/reductions.hpp"

using namespace adept;

namespace {

using Rows = std::vector<std::vector<int>>;

struct Setup {
  std::shared_ptr<FiniteConceptClass> cls;
  std::shared_ptr<BaseLearner> learner;
  OracleFront oracle;

  explicit Setup(FiniteConceptClass c, SinkPolicy policy = SinkPolicy::Reject)
      : cls(std::make_shared<FiniteConceptClass>(std::move(c))),
        learner(std::make_shared<SoaLearner>(cls, policy)),
        oracle(cls) {}
};

Adept::Options exact_options(bool potentials = false) {
  Adept::Options o;
  o.numeric = NumericMode::Exact;
  o.record_potentials = potentials;
  return o;
}

}  // namespace

TEST_CASE("learning rates") {
  CHECK(default_eta(100, 2) == doctest::Approx(std::sqrt(16.0 * std::log(std::exp(1.0) * 50.0) / 100.0)));
  // M = 0 is guarded as M' = 1.
  CHECK(default_eta(100, 0) == default_eta(100, 1));
  CHECK(default_eta(0, 2) == 0.0);
  CHECK(adaptive_eta(0.0, 0.04) == doctest::Approx(0.2));
  CHECK(adaptive_eta(0.0, 100.0) == 0.5);
  CHECK(adaptive_eta(1e9, 4.0) == doctest::Approx(std::sqrt(4.0 / (1e9 + 1.0))));
  const auto p = HedgeParams::adaptive(10, 2);
  CHECK(p.log_schedules == doctest::Approx(std::log(56.0)));
  CHECK(p.eta_for(3.0) == doctest::Approx(adaptive_eta(3.0, std::log(56.0))));
}

TEST_CASE("single concept with M = 0 predicts the concept") {
  Setup s(FiniteConceptClass(3, {{1, 0, 1}}));
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(3, 0), exact_options());
  for (std::uint64_t p : {0u, 1u, 2u}) {
    const auto d = adept.predict(Instance::point(p));
    CHECK(d.p1 == static_cast<double>(s.cls->value(0, p) == Label::One));
    CHECK(adept.active_count() == 1);
    adept.observe(Label::Zero);
  }
}

TEST_CASE("oracle prunes the unrealizable extension") {
  Setup s(FiniteConceptClass(2, {{0, 0}, {1, 1}}));
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(2, 1), exact_options());
  adept.predict(Instance::point(0));
  adept.observe(Label::Zero);
  CHECK(adept.active().size() == 2);
  adept.predict(Instance::point(1));
  std::set<Dichotomy> prefixes;
  for (const auto& u : adept.tentative()) prefixes.insert(adept.labels(u));
  CHECK(prefixes == std::set<Dichotomy>{{Label::Zero, Label::Zero}, {Label::One, Label::One}});
  CHECK(adept.last_extension_queries() == 4);
}

TEST_CASE("observe charges disagreeing nodes") {
  Setup s(FiniteConceptClass::powerset(1));
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(1, 1));
  adept.predict(Instance::point(0));
  adept.observe(Label::One);
  for (const auto& u : adept.active()) CHECK(u.loss == (u.last == Label::One ? 0u : 1u));
}

TEST_CASE("first-round distribution on the powerset") {
  // T = 2, M = 2: both children survive. Child 0 agrees with SOA (k = 0) and
  // child 1 does not (k = 1); either way W_1 = C(1,0) + C(1,1) = 2.
  Setup s(FiniteConceptClass::powerset(2));
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(2, 2), exact_options());
  const auto d = adept.predict(Instance::point(0));
  REQUIRE(d.exact);
  CHECK(*d.exact == mpq_class(1, 2));
}

TEST_CASE("reference ensemble sizes and M = 0") {
  Setup s(FiniteConceptClass::powerset(2), SinkPolicy::PredictZero);
  Bdpss full(s.learner, s.oracle, HedgeParams::fixed(2, 2), {NumericMode::Exact, true});
  CHECK(full.expert_count() == 4);
  const auto d = full.predict(Instance::point(1));
  // Uniform initial weights; two of the four schedules flip round 1.
  CHECK(d.p1 == 0.5);

  Setup single(FiniteConceptClass::powerset(2), SinkPolicy::PredictZero);
  Bdpss zero(single.learner, single.oracle, HedgeParams::fixed(3, 0), {NumericMode::Exact, true});
  CHECK(zero.expert_count() == 1);
  for (std::uint64_t p : {0u, 1u, 0u}) {
    const double p1 = zero.predict(Instance::point(p)).p1;
    CHECK((p1 == 0.0 || p1 == 1.0));
    zero.observe(Label::One);
  }
  CHECK_THROWS_AS(Bdpss(s.learner, s.oracle, HedgeParams::fixed(13, 1), {}), CapabilityError);
}

TEST_CASE("exact agreement with the reference on random streams") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t domain = 3;
    Rows rows;
    for (int c = 0; c < 4; ++c) rows.push_back({int(gen() & 1u), int(gen() & 1u), int(gen() & 1u)});
    const FiniteConceptClass cls(domain, rows);
    const std::size_t horizon = 6;
    const int budget = 1 + trial % 2;
    Setup a(cls);
    Setup b(cls, SinkPolicy::PredictZero);
    Adept adept(a.learner, a.oracle, HedgeParams::fixed(horizon, budget), exact_options());
    Bdpss ref(b.learner, b.oracle, HedgeParams::fixed(horizon, budget), {NumericMode::Exact, true});
    for (std::size_t t = 0; t < horizon; ++t) {
      const auto x = Instance::point(gen() % domain);
      const auto pa = adept.predict(x);
      const auto pb = ref.predict(x);
      REQUIRE(pa.exact);
      REQUIRE(pb.exact);
      CHECK(*pa.exact == *pb.exact);
      const Label y = label_from_bit(static_cast<int>(gen() & 1u));
      adept.observe(y);
      ref.observe(y);
    }
  }
}

TEST_CASE("log and exact modes agree") {
  std::mt19937_64 gen(5);
  const auto cls = FiniteConceptClass::powerset(3);
  Setup a(cls);
  Setup b(cls);
  Adept exact(a.learner, a.oracle, HedgeParams::fixed(40, 3), exact_options());
  Adept logged(b.learner, b.oracle, HedgeParams::fixed(40, 3));
  for (int t = 0; t < 40; ++t) {
    const auto x = Instance::point(gen() % 3);
    const double pe = exact.predict(x).p1;
    const double pl = logged.predict(x).p1;
    CHECK(std::abs(pe - pl) <= 1e-9);
    const Label y = label_from_bit(static_cast<int>(gen() % 10 < 3));
    exact.observe(y);
    logged.observe(y);
  }
}

TEST_CASE("adaptive rate keeps the two modes aligned") {
  std::mt19937_64 gen(8);
  const auto cls = FiniteConceptClass::singletons(4);
  Setup a(cls);
  Setup b(cls);
  Adept exact(a.learner, a.oracle, HedgeParams::adaptive(30, 1), exact_options());
  Adept logged(b.learner, b.oracle, HedgeParams::adaptive(30, 1));
  for (int t = 0; t < 30; ++t) {
    const auto x = Instance::point(gen() % 4);
    CHECK(std::abs(exact.predict(x).p1 - logged.predict(x).p1) <= 1e-9);
    CHECK(exact.current_eta() == logged.current_eta());
    const Label y = label_from_bit(static_cast<int>(gen() & 1u));
    exact.observe(y);
    logged.observe(y);
  }
}

TEST_CASE("potentials") {
  std::mt19937_64 gen(13);
  Setup s(FiniteConceptClass::powerset(2));
  const std::size_t horizon = 12;
  const int budget = 2;
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(horizon, budget), exact_options(true));
  for (std::size_t t = 0; t < horizon; ++t) {
    adept.predict(Instance::point(gen() % 2));
    adept.observe(label_from_bit(static_cast<int>(gen() & 1u)));
  }
  const auto& pots = adept.potentials();
  REQUIRE(pots.size() == horizon);
  REQUIRE(pots[0].z_prev);
  CHECK(*pots[0].z_prev == mpq_class(schedule_count(horizon, budget)));
  CHECK(pots[0].log_z_prev == doctest::Approx(std::log(mpz_class(schedule_count(horizon, budget)).get_d())));
  for (const auto& r : pots) {
    CHECK(*r.z_mid <= *r.z_prev);
    const double bound = std::exp(-r.eta * r.expected_loss + r.eta * r.eta / 8.0);
    CHECK(r.z_post->get_d() <= r.z_mid->get_d() * bound * (1.0 + 1e-9));
    CHECK(std::abs(r.log_z_mid - std::log(r.z_mid->get_d())) < 1e-9);
  }
}

TEST_CASE("extension queries are twice the parent count") {
  std::mt19937_64 gen(2);
  Setup s(FiniteConceptClass::powerset(3));
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(20, 3));
  for (int t = 1; t <= 20; ++t) {
    s.oracle.begin_round(t);
    const std::size_t parents = adept.active().size();
    adept.predict(Instance::point(gen() % 3));
    CHECK(s.oracle.reduction_queries_this_round() == 2 * parents);
    adept.observe(label_from_bit(static_cast<int>(gen() & 1u)));
  }
}

TEST_CASE("discard restores the committed state") {
  Setup s(FiniteConceptClass::powerset(2));
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(4, 2));
  adept.predict(Instance::point(0));
  adept.observe(Label::One);
  const auto before = adept.active_prefixes();
  const auto tree = adept.tree().size();
  adept.predict(Instance::point(1));
  adept.discard();
  CHECK(adept.active_prefixes() == before);
  CHECK(adept.tree().size() == tree);
  CHECK(adept.round() == 1);
}

TEST_CASE("protocol misuse") {
  Setup s(FiniteConceptClass::powerset(1));
  Adept adept(s.learner, s.oracle, HedgeParams::fixed(1, 1));
  CHECK_THROWS_AS(adept.observe(Label::Zero), InvariantViolation);
  adept.predict(Instance::point(0));
  CHECK_THROWS_AS(adept.predict(Instance::point(0)), InvariantViolation);
  adept.observe(Label::Zero);
  CHECK_THROWS_AS(adept.predict(Instance::point(0)), InvariantViolation);
}

TEST_CASE("prefix tree") {
  PrefixTree tree;
  const auto a = tree.extend(PrefixTree::kRoot, Label::One);
  const auto b = tree.extend(a, Label::Zero);
  CHECK(tree.labels(b) == Dichotomy{Label::One, Label::Zero});
  CHECK(tree.depth(b) == 2);
  CHECK(tree.parent(b) == a);
  tree.truncate(2);
  CHECK(tree.size() == 2);
  CHECK_THROWS_AS(tree.truncate(0), std::invalid_argument);
}
