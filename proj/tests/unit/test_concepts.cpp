#include <doctest.h>

#include <bit>
#include <random>
#include <stdexcept>
#include <vector>

#include "adept/concepts.hpp"
#include "adept/errors.hpp"

using namespace adept;

namespace {

const FiniteConceptClass kDiagonal(2, {{0, 0}, {1, 1}});

Example ex(std::uint64_t point, int y) { return Example{Instance::point(point), label_from_bit(y)}; }
Example bx(std::uint64_t block, std::uint64_t serial, int y) {
  return Example{Instance::in_block(block, serial), label_from_bit(y)};
}

FiniteConceptClass random_class(std::mt19937_64& gen, std::size_t domain, std::size_t concepts) {
  std::vector<std::vector<int>> rows(concepts, std::vector<int>(domain));
  for (auto& r : rows)
    for (auto& v : r) v = static_cast<int>(gen() & 1u);
  return FiniteConceptClass(domain, rows);
}

}  // namespace

TEST_CASE("evaluate") {
  CHECK(kDiagonal.evaluate(ConceptId{{1}}, Instance::point(0)) == Label::One);
  CHECK_THROWS_AS(kDiagonal.evaluate(ConceptId{{2}}, Instance::point(0)), std::invalid_argument);
  CHECK_THROWS_AS(kDiagonal.evaluate(ConceptId{{0}}, Instance::point(5)), std::invalid_argument);
  const BlockUnionClass blocks(1);
  CHECK(blocks.evaluate(ConceptId{{3}}, Instance::in_block(3, 17)) == Label::One);
  CHECK(blocks.evaluate(ConceptId{{3}}, Instance::in_block(4, 0)) == Label::Zero);
  CHECK(blocks.evaluate(ConceptId{{}}, Instance::in_block(4, 0)) == Label::Zero);
  CHECK_THROWS_AS(blocks.evaluate(ConceptId{{1, 2}}, Instance::in_block(1, 0)), std::invalid_argument);
}

TEST_CASE("class construction") {
  CHECK_THROWS_AS(FiniteConceptClass(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteConceptClass(2, {{0, 1}, {1}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteConceptClass(2, {{0, 2}}), std::invalid_argument);
  const FiniteConceptClass dup(2, {{0, 1}, {0, 1}, {1, 1}});
  CHECK(dup.size() == 2);
  CHECK(dup.duplicates_removed() == 1);
  CHECK(FiniteConceptClass::powerset(3).size() == 8);
  CHECK(FiniteConceptClass::singletons(4).size() == 4);
}

TEST_CASE("project") {
  const std::vector<Instance> both{Instance::point(0), Instance::point(1)};
  CHECK(project(kDiagonal, both) == std::set<Dichotomy>{{Label::Zero, Label::Zero}, {Label::One, Label::One}});
  const std::vector<Instance> first{Instance::point(0)};
  CHECK(project(kDiagonal, first) == std::set<Dichotomy>{{Label::Zero}, {Label::One}});
  CHECK(project(FiniteConceptClass::powerset(2), both).size() == 4);
  const std::vector<Instance> repeated{Instance::point(1), Instance::point(1)};
  CHECK(project(FiniteConceptClass::powerset(2), repeated).size() == 2);
}

TEST_CASE("vc and littlestone dimensions") {
  CHECK(vc_dimension(FiniteConceptClass::powerset(3)) == 3);
  CHECK(vc_dimension(FiniteConceptClass::singletons(3)) == 1);
  CHECK(vc_dimension(FiniteConceptClass(3, {{0, 0, 0}})) == 0);
  CHECK(littlestone_dimension(FiniteConceptClass::powerset(2)) == 2);
  CHECK(littlestone_dimension(FiniteConceptClass::singletons(3)) == 1);
  CHECK(littlestone_dimension(FiniteConceptClass(3, {{1, 0, 1}})) == 0);
  // Thresholds on 4 points: VC 1, Littlestone floor(log2 5) = 2.
  const FiniteConceptClass thresholds(4, {{0, 0, 0, 0}, {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 1, 1, 0}, {1, 1, 1, 1}});
  CHECK(vc_dimension(thresholds) == 1);
  CHECK(littlestone_dimension(thresholds) == 2);
}

TEST_CASE("dimension ordering on random classes") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto cls = random_class(gen, 1 + trial % 5, 1 + trial % 9);
    const auto vc = vc_dimension(cls);
    const auto ld = littlestone_dimension(cls);
    CHECK(vc <= ld);
    CHECK(ld <= static_cast<std::size_t>(std::bit_width(cls.size()) - 1));
  }
}

TEST_CASE("block union weak consistency") {
  const BlockUnionClass one(1);
  const BlockUnionClass two(2);
  const std::vector<Example> single{bx(1, 0, 1)};
  CHECK(one.weak_consistent(single));
  const std::vector<Example> split{bx(1, 0, 1), bx(1, 1, 0)};
  CHECK_FALSE(one.weak_consistent(split));
  const std::vector<Example> pair{bx(1, 0, 1), bx(2, 0, 1)};
  CHECK_FALSE(one.weak_consistent(pair));
  CHECK(two.weak_consistent(pair));
  const std::vector<Example> clash{bx(4, 2, 0), bx(4, 2, 1)};
  CHECK_FALSE(two.weak_consistent(clash));
  CHECK(one.weak_consistent({}));
}

TEST_CASE("finite weak consistency and erm") {
  const std::vector<Example> s{ex(0, 0), ex(1, 1)};
  CHECK_FALSE(kDiagonal.weak_consistent(s));
  CHECK(kDiagonal.weak_consistent({}));
  const auto empty = kDiagonal.erm({});
  CHECK(empty.concept_id.parts == std::vector<std::uint64_t>{0});
  CHECK(empty.errors == 0);
  const auto tie = kDiagonal.erm(s);
  CHECK(tie.errors == 1);
  CHECK(tie.concept_id.parts == std::vector<std::uint64_t>{0});
}

TEST_CASE("block union erm keeps the heaviest blocks") {
  const BlockUnionClass one(1);
  const std::vector<Example> s{bx(2, 0, 1), bx(2, 1, 1), bx(2, 2, 1), bx(5, 0, 1), bx(3, 0, 0), bx(7, 1, 0)};
  const auto r = one.erm(s);
  CHECK(r.concept_id.parts == std::vector<std::uint64_t>{2});
  CHECK(r.errors == 1);
}

TEST_CASE("erm agrees with brute force on random samples") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cls = random_class(gen, 4, 5);
    std::vector<Example> s;
    for (int i = 0; i < 6; ++i) s.push_back(ex(gen() % 4, static_cast<int>(gen() & 1u)));
    std::size_t best = s.size() + 1;
    for (std::size_t c = 0; c < cls.size(); ++c) {
      std::size_t errors = 0;
      for (const auto& e : s) errors += cls.value(c, e.x.index()) != e.y;
      best = std::min(best, errors);
    }
    CHECK(cls.erm(s).errors == best);
    CHECK(cls.weak_consistent(s) == (best == 0));
  }
}

TEST_CASE("finitized block classes") {
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto fin = finitize_block_union(d, d + 1, 2);
    CHECK(vc_dimension(fin.cls) == d);
    CHECK(littlestone_dimension(fin.cls) == d);
    const auto x = Instance::in_block(fin.blocks - 1, 1);
    CHECK(fin.block_point(fin.index_of(x)) == x);
  }
}

TEST_CASE("instance encoding round trip") {
  for (const auto& x : {Instance::point(0), Instance::point(41), Instance::in_block(3, 17)}) {
    CHECK(parse_instance(to_string(x)) == x);
  }
  CHECK(to_string(Instance::in_block(3, 17)) == "3:17");
}

TEST_CASE("class specs") {
  CHECK(make_concept_class({{"type", "powerset"}, {"n", 2}})->kind() == "finite");
  CHECK(make_concept_class({{"type", "block_union"}, {"d", 2}})->kind() == "block_union");
  CHECK_THROWS_AS(make_concept_class({{"type", "block_union"}, {"d", 0}}), ConfigError);
  CHECK_THROWS_AS(make_concept_class({{"type", "circle"}}), ConfigError);
  CHECK_THROWS_AS(make_concept_class({{"type", "finite"}, {"domain_size", 2}, {"concepts", {{0, 1, 1}}}}), ConfigError);
  CHECK_THROWS_AS(make_concept_class({{"type", "powerset"}, {"n", 2}, {"extra", 1}}), ConfigError);
  std::vector<std::string> warnings;
  make_concept_class({{"type", "finite"}, {"domain_size", 1}, {"concepts", {{0}, {0}}}},
                     [&](const std::string& w) { warnings.push_back(w); });
  CHECK(warnings.size() == 1);
}

TEST_CASE("analytic block consistency matches the finitized class") {
  std::mt19937_64 gen(17);
  for (std::size_t d = 1; d <= 2; ++d) {
    const auto fin = finitize_block_union(d, 5, 4);
    const BlockUnionClass analytic(d);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t length = 1 + trial % 6;
      std::vector<std::size_t> points(length);
      for (auto& p : points) p = gen() % (fin.blocks * fin.serials);
      for (std::uint32_t labels = 0; labels < (1u << length); ++labels) {
        std::vector<Example> block_sample;
        std::vector<Example> finite_sample;
        for (std::size_t i = 0; i < length; ++i) {
          const Label y = label_from_bit(static_cast<int>((labels >> i) & 1u));
          block_sample.push_back({fin.block_point(points[i]), y});
          finite_sample.push_back({Instance::point(points[i]), y});
        }
        CHECK(analytic.weak_consistent(block_sample) == fin.cls.weak_consistent(finite_sample));
        CHECK(analytic.erm(block_sample).errors == fin.cls.erm(finite_sample).errors);
      }
    }
  }
}
