#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace adept {

enum class Label : std::uint8_t { Zero = 0, One = 1 };

constexpr Label flip(Label y) { return y == Label::Zero ? Label::One : Label::Zero; }
constexpr int bit(Label y) { return static_cast<int>(y); }
constexpr Label label_from_bit(int b) { return b == 0 ? Label::Zero : Label::One; }

// A point of the instance space: either an index into a finite domain or a
// (block, serial) pair of a block-structured domain. Ordered lexicographically.
struct Instance {
  std::uint64_t major = 0;  // point index, or block id
  std::uint64_t minor = 0;  // serial within the block; always 0 for finite domains
  bool structured = false;

  static constexpr Instance point(std::uint64_t index) { return Instance{index, 0, false}; }
  static constexpr Instance in_block(std::uint64_t block, std::uint64_t serial) {
    return Instance{block, serial, true};
  }

  constexpr std::uint64_t index() const { return major; }
  constexpr std::uint64_t block() const { return major; }
  constexpr std::uint64_t serial() const { return minor; }

  friend constexpr auto operator<=>(const Instance&, const Instance&) = default;
};

// "3" for finite points, "3:17" for block points.
std::string to_string(const Instance& x);
Instance parse_instance(const std::string& text);

struct InstanceHash {
  std::size_t operator()(const Instance& x) const noexcept;
};

struct Example {
  Instance x;
  Label y = Label::Zero;
  friend constexpr auto operator<=>(const Example&, const Example&) = default;
};

using LabeledSequence = std::vector<Example>;
using Dichotomy = std::vector<Label>;

// Finite classes: a single row index. Block classes: sorted positive block ids.
struct ConceptId {
  std::vector<std::uint64_t> parts;
  friend auto operator<=>(const ConceptId&, const ConceptId&) = default;
};

std::string to_string(const ConceptId& id);

struct ErmResult {
  ConceptId concept_id;
  std::size_t errors = 0;
};

class ConceptClass {
 public:
  virtual ~ConceptClass() = default;

  virtual std::string kind() const = 0;
  // Throws std::invalid_argument for an unknown concept or a foreign instance.
  virtual Label evaluate(const ConceptId& concept_id, const Instance& x) const = 0;
  // True iff some concept agrees with every example.
  virtual bool weak_consistent(std::span<const Example> sample) const = 0;
  virtual ErmResult erm(std::span<const Example> sample) const = 0;
};

// Version spaces over classes of at most 64 concepts, bit i = concept i.
using VersionSpace = std::uint64_t;
inline constexpr std::size_t kMaxBitsetConcepts = 64;

class FiniteConceptClass final : public ConceptClass {
 public:
  // Rows are deduplicated (first occurrence kept). Throws std::invalid_argument
  // on ragged rows, non-bit entries or an empty class.
  FiniteConceptClass(std::size_t domain_size, const std::vector<std::vector<int>>& rows);

  static FiniteConceptClass powerset(std::size_t points);
  static FiniteConceptClass singletons(std::size_t points);

  std::string kind() const override { return "finite"; }
  Label evaluate(const ConceptId& concept_id, const Instance& x) const override;
  bool weak_consistent(std::span<const Example> sample) const override;
  ErmResult erm(std::span<const Example> sample) const override;

  std::size_t domain_size() const { return domain_size_; }
  std::size_t size() const { return rows_.size(); }
  std::size_t duplicates_removed() const { return duplicates_removed_; }
  Label value(std::size_t concept_index, std::size_t point) const;
  const std::vector<std::vector<std::uint8_t>>& rows() const { return rows_; }

  // Bitset views; valid only when size() <= 64.
  bool bitset_capable() const { return rows_.size() <= kMaxBitsetConcepts; }
  VersionSpace full_space() const;
  VersionSpace restrict(VersionSpace space, std::size_t point, Label y) const;
  VersionSpace consistent_set(std::span<const Example> sample) const;

 private:
  std::size_t checked_point(const Instance& x) const;

  std::size_t domain_size_ = 0;
  std::size_t duplicates_removed_ = 0;
  std::vector<std::vector<std::uint8_t>> rows_;
  // columns_[x * words_ + w]: concepts labeling point x with 1.
  std::size_t words_ = 0;
  std::vector<std::uint64_t> columns_;
};

// Unions of at most d blocks of a partition into countably many infinite
// blocks. Never materialized; every query is answered from block statistics.
class BlockUnionClass final : public ConceptClass {
 public:
  explicit BlockUnionClass(std::size_t max_blocks);

  std::string kind() const override { return "block_union"; }
  std::size_t max_blocks() const { return max_blocks_; }

  Label evaluate(const ConceptId& concept_id, const Instance& x) const override;
  bool weak_consistent(std::span<const Example> sample) const override;
  ErmResult erm(std::span<const Example> sample) const override;

 private:
  std::size_t max_blocks_;
};

// All dichotomies { (c(x_1), ..., c(x_m)) : c in C }.
std::set<Dichotomy> project(const FiniteConceptClass& cls, std::span<const Instance> instances);

// Brute-force dimensions; classes above 64 concepts raise CapabilityError.
std::size_t vc_dimension(const FiniteConceptClass& cls);
std::size_t littlestone_dimension(const FiniteConceptClass& cls);

// Memoized Littlestone dimension of sub-version-spaces of one class.
class LittlestoneSolver {
 public:
  explicit LittlestoneSolver(const FiniteConceptClass& cls);
  int dimension(VersionSpace space);

 private:
  const FiniteConceptClass& cls_;
  std::unordered_map<VersionSpace, int> memo_;
};

// Finite restriction of the union-of-at-most-d-blocks class to `blocks` blocks
// holding `serials` points each. Point index = block * serials + serial.
struct FinitizedBlockClass {
  FiniteConceptClass cls;
  std::size_t blocks = 0;
  std::size_t serials = 0;

  std::size_t index_of(const Instance& block_point) const;
  Instance block_point(std::size_t index) const;
};
FinitizedBlockClass finitize_block_union(std::size_t max_blocks, std::size_t blocks, std::size_t serials);

// Parses {"type":"finite",...} or {"type":"block_union","d":d}. Throws
// ConfigError naming the offending field. `on_warning` receives dedup notices.
std::shared_ptr<const ConceptClass> make_concept_class(
    const nlohmann::json& spec, const std::function<void(const std::string&)>& on_warning = {});

}  // namespace adept
