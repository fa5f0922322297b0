#include "adept/concepts.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

#include "adept/errors.hpp"

namespace adept {

std::string to_string(const Instance& x) {
  if (!x.structured) return std::to_string(x.major);
  return std::to_string(x.major) + ":" + std::to_string(x.minor);
}

Instance parse_instance(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) return Instance::point(std::stoull(text));
    return Instance::in_block(std::stoull(text.substr(0, colon)), std::stoull(text.substr(colon + 1)));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed instance encoding '" + text + "'");
  }
}

std::size_t InstanceHash::operator()(const Instance& x) const noexcept {
  std::uint64_t h = x.major * 0x9E3779B97F4A7C15ULL;
  h ^= (x.minor + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
  h ^= static_cast<std::uint64_t>(x.structured) << 63;
  return static_cast<std::size_t>(h);
}

std::string to_string(const ConceptId& id) {
  std::string out = "[";
  for (std::size_t i = 0; i < id.parts.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(id.parts[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// FiniteConceptClass

FiniteConceptClass::FiniteConceptClass(std::size_t domain_size, const std::vector<std::vector<int>>& rows)
    : domain_size_(domain_size) {
  if (rows.empty()) throw std::invalid_argument("concept class must contain at least one concept");
  std::set<std::vector<std::uint8_t>> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != domain_size) {
      throw std::invalid_argument("concept " + std::to_string(r) + " has length " + std::to_string(row.size()) +
                                  ", expected " + std::to_string(domain_size));
    }
    std::vector<std::uint8_t> bits(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] != 0 && row[i] != 1) {
        throw std::invalid_argument("concept " + std::to_string(r) + " has non-bit entry at point " +
                                    std::to_string(i));
      }
      bits[i] = static_cast<std::uint8_t>(row[i]);
    }
    if (!seen.insert(bits).second) {
      ++duplicates_removed_;
      continue;
    }
    rows_.push_back(std::move(bits));
  }
  words_ = (rows_.size() + 63) / 64;
  columns_.assign(domain_size_ * words_, 0);
  for (std::size_t c = 0; c < rows_.size(); ++c) {
    for (std::size_t x = 0; x < domain_size_; ++x) {
      if (rows_[c][x]) columns_[x * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
    }
  }
}

FiniteConceptClass FiniteConceptClass::powerset(std::size_t points) {
  if (points > 16) throw CapabilityError("powerset class limited to 16 points");
  std::vector<std::vector<int>> rows;
  for (std::size_t mask = 0; mask < (std::size_t{1} << points); ++mask) {
    std::vector<int> row(points);
    for (std::size_t i = 0; i < points; ++i) row[i] = static_cast<int>((mask >> i) & 1U);
    rows.push_back(std::move(row));
  }
  return FiniteConceptClass(points, rows);
}

FiniteConceptClass FiniteConceptClass::singletons(std::size_t points) {
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < points; ++i) {
    std::vector<int> row(points, 0);
    row[i] = 1;
    rows.push_back(std::move(row));
  }
  return FiniteConceptClass(points, rows);
}

std::size_t FiniteConceptClass::checked_point(const Instance& x) const {
  if (x.structured || x.major >= domain_size_) {
    throw std::invalid_argument("instance " + to_string(x) + " is outside the finite domain of size " +
                                std::to_string(domain_size_));
  }
  return static_cast<std::size_t>(x.major);
}

Label FiniteConceptClass::value(std::size_t concept_index, std::size_t point) const {
  return label_from_bit(rows_.at(concept_index).at(point));
}

Label FiniteConceptClass::evaluate(const ConceptId& concept_id, const Instance& x) const {
  if (concept_id.parts.size() != 1 || concept_id.parts[0] >= rows_.size()) {
    throw std::invalid_argument("unknown concept id " + to_string(concept_id));
  }
  return value(static_cast<std::size_t>(concept_id.parts[0]), checked_point(x));
}

bool FiniteConceptClass::weak_consistent(std::span<const Example> sample) const {
  std::vector<std::uint64_t> alive(words_, ~std::uint64_t{0});
  if (rows_.size() % 64) alive.back() = (std::uint64_t{1} << (rows_.size() % 64)) - 1;
  for (const auto& ex : sample) {
    const std::size_t x = checked_point(ex.x);
    bool any = false;
    for (std::size_t w = 0; w < words_; ++w) {
      const std::uint64_t col = columns_[x * words_ + w];
      alive[w] &= ex.y == Label::One ? col : ~col;
      any = any || alive[w] != 0;
    }
    if (!any) return false;
  }
  return true;
}

ErmResult FiniteConceptClass::erm(std::span<const Example> sample) const {
  std::vector<std::size_t> points;
  points.reserve(sample.size());
  for (const auto& ex : sample) points.push_back(checked_point(ex.x));
  ErmResult best{ConceptId{{0}}, sample.size() + 1};
  for (std::size_t c = 0; c < rows_.size(); ++c) {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < sample.size() && errors < best.errors; ++i) {
      errors += rows_[c][points[i]] != bit(sample[i].y);
    }
    if (errors < best.errors) best = ErmResult{ConceptId{{c}}, errors};
  }
  return best;
}

VersionSpace FiniteConceptClass::full_space() const {
  if (!bitset_capable()) throw CapabilityError("class exceeds 64 concepts for bitset version spaces");
  return rows_.size() == 64 ? ~VersionSpace{0} : (VersionSpace{1} << rows_.size()) - 1;
}

VersionSpace FiniteConceptClass::restrict(VersionSpace space, std::size_t point, Label y) const {
  const std::uint64_t col = columns_[point * words_];
  return space & (y == Label::One ? col : ~col);
}

VersionSpace FiniteConceptClass::consistent_set(std::span<const Example> sample) const {
  VersionSpace space = full_space();
  for (const auto& ex : sample) space = restrict(space, checked_point(ex.x), ex.y);
  return space;
}

// ---------------------------------------------------------------------------
// BlockUnionClass

namespace {

void require_structured(const Instance& x) {
  if (!x.structured) throw std::invalid_argument("block class received non-block instance " + to_string(x));
}

struct BlockTally {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

std::vector<std::pair<std::uint64_t, BlockTally>> tally_blocks(std::span<const Example> sample) {
  std::unordered_map<std::uint64_t, BlockTally> by_block;
  for (const auto& ex : sample) {
    require_structured(ex.x);
    auto& tally = by_block[ex.x.block()];
    (ex.y == Label::One ? tally.positives : tally.negatives) += 1;
  }
  std::vector<std::pair<std::uint64_t, BlockTally>> out(by_block.begin(), by_block.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace

BlockUnionClass::BlockUnionClass(std::size_t max_blocks) : max_blocks_(max_blocks) {}

Label BlockUnionClass::evaluate(const ConceptId& concept_id, const Instance& x) const {
  require_structured(x);
  const auto& parts = concept_id.parts;
  if (parts.size() > max_blocks_ || !std::is_sorted(parts.begin(), parts.end()) ||
      std::adjacent_find(parts.begin(), parts.end()) != parts.end()) {
    throw std::invalid_argument("unknown concept id " + to_string(concept_id) + " for unions of at most " +
                                std::to_string(max_blocks_) + " blocks");
  }
  return label_from_bit(std::binary_search(parts.begin(), parts.end(), x.block()));
}

bool BlockUnionClass::weak_consistent(std::span<const Example> sample) const {
  std::unordered_map<std::uint64_t, std::uint8_t> flags;  // bit0 positive seen, bit1 negative seen
  std::size_t positive_blocks = 0;
  for (const auto& ex : sample) {
    require_structured(ex.x);
    auto& f = flags[ex.x.block()];
    const std::uint8_t mark = ex.y == Label::One ? 1 : 2;
    if ((f & 1) == 0 && mark == 1) ++positive_blocks;
    f |= mark;
    if (f == 3 || positive_blocks > max_blocks_) return false;
  }
  return true;
}

ErmResult BlockUnionClass::erm(std::span<const Example> sample) const {
  const auto tallies = tally_blocks(sample);
  std::size_t total_positives = 0;
  std::vector<std::pair<std::int64_t, std::uint64_t>> gains;  // (gain, block)
  for (const auto& [block, tally] : tallies) {
    total_positives += tally.positives;
    const auto gain = static_cast<std::int64_t>(tally.positives) - static_cast<std::int64_t>(tally.negatives);
    if (gain > 0) gains.emplace_back(gain, block);
  }
  std::sort(gains.begin(), gains.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (gains.size() > max_blocks_) gains.resize(max_blocks_);
  ErmResult out;
  std::int64_t saved = 0;
  for (const auto& [gain, block] : gains) {
    saved += gain;
    out.concept_id.parts.push_back(block);
  }
  std::sort(out.concept_id.parts.begin(), out.concept_id.parts.end());
  out.errors = total_positives - static_cast<std::size_t>(saved);
  return out;
}

// ---------------------------------------------------------------------------
// Projection and dimensions

std::set<Dichotomy> project(const FiniteConceptClass& cls, std::span<const Instance> instances) {
  std::vector<std::size_t> points;
  for (const auto& x : instances) {
    if (x.structured || x.major >= cls.domain_size()) {
      throw std::invalid_argument("instance " + to_string(x) + " outside the class domain");
    }
    points.push_back(static_cast<std::size_t>(x.major));
  }
  std::set<Dichotomy> out;
  for (std::size_t c = 0; c < cls.size(); ++c) {
    Dichotomy d;
    d.reserve(points.size());
    for (auto p : points) d.push_back(cls.value(c, p));
    out.insert(std::move(d));
  }
  return out;
}

namespace {

void require_brute_force_scale(const FiniteConceptClass& cls) {
  if (!cls.bitset_capable()) {
    throw CapabilityError("brute-force dimension computation is limited to 64 concepts (class has " +
                          std::to_string(cls.size()) + ")");
  }
}

bool shattered(const FiniteConceptClass& cls, const std::vector<std::size_t>& subset) {
  std::vector<bool> hit(std::size_t{1} << subset.size(), false);
  std::size_t distinct = 0;
  for (std::size_t c = 0; c < cls.size(); ++c) {
    std::size_t pattern = 0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      pattern |= static_cast<std::size_t>(bit(cls.value(c, subset[i]))) << i;
    }
    if (!hit[pattern]) {
      hit[pattern] = true;
      ++distinct;
    }
  }
  return distinct == hit.size();
}

// Visits every m-subset of {0..n-1} in lexicographic order until `visit` returns true.
template <typename Visit>
bool any_subset(std::size_t n, std::size_t m, Visit&& visit) {
  if (m > n) return false;
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (visit(idx)) return true;
    std::size_t i = m;
    while (i > 0 && idx[i - 1] == n - m + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::size_t vc_dimension(const FiniteConceptClass& cls) {
  require_brute_force_scale(cls);
  std::size_t best = 0;
  // A shattered m-set needs 2^m distinct concepts.
  for (std::size_t m = 1; m <= cls.domain_size() && (std::size_t{1} << m) <= cls.size(); ++m) {
    const bool found = any_subset(cls.domain_size(), m, [&](const std::vector<std::size_t>& s) {
      return shattered(cls, s);
    });
    if (!found) break;
    best = m;
  }
  return best;
}

LittlestoneSolver::LittlestoneSolver(const FiniteConceptClass& cls) : cls_(cls) { require_brute_force_scale(cls); }

int LittlestoneSolver::dimension(VersionSpace space) {
  if (std::popcount(space) <= 1) return 0;
  if (auto it = memo_.find(space); it != memo_.end()) return it->second;
  const int ceiling = std::bit_width(static_cast<std::uint64_t>(std::popcount(space))) - 1;
  int best = 0;
  for (std::size_t x = 0; x < cls_.domain_size() && best < ceiling; ++x) {
    const VersionSpace ones = cls_.restrict(space, x, Label::One);
    const VersionSpace zeros = space & ~ones;
    if (ones == 0 || zeros == 0) continue;  // constant on x
    best = std::max(best, 1 + std::min(dimension(zeros), dimension(ones)));
  }
  memo_.emplace(space, best);
  return best;
}

std::size_t littlestone_dimension(const FiniteConceptClass& cls) {
  LittlestoneSolver solver(cls);
  return static_cast<std::size_t>(solver.dimension(cls.full_space()));
}

// ---------------------------------------------------------------------------
// Finitized block unions

std::size_t FinitizedBlockClass::index_of(const Instance& block_point) const {
  if (!block_point.structured || block_point.block() >= blocks || block_point.serial() >= serials) {
    throw std::invalid_argument("block point " + to_string(block_point) + " outside the finitization");
  }
  return static_cast<std::size_t>(block_point.block() * serials + block_point.serial());
}

Instance FinitizedBlockClass::block_point(std::size_t index) const {
  return Instance::in_block(index / serials, index % serials);
}

FinitizedBlockClass finitize_block_union(std::size_t max_blocks, std::size_t blocks, std::size_t serials) {
  if (blocks == 0 || serials == 0) throw std::invalid_argument("finitization needs at least one block point");
  std::vector<std::vector<int>> rows;
  for (std::size_t size = 0; size <= std::min(max_blocks, blocks); ++size) {
    any_subset(blocks, size, [&](const std::vector<std::size_t>& chosen) {
      std::vector<int> row(blocks * serials, 0);
      for (auto b : chosen) {
        for (std::size_t s = 0; s < serials; ++s) row[b * serials + s] = 1;
      }
      rows.push_back(std::move(row));
      return false;
    });
  }
  return FinitizedBlockClass{FiniteConceptClass(blocks * serials, rows), blocks, serials};
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError(where + "." + key + ": unknown field");
    }
  }
}

std::size_t require_count(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key + ": missing");
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + "." + key + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::shared_ptr<const ConceptClass> make_concept_class(const nlohmann::json& spec,
                                                       const std::function<void(const std::string&)>& on_warning) {
  const std::string where = "class";
  if (!spec.is_object()) throw ConfigError(where + ": expected an object");
  if (!spec.contains("type") || !spec.at("type").is_string()) throw ConfigError(where + ".type: missing or not a string");
  const auto type = spec.at("type").get<std::string>();
  if (type == "block_union") {
    reject_unknown(spec, {"type", "d"}, where);
    const auto d = require_count(spec, "d", where);
    if (d == 0) throw ConfigError(where + ".d: must be at least 1");
    return std::make_shared<BlockUnionClass>(d);
  }
  if (type == "powerset" || type == "singletons") {
    reject_unknown(spec, {"type", "n"}, where);
    const auto n = require_count(spec, "n", where);
    if (n == 0 || n > 6) throw ConfigError(where + ".n: must lie in [1, 6]");
    return std::make_shared<FiniteConceptClass>(type == "powerset" ? FiniteConceptClass::powerset(n)
                                                                   : FiniteConceptClass::singletons(n));
  }
  if (type != "finite") throw ConfigError(where + ".type: unknown class type '" + type + "'");
  reject_unknown(spec, {"type", "domain_size", "concepts"}, where);
  const auto n = require_count(spec, "domain_size", where);
  if (!spec.contains("concepts") || !spec.at("concepts").is_array()) {
    throw ConfigError(where + ".concepts: missing or not an array");
  }
  std::vector<std::vector<int>> rows;
  const auto& concepts = spec.at("concepts");
  for (std::size_t r = 0; r < concepts.size(); ++r) {
    const auto& row = concepts[r];
    const std::string field = where + ".concepts[" + std::to_string(r) + "]";
    if (!row.is_array()) throw ConfigError(field + ": expected an array of bits");
    if (row.size() != n) {
      throw ConfigError(field + ": length " + std::to_string(row.size()) + " != domain_size " + std::to_string(n));
    }
    std::vector<int> bits;
    for (const auto& b : row) {
      if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
        throw ConfigError(field + ": entries must be 0 or 1");
      }
      bits.push_back(b.get<int>());
    }
    rows.push_back(std::move(bits));
  }
  if (rows.empty()) throw ConfigError(where + ".concepts: at least one concept required");
  auto cls = std::make_shared<FiniteConceptClass>(n, rows);
  if (cls->duplicates_removed() > 0 && on_warning) {
    on_warning(where + ".concepts: removed " + std::to_string(cls->duplicates_removed()) + " duplicate row(s)");
  }
  return cls;
}

}  // namespace adept
