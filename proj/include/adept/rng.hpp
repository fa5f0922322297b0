#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace adept {

// Seed of an independent stream, a pure function of (experiment seed, label).
std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view label);

// Platform-stable draws on top of mt19937_64 (the standard distributions are
// implementation-defined, so they are avoided for transcript reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t seed, std::string_view label) { return Rng(derive_stream_seed(seed, label)); }

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

inline constexpr std::string_view kLearnerStream = "learner";
inline constexpr std::string_view kAdversaryStream = "adversary";
inline constexpr std::string_view kSamplerStream = "sampler";

}  // namespace adept
