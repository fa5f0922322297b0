#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

#include <gmpxx.h>

namespace adept {

// Nonnegative weight stored as its natural log. -inf encodes weight zero.
class LogWeight {
 public:
  constexpr LogWeight() = default;

  static constexpr LogWeight zero() { return LogWeight{}; }
  static constexpr LogWeight one() { return from_log(0.0); }
  static constexpr LogWeight from_log(double v) {
    LogWeight w;
    w.value_ = v;
    return w;
  }

  constexpr double log() const { return value_; }
  constexpr bool is_zero() const { return value_ == -std::numeric_limits<double>::infinity(); }
  double to_double() const;

  // Sum of weights (stable log-add-exp).
  friend LogWeight operator+(LogWeight a, LogWeight b);
  // Product of weights.
  friend LogWeight operator*(LogWeight a, LogWeight b);

  friend constexpr auto operator<=>(LogWeight a, LogWeight b) { return a.value_ <=> b.value_; }
  friend constexpr bool operator==(LogWeight a, LogWeight b) { return a.value_ == b.value_; }

 private:
  double value_ = -std::numeric_limits<double>::infinity();
};

// Exact weights are GMP rationals; counts are GMP integers.
using ExactWeight = mpq_class;
using ExactCount = mpz_class;

double log_add_exp(double a, double b);
double log_sum_exp(std::span<const double> terms);

// ln C(n, k); -inf outside 0 <= k <= n.
LogWeight log_binomial(std::uint64_t n, std::int64_t k);

ExactCount binomial(std::uint64_t n, std::int64_t k);

// Number of mistake schedules extending a prefix at round t that has used k
// of M mistakes: sum_{j=0}^{M-k} C(T-t, j).
LogWeight future_capacity(std::uint64_t horizon, std::uint64_t round, int budget, int used);
ExactCount future_capacity_exact(std::uint64_t horizon, std::uint64_t round, int budget, int used);

// Number of mistake schedules over the whole horizon, sum_{j<=M} C(T, j).
ExactCount schedule_count(std::uint64_t horizon, int budget);

// Sauer-Shelah growth bound sum_{i=0}^{d} C(t, i). Throws std::overflow_error
// when the value does not fit in 64 bits.
std::uint64_t sauer_bound(std::uint64_t t, std::uint64_t d);

// Relative difference |a-b| / max(|a|,|b|), 0 when both are zero.
double relative_difference(double a, double b);

}  // namespace adept
