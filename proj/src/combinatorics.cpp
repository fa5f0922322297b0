#include "adept/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace adept {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(n!) for n < kTableSize, built once per process.
constexpr std::size_t kTableSize = (std::size_t{1} << 17) + 2;

const std::vector<double>& log_factorial_table() {
  static std::once_flag once;
  static std::vector<double> table;
  std::call_once(once, [] {
    table.resize(kTableSize);
    for (std::size_t i = 0; i < kTableSize; ++i) {
      table[i] = std::lgamma(static_cast<double>(i) + 1.0);
    }
  });
  return table;
}

double log_factorial(std::uint64_t n) {
  const auto& table = log_factorial_table();
  if (n < table.size()) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace

double LogWeight::to_double() const { return std::exp(value_); }

LogWeight operator+(LogWeight a, LogWeight b) { return LogWeight::from_log(log_add_exp(a.log(), b.log())); }

LogWeight operator*(LogWeight a, LogWeight b) {
  if (a.is_zero() || b.is_zero()) return LogWeight::zero();
  return LogWeight::from_log(a.log() + b.log());
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> terms) {
  double hi = kNegInf;
  for (double v : terms) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : terms) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

LogWeight log_binomial(std::uint64_t n, std::int64_t k) {
  if (k < 0 || static_cast<std::uint64_t>(k) > n) return LogWeight::zero();
  const auto uk = static_cast<std::uint64_t>(k);
  if (uk == 0 || uk == n) return LogWeight::one();
  return LogWeight::from_log(log_factorial(n) - log_factorial(uk) - log_factorial(n - uk));
}

ExactCount binomial(std::uint64_t n, std::int64_t k) {
  ExactCount out = 0;
  if (k < 0 || static_cast<std::uint64_t>(k) > n) return out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

LogWeight future_capacity(std::uint64_t horizon, std::uint64_t round, int budget, int used) {
  if (round > horizon) throw std::invalid_argument("future_capacity: round exceeds horizon");
  if (used > budget) return LogWeight::zero();
  const std::uint64_t remaining = horizon - round;
  const std::int64_t top = std::min<std::int64_t>(budget - used, static_cast<std::int64_t>(remaining));
  if (top == 0) return LogWeight::one();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(top) + 1);
  for (std::int64_t j = 0; j <= top; ++j) terms.push_back(log_binomial(remaining, j).log());
  return LogWeight::from_log(log_sum_exp(terms));
}

ExactCount future_capacity_exact(std::uint64_t horizon, std::uint64_t round, int budget, int used) {
  if (round > horizon) throw std::invalid_argument("future_capacity_exact: round exceeds horizon");
  ExactCount total = 0;
  if (used > budget) return total;
  const std::uint64_t remaining = horizon - round;
  for (std::int64_t j = 0; j <= budget - used; ++j) total += binomial(remaining, j);
  return total;
}

ExactCount schedule_count(std::uint64_t horizon, int budget) {
  return future_capacity_exact(horizon, 0, budget, 0);
}

std::uint64_t sauer_bound(std::uint64_t t, std::uint64_t d) {
  ExactCount total = 0;
  const std::uint64_t top = std::min(t, d);
  for (std::uint64_t i = 0; i <= top; ++i) total += binomial(t, static_cast<std::int64_t>(i));
  if (mpz_sizeinbase(total.get_mpz_t(), 2) > 64) throw std::overflow_error("sauer_bound exceeds 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, total.get_mpz_t());
  return out;
}

double relative_difference(double a, double b) {
  if (a == b) return 0.0;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) / scale;
}

}  // namespace adept
