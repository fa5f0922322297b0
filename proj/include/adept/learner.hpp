#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "adept/concepts.hpp"

namespace adept {

// Probability of predicting label 1. `exact` is populated in exact numeric mode.
struct PredictionDistribution {
  double p1 = 0.0;
  std::optional<mpq_class> exact;
};

// Agnostic online learner as seen by the game loop: one prediction per round
// followed by the true label.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string name() const = 0;
  virtual PredictionDistribution predict(const Instance& x) = 0;
  virtual void observe(Label y) = 0;
  // Size of the set the latest prediction was aggregated over.
  virtual std::size_t active_count() const = 0;
};

}  // namespace adept
