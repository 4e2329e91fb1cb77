#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sectore/model.hpp"

namespace sectore {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment accumulators, one entry per raw parameter.
struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit OptimizerState(std::size_t n_params)
      : m(n_params, 0.0), v(n_params, 0.0) {}
};

// One bias-corrected Adam step over every raw parameter. Element-wise, so
// the parallel partition cannot change the result.
void adam_update(ModelParams& params, std::span<const double> grad,
                 OptimizerState& state, double learning_rate,
                 const AdamConfig& config, int threads = 1);

}  // namespace sectore
