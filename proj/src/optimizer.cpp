#include "sectore/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "sectore/parallel.hpp"

namespace sectore {

void adam_update(ModelParams& params, std::span<const double> grad,
                 OptimizerState& state, double learning_rate,
                 const AdamConfig& config, int threads) {
  const std::size_t n = params.n_params();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n)
    throw std::invalid_argument("adam_update: shape mismatch");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double corr1 = 1.0 - std::pow(config.beta1, t);
  const double corr2 = 1.0 - std::pow(config.beta2, t);
  double* x = params.flat().data();
  double* m = state.m.data();
  double* v = state.v.data();

  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double g = grad[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[i] / corr1;
      const double v_hat = v[i] / corr2;
      x[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  });
}

}  // namespace sectore
