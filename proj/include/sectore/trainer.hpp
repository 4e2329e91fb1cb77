#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sectore/dataset.hpp"
#include "sectore/evaluate.hpp"
#include "sectore/gradients.hpp"
#include "sectore/model.hpp"
#include "sectore/optimizer.hpp"
#include "sectore/rng.hpp"

namespace sectore {

// Every knob of a training run. JSON round-trips field for field; unknown
// keys in a config file are an error so typos cannot silently fall back to
// defaults.
struct TrainConfig {
  std::size_t dimension = 50;
  std::size_t batch_size = 128;
  std::size_t n_negatives = 32;
  double gamma = 6.0;          // fixed margin
  double alpha = 1.0;          // self-adversarial temperature
  double beta = 0.5;           // sector angle offset
  double learning_rate = 1e-3;
  std::size_t max_steps = 2000;
  std::size_t validation_interval = 200;
  std::uint64_t seed = 1;
  Norm norm = Norm::L1;
  AblationConfig ablation;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;  // throws std::invalid_argument
  AdamConfig adam() const { return {adam_beta1, adam_beta2, adam_epsilon}; }

  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  static TrainConfig from_json_file(const std::string& path);
};

// Reusable buffers for train_step. Grow on first use; keeping one alive
// across steps avoids reallocating the dense gradient every step.
struct TrainWorkspace {
  std::vector<double> dense_grad;
  std::vector<GradAccum> accums;
  std::vector<std::vector<Triple>> negatives;
  std::vector<double> losses;
  std::uint64_t filter_exhausted = 0;  // negatives accepted unfiltered
};

// One optimization step over a batch of positives: per positive, sample
// negatives, weight them by the self-adversarial softmax of their scores,
// accumulate loss gradients; average over the batch; one Adam update.
// Gradient contributions are computed in parallel but merged in batch order
// over fixed-size chunks, so the result is identical for any thread count.
// Returns the mean loss.
double train_step(ModelParams& params, OptimizerState& opt,
                  std::span<const Triple> batch, const Dataset& dataset,
                  const TrainConfig& config, Rng& rng, TrainWorkspace& ws,
                  int threads = 1);

struct TrainResult {
  std::string checkpoint_base;  // best-validation-MRR checkpoint
  std::string metrics_path;
  double best_valid_mrr = 0.0;
  std::uint64_t steps = 0;
};

// Full training loop: uniform batches from the train split, periodic
// filtered-MRR validation, best-checkpoint retention, and a metrics CSV
// (`step,loss,valid_mrr,valid_h1,valid_h3,valid_h10`; loss is the mean over
// the interval ending at the row's step). A non-finite loss dumps the
// offending batch to <out_dir>/diverged_batch.txt and throws. With resume
// set, training continues from those parameters instead of a fresh init.
TrainResult run_training(const Dataset& dataset, const TrainConfig& config,
                         const std::string& out_dir, int threads = 1,
                         const ModelParams* resume = nullptr);

}  // namespace sectore
