#include "sectore/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sectore/checkpoint.hpp"
#include "sectore/parallel.hpp"
#include "sectore/sampling.hpp"

namespace sectore {

namespace {

// Positives per deterministic merge chunk; fixed so the gradient order does
// not depend on the thread count.
constexpr std::size_t kGradChunk = 16;

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return key == k;
        }) == known.end()) {
      throw std::invalid_argument("unknown config key" +
                                  (where.empty() ? "" : " in " + where) +
                                  ": \"" + key + "\"");
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  auto bad = [](const std::string& msg) {
    throw std::invalid_argument("invalid config: " + msg);
  };
  if (dimension == 0) bad("dimension must be positive");
  if (batch_size == 0) bad("batch_size must be positive");
  if (n_negatives == 0) bad("n_negatives must be positive");
  if (validation_interval == 0) bad("validation_interval must be positive");
  if (!(gamma > 0.0)) bad("gamma must be > 0");
  if (!(alpha >= 0.0)) bad("alpha must be >= 0");
  if (!(beta >= 0.0)) bad("beta must be >= 0");
  if (!(learning_rate > 0.0)) bad("learning_rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) bad("adam_beta1 must be in (0,1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) bad("adam_beta2 must be in (0,1)");
  if (!(adam_epsilon > 0.0)) bad("adam_epsilon must be > 0");
  ablation.validate();
}

std::string TrainConfig::to_json() const {
  nlohmann::json j{
      {"dimension", dimension},
      {"batch_size", batch_size},
      {"n_negatives", n_negatives},
      {"gamma", gamma},
      {"alpha", alpha},
      {"beta", beta},
      {"learning_rate", learning_rate},
      {"max_steps", max_steps},
      {"validation_interval", validation_interval},
      {"seed", seed},
      {"norm", norm_name(norm)},
      {"ablation",
       {{"use_modulus", ablation.use_modulus},
        {"use_phase", ablation.use_phase},
        {"use_bump", ablation.use_bump}}},
      {"adam_beta1", adam_beta1},
      {"adam_beta2", adam_beta2},
      {"adam_epsilon", adam_epsilon},
  };
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  reject_unknown_keys(j,
                      {"dimension", "batch_size", "n_negatives", "gamma",
                       "alpha", "beta", "learning_rate", "max_steps",
                       "validation_interval", "seed", "norm", "ablation",
                       "adam_beta1", "adam_beta2", "adam_epsilon"},
                      "");
  TrainConfig c;
  if (j.contains("dimension")) c.dimension = j["dimension"].get<std::size_t>();
  if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
  if (j.contains("n_negatives"))
    c.n_negatives = j["n_negatives"].get<std::size_t>();
  if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
  if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) c.beta = j["beta"].get<double>();
  if (j.contains("learning_rate"))
    c.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("max_steps")) c.max_steps = j["max_steps"].get<std::size_t>();
  if (j.contains("validation_interval"))
    c.validation_interval = j["validation_interval"].get<std::size_t>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("norm")) c.norm = norm_from_name(j["norm"].get<std::string>());
  if (j.contains("ablation")) {
    const auto& a = j["ablation"];
    reject_unknown_keys(a, {"use_modulus", "use_phase", "use_bump"},
                        "\"ablation\"");
    if (a.contains("use_modulus"))
      c.ablation.use_modulus = a["use_modulus"].get<bool>();
    if (a.contains("use_phase"))
      c.ablation.use_phase = a["use_phase"].get<bool>();
    if (a.contains("use_bump")) c.ablation.use_bump = a["use_bump"].get<bool>();
  }
  if (j.contains("adam_beta1")) c.adam_beta1 = j["adam_beta1"].get<double>();
  if (j.contains("adam_beta2")) c.adam_beta2 = j["adam_beta2"].get<double>();
  if (j.contains("adam_epsilon"))
    c.adam_epsilon = j["adam_epsilon"].get<double>();
  c.validate();
  return c;
}

TrainConfig TrainConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

double train_step(ModelParams& params, OptimizerState& opt,
                  std::span<const Triple> batch, const Dataset& dataset,
                  const TrainConfig& config, Rng& rng, TrainWorkspace& ws,
                  int threads) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const std::size_t b = batch.size();

  // All sampling happens up front on the caller's thread; the parallel part
  // below consumes no randomness.
  ws.negatives.resize(b);
  for (std::size_t i = 0; i < b; ++i) {
    ws.negatives[i] = sample_negatives(dataset, batch[i], config.n_negatives,
                                       rng, 100, &ws.filter_exhausted);
  }

  ws.dense_grad.assign(params.n_params(), 0.0);
  ws.losses.assign(b, 0.0);
  while (ws.accums.size() < std::min(b, kGradChunk))
    ws.accums.emplace_back(params.dim());

  const double inv_b = 1.0 / static_cast<double>(b);
  for (std::size_t chunk = 0; chunk < b; chunk += kGradChunk) {
    const std::size_t chunk_end = std::min(b, chunk + kGradChunk);
    parallel_for(chunk_end - chunk, threads,
                 [&](std::size_t begin, std::size_t end) {
                   std::vector<double> scores;
                   for (std::size_t s = begin; s < end; ++s) {
                     const std::size_t i = chunk + s;
                     GradAccum& acc = ws.accums[s];
                     acc.clear();
                     const auto& negs = ws.negatives[i];
                     scores.resize(negs.size());
                     for (std::size_t k = 0; k < negs.size(); ++k)
                       scores[k] = score_triple(params, negs[k],
                                                config.ablation, config.norm);
                     const auto weights =
                         adversarial_weights(scores, config.alpha);
                     ws.losses[i] = loss_and_gradient(
                         params, batch[i], negs, weights, config.gamma,
                         config.ablation, config.norm, acc);
                     acc.scale(inv_b);
                   }
                 });
    for (std::size_t s = 0; s < chunk_end - chunk; ++s)
      ws.accums[s].add_into_dense(ws.dense_grad, params);
  }

  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) loss += ws.losses[i];
  loss *= inv_b;

  adam_update(params, ws.dense_grad, opt, config.learning_rate, config.adam(),
              threads);
  return loss;
}

namespace {

void dump_batch(const std::string& path, std::span<const Triple> batch,
                const Dataset& dataset, std::uint64_t step) {
  std::ofstream out(path, std::ios::binary);
  out << "# non-finite loss at step " << step << "\n";
  for (const Triple& t : batch) {
    out << dataset.vocab.entity_name(t.head) << '\t'
        << dataset.vocab.relation_name(t.relation) << '\t'
        << dataset.vocab.entity_name(t.tail) << '\n';
  }
}

}  // namespace

TrainResult run_training(const Dataset& dataset, const TrainConfig& config,
                         const std::string& out_dir, int threads,
                         const ModelParams* resume) {
  namespace fs = std::filesystem;
  config.validate();
  if (dataset.train.empty())
    throw std::invalid_argument("train split is empty");
  if (config.max_steps > 0 && dataset.valid.empty())
    throw std::invalid_argument("valid split is empty; cannot validate");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + out_dir +
                             ": " + ec.message());

  ModelParams params =
      resume ? *resume
             : ModelParams::init_random(dataset.n_entities(),
                                        dataset.n_relations(),
                                        config.dimension, config.beta,
                                        config.seed);
  if (params.n_entities() != dataset.n_entities() ||
      params.n_relations() != dataset.n_relations() ||
      params.dim() != config.dimension) {
    throw std::invalid_argument(
        "resume checkpoint shape mismatch: checkpoint " +
        std::to_string(params.n_entities()) + " entities / " +
        std::to_string(params.n_relations()) + " relations / d=" +
        std::to_string(params.dim()) + ", expected " +
        std::to_string(dataset.n_entities()) + " / " +
        std::to_string(dataset.n_relations()) + " / d=" +
        std::to_string(config.dimension));
  }

  {
    std::ofstream cfg(fs::path(out_dir) / "config.json", std::ios::binary);
    cfg << config.to_json() << '\n';
  }

  TrainResult result;
  result.checkpoint_base = (fs::path(out_dir) / "best").string();
  result.metrics_path = (fs::path(out_dir) / "metrics.csv").string();

  std::ofstream metrics(result.metrics_path, std::ios::binary);
  if (!metrics)
    throw std::runtime_error("cannot write metrics log: " + result.metrics_path);
  metrics << "step,loss,valid_mrr,valid_h1,valid_h3,valid_h10\n";
  metrics.flush();

  // The initial parameters stand in as "best" until validation says better.
  save_checkpoint(result.checkpoint_base, params, config.norm, config.ablation,
                  0);
  double best_mrr = -1.0;

  OptimizerState opt(params.n_params());
  TrainWorkspace ws;
  Rng rng(config.seed, /*stream=*/1);
  std::vector<Triple> batch(config.batch_size);

  EvalOptions eval_opts;
  eval_opts.ablation = config.ablation;
  eval_opts.norm = config.norm;
  eval_opts.threads = threads;

  double interval_loss = 0.0;
  std::size_t interval_n = 0;
  for (std::uint64_t step = 1; step <= config.max_steps; ++step) {
    for (std::size_t i = 0; i < config.batch_size; ++i)
      batch[i] = dataset.train[rng.next_below(dataset.train.size())];

    const double loss =
        train_step(params, opt, batch, dataset, config, rng, ws, threads);
    if (!std::isfinite(loss)) {
      const std::string dump =
          (fs::path(out_dir) / "diverged_batch.txt").string();
      dump_batch(dump, batch, dataset, step);
      throw std::runtime_error("non-finite loss at step " +
                               std::to_string(step) +
                               "; offending batch dumped to " + dump);
    }
    interval_loss += loss;
    interval_n += 1;

    if (step % config.validation_interval == 0 || step == config.max_steps) {
      const EvalResult ev =
          evaluate_split(params, dataset, Split::Valid, eval_opts);
      char row[256];
      std::snprintf(row, sizeof(row), "%llu,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                    static_cast<unsigned long long>(step),
                    interval_loss / static_cast<double>(interval_n),
                    ev.both.mrr, ev.both.h1, ev.both.h3, ev.both.h10);
      metrics << row;
      metrics.flush();
      interval_loss = 0.0;
      interval_n = 0;
      if (ev.both.mrr > best_mrr) {
        best_mrr = ev.both.mrr;
        save_checkpoint(result.checkpoint_base, params, config.norm,
                        config.ablation, step);
      }
    }
  }

  result.best_valid_mrr = best_mrr < 0.0 ? 0.0 : best_mrr;
  result.steps = config.max_steps;
  return result;
}

}  // namespace sectore
