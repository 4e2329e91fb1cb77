// Command-line entry point: dataset generation, training, filtered
// link-prediction evaluation, checkpoint analysis and the acceptance
// selftest. Exit codes: 0 success, 1 usage error, 2 runtime error.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sectore/analysis.hpp"
#include "sectore/checkpoint.hpp"
#include "sectore/dataset.hpp"
#include "sectore/evaluate.hpp"
#include "sectore/selftest.hpp"
#include "sectore/synthetic.hpp"
#include "sectore/trainer.hpp"

namespace {

using namespace sectore;

EntityId resolve_entity(const Vocabulary& vocab, const std::string& token) {
  if (auto id = vocab.entity_id(token)) return *id;
  try {
    const int id = std::stoi(token);
    if (id >= 0 && static_cast<std::size_t>(id) < vocab.n_entities())
      return static_cast<EntityId>(id);
  } catch (...) {
  }
  throw std::runtime_error("unknown entity: " + token);
}

RelationId resolve_relation(const Vocabulary& vocab, const std::string& token) {
  if (auto id = vocab.relation_id(token)) return *id;
  try {
    const int id = std::stoi(token);
    if (id >= 0 && static_cast<std::size_t>(id) < vocab.n_relations())
      return static_cast<RelationId>(id);
  } catch (...) {
  }
  throw std::runtime_error("unknown relation: " + token);
}

std::vector<std::string> split_commas(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void check_checkpoint_matches(const Checkpoint& ck, const Dataset& ds) {
  if (ck.params.n_entities() != ds.n_entities() ||
      ck.params.n_relations() != ds.n_relations()) {
    throw std::runtime_error(
        "checkpoint/dataset mismatch: checkpoint holds " +
        std::to_string(ck.params.n_entities()) + " entities / " +
        std::to_string(ck.params.n_relations()) + " relations, dataset has " +
        std::to_string(ds.n_entities()) + " / " +
        std::to_string(ds.n_relations()));
  }
}

void print_metrics_table(std::ostream& out, const EvalResult& res) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-6s %10s %8s %8s %8s %10s\n", "side",
                "MRR", "H@1", "H@3", "H@10", "queries");
  out << buf;
  for (const MetricsReport* m : {&res.both, &res.head, &res.tail}) {
    std::snprintf(buf, sizeof(buf), "%-6s %10.4f %8.4f %8.4f %8.4f %10zu\n",
                  m->side.c_str(), m->mrr, m->h1, m->h3, m->h10, m->n_queries);
    out << buf;
  }
}

int run(int argc, char** argv) {
  CLI::App app{"SectorE: knowledge-graph embeddings with annular-sector "
               "relation regions"};
  app.require_subcommand(1);
  app.fallthrough();  // --threads may follow the subcommand
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0 = hardware concurrency); results do not "
                 "depend on it");

  // --- gen -----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic pattern KG");
  std::string gen_pattern, gen_out;
  std::size_t gen_entities = 100, gen_facts = 200;
  double gen_holdout = 0.2;
  std::uint64_t gen_seed = 7;
  gen->add_option("--pattern", gen_pattern,
                  "symmetry|anti-symmetry|inversion|subsumption|intersection|"
                  "mutual-exclusion")
      ->required();
  gen->add_option("--entities", gen_entities, "entity count (>= 4)");
  gen->add_option("--facts", gen_facts, "base facts");
  gen->add_option("--holdout", gen_holdout, "held-out fraction in (0,1)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  // --- train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train a model");
  std::string train_config, train_data, train_out, train_resume;
  TrainConfig overrides;
  train->add_option("--config", train_config, "JSON config file");
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--out", train_out, "output directory")->required();
  train->add_option("--resume", train_resume, "checkpoint to continue from");
  auto* o_dim = train->add_option("--dimension", overrides.dimension);
  auto* o_batch = train->add_option("--batch-size", overrides.batch_size);
  auto* o_negs = train->add_option("--negatives", overrides.n_negatives);
  auto* o_gamma = train->add_option("--gamma", overrides.gamma);
  auto* o_alpha = train->add_option("--alpha", overrides.alpha);
  auto* o_beta = train->add_option("--beta", overrides.beta);
  auto* o_lr = train->add_option("--lr", overrides.learning_rate);
  auto* o_steps = train->add_option("--steps", overrides.max_steps);
  auto* o_vi = train->add_option("--valid-interval",
                                 overrides.validation_interval);
  auto* o_seed = train->add_option("--seed", overrides.seed);
  std::string train_norm;
  auto* o_norm = train->add_option("--norm", train_norm, "L1 or L2");
  auto* o_nomod = train->add_flag("--no-modulus", "ablate the modulus part");
  auto* o_nophase = train->add_flag("--no-phase", "ablate the phase part");
  auto* o_nobump = train->add_flag("--no-bump",
                                   "ablate the transformational bump");

  // --- eval ----------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "filtered link-prediction metrics");
  std::string eval_ck, eval_data, eval_split = "test", eval_json;
  bool eval_per_relation = false;
  eval->add_option("--checkpoint", eval_ck, "checkpoint base path")->required();
  eval->add_option("--data", eval_data, "dataset directory")->required();
  eval->add_option("--split", eval_split, "valid or test")
      ->check(CLI::IsMember({"valid", "test"}));
  eval->add_flag("--per-relation", eval_per_relation,
                 "append a per-relation breakdown");
  eval->add_option("--json", eval_json, "also write the report as JSON here");

  // --- analyze ---------------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "inspect a trained checkpoint");
  analyze->require_subcommand(1);

  auto* areas = analyze->add_subcommand("areas", "sector areas per relation");
  std::string areas_ck, areas_data, areas_json;
  double areas_tau = 1.2;
  areas->add_option("--checkpoint", areas_ck)->required();
  areas->add_option("--data", areas_data, "dataset directory (names)")
      ->required();
  areas->add_option("--tau", areas_tau, "cardinality threshold (> 1)");
  areas->add_option("--json", areas_json, "also write rows as JSON here");

  auto* patterns = analyze->add_subcommand(
      "patterns", "check a relation-pattern region condition");
  std::string pat_ck, pat_data, pat_name, pat_relations;
  double pat_eps = 1e-6;
  patterns->add_option("--checkpoint", pat_ck)->required();
  patterns->add_option("--data", pat_data, "dataset directory (names)")
      ->required();
  patterns->add_option("--pattern", pat_name, "pattern name")->required();
  patterns->add_option("--relations", pat_relations,
                       "comma-separated relation names or ids")
      ->required();
  patterns->add_option("--epsilon", pat_eps, "comparison tolerance");

  auto* expo = analyze->add_subcommand("export",
                                       "polar coordinates of entities as CSV");
  std::string exp_ck, exp_data, exp_entities, exp_contexts, exp_out = "-";
  expo->add_option("--checkpoint", exp_ck)->required();
  expo->add_option("--data", exp_data, "dataset directory (names)")->required();
  expo->add_option("--entities", exp_entities,
                   "comma-separated entity names or ids")
      ->required();
  expo->add_option("--contexts", exp_contexts,
                   "bump partners, same length as --entities");
  expo->add_option("--out", exp_out, "CSV path or - for stdout");

  // --- selftest --------------------------------------------------------------
  auto* selftest_cmd =
      app.add_subcommand("selftest", "run the acceptance property suite");
  bool st_scaled = false;
  std::string st_data_dir = "data";
  selftest_cmd->add_flag("--scaled", st_scaled,
                         "include the long reduced-budget WN18RR run");
  selftest_cmd->add_option("--data-dir", st_data_dir,
                           "benchmark dataset directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  if (gen->parsed()) {
    const auto kg = generate_pattern_kg(pattern_from_name(gen_pattern),
                                        gen_entities, gen_facts, gen_holdout,
                                        gen_seed);
    save_synthetic(gen_out, kg);
    std::cout << "wrote " << gen_out << ": train " << kg.dataset.train.size()
              << ", valid " << kg.dataset.valid.size() << ", test "
              << kg.dataset.test.size();
    if (!kg.entailed_false.empty())
      std::cout << ", entailed-false " << kg.entailed_false.size();
    std::cout << "\n";
    return 0;
  }

  if (train->parsed()) {
    TrainConfig cfg;
    if (!train_config.empty()) cfg = TrainConfig::from_json_file(train_config);
    if (*o_dim) cfg.dimension = overrides.dimension;
    if (*o_batch) cfg.batch_size = overrides.batch_size;
    if (*o_negs) cfg.n_negatives = overrides.n_negatives;
    if (*o_gamma) cfg.gamma = overrides.gamma;
    if (*o_alpha) cfg.alpha = overrides.alpha;
    if (*o_beta) cfg.beta = overrides.beta;
    if (*o_lr) cfg.learning_rate = overrides.learning_rate;
    if (*o_steps) cfg.max_steps = overrides.max_steps;
    if (*o_vi) cfg.validation_interval = overrides.validation_interval;
    if (*o_seed) cfg.seed = overrides.seed;
    if (*o_norm) cfg.norm = norm_from_name(train_norm);
    if (*o_nomod) cfg.ablation.use_modulus = false;
    if (*o_nophase) cfg.ablation.use_phase = false;
    if (*o_nobump) cfg.ablation.use_bump = false;
    cfg.validate();

    const Dataset ds = load_dataset(train_data);
    TrainResult res;
    if (!train_resume.empty()) {
      const Checkpoint ck = load_checkpoint(train_resume);
      check_checkpoint_matches(ck, ds);
      res = run_training(ds, cfg, train_out, threads, &ck.params);
    } else {
      res = run_training(ds, cfg, train_out, threads);
    }
    std::cout << "best checkpoint: " << res.checkpoint_base
              << " (valid MRR " << res.best_valid_mrr << ")\nmetrics log: "
              << res.metrics_path << "\n";
    return 0;
  }

  if (eval->parsed()) {
    const Checkpoint ck = load_checkpoint(eval_ck);
    const Dataset ds = load_dataset(eval_data);
    check_checkpoint_matches(ck, ds);
    EvalOptions opts;
    opts.ablation = ck.ablation;
    opts.norm = ck.norm;
    opts.threads = threads;
    opts.per_relation = eval_per_relation;
    const Split split = eval_split == "valid" ? Split::Valid : Split::Test;
    const EvalResult res = evaluate_split(ck.params, ds, split, opts);

    print_metrics_table(std::cout, res);
    if (eval_per_relation) {
      std::cout << "\nper relation:\n";
      char buf[200];
      for (const auto& [rel, m] : res.per_relation) {
        std::snprintf(buf, sizeof(buf), "%-24s %10.4f %8.4f %8.4f %8.4f %8zu\n",
                      ds.vocab.relation_name(rel).c_str(), m.mrr, m.h1, m.h3,
                      m.h10, m.count);
        std::cout << buf;
      }
    }
    std::cout << "\n" << metrics_to_json(res.both) << "\n";
    if (!eval_json.empty()) {
      std::ofstream out(eval_json, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + eval_json);
      out << metrics_to_json(res.both) << "\n";
    }
    return 0;
  }

  if (areas->parsed()) {
    const Checkpoint ck = load_checkpoint(areas_ck);
    const Dataset ds = load_dataset(areas_data);
    check_checkpoint_matches(ck, ds);
    const auto rows = area_report(ck.params, ds.vocab);
    print_area_report(std::cout, rows);
    std::cout << "\ncardinality at tau=" << areas_tau << ":\n";
    for (const auto& row : rows) {
      const char* label =
          (row.head_area > 0 && row.tail_area > 0)
              ? cardinality_name(
                    classify_cardinality(row.head_area, row.tail_area, areas_tau))
              : "degenerate";
      std::cout << "  " << row.relation << ": " << label << "\n";
    }
    if (!areas_json.empty()) {
      std::ofstream out(areas_json, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + areas_json);
      out << "[";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%s{\"relation\":\"%s\",\"head_area\":%.17g,"
                      "\"tail_area\":%.17g}",
                      i ? "," : "", rows[i].relation.c_str(),
                      rows[i].head_area, rows[i].tail_area);
        out << buf;
      }
      out << "]\n";
    }
    return 0;
  }

  if (patterns->parsed()) {
    const Checkpoint ck = load_checkpoint(pat_ck);
    const Dataset ds = load_dataset(pat_data);
    check_checkpoint_matches(ck, ds);
    std::vector<RelationId> rels;
    for (const auto& tok : split_commas(pat_relations))
      rels.push_back(resolve_relation(ds.vocab, tok));
    const PatternCheck res =
        check_pattern(ck.params, pattern_from_name(pat_name), rels, pat_eps);
    for (const auto& cond : res.conditions)
      std::cout << (cond.holds ? "  [ok]  " : "  [no]  ") << cond.description
                << "\n";
    std::cout << pat_name << ": " << (res.holds ? "holds" : "does not hold")
              << " at epsilon " << pat_eps << "\n";
    return 0;
  }

  if (expo->parsed()) {
    const Checkpoint ck = load_checkpoint(exp_ck);
    const Dataset ds = load_dataset(exp_data);
    check_checkpoint_matches(ck, ds);
    std::vector<EntityId> ents, ctxs;
    for (const auto& tok : split_commas(exp_entities))
      ents.push_back(resolve_entity(ds.vocab, tok));
    for (const auto& tok : split_commas(exp_contexts))
      ctxs.push_back(resolve_entity(ds.vocab, tok));
    if (exp_out == "-") {
      export_polar_csv(ck.params, ents, ctxs, std::cout);
    } else {
      std::ofstream out(exp_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + exp_out);
      export_polar_csv(ck.params, ents, ctxs, out);
    }
    return 0;
  }

  if (selftest_cmd->parsed()) {
    selftest::Options opts;
    opts.run_scaled = st_scaled;
    opts.data_dir = st_data_dir;
    opts.threads = threads;
    const auto results = selftest::run_all(opts);
    selftest::print_results(std::cout, results);
    return selftest::all_passed(results) ? 0 : 2;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
