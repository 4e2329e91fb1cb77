#include "sectore/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <ostream>
#include <set>

#include "sectore/analysis.hpp"
#include "sectore/checkpoint.hpp"
#include "sectore/evaluate.hpp"
#include "sectore/geometry.hpp"
#include "sectore/gradients.hpp"
#include "sectore/model.hpp"
#include "sectore/rng.hpp"
#include "sectore/sampling.hpp"
#include "sectore/synthetic.hpp"
#include "sectore/trainer.hpp"

namespace sectore::selftest {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

fs::path scratch_dir(const char* tag) {
  auto p = fs::temp_directory_path() /
           ("sectore_selftest_" + std::to_string(::getpid()) + "_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------
// Criterion 1: the two branches of each distance function meet at the branch
// boundary for random sectors.

CriterionResult c1_geometry_continuity(const Options& opt) {
  CriterionResult r{1, "geometry-continuity"};
  const auto start = Clock::now();
  Rng rng(opt.seed, 101);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double s = rng.uniform(0.0, 5.0);
    const double w = s + 1.0;
    const double at = 0.5 * s;  // dm at the modulus boundary
    const double gap_m =
        std::fabs(at / w - (at * w - 0.5 * (w - 1.0) * (w - 1.0 / w)));

    const double delta = rng.uniform(0.02, 10.0);
    const double gap_p =
        std::fabs(0.5 / delta - (0.5 * delta - 0.5 * (delta - 1.0 / delta)));
    worst = std::max({worst, gap_m, gap_p});
  }
  r.seconds = seconds_since(start);
  const bool ok = worst <= 1e-9 && r.seconds < 1.0;
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = fmt("max branch gap %.3g over 10^4 sectors", worst);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 2: analytic gradients against central finite differences.

double loss_value(const ModelParams& params, const Triple& pos,
                  std::span<const Triple> negs, std::span<const double> w,
                  double gamma, const AblationConfig& abl, Norm norm) {
  double loss = softplus(-(gamma + score_triple(params, pos, abl, norm)));
  for (std::size_t i = 0; i < negs.size(); ++i)
    loss += w[i] * softplus(score_triple(params, negs[i], abl, norm) + gamma);
  return loss;
}

struct GradConfig {
  ModelParams params{1, 1, 1, 0.0};
  Triple pos;
  std::vector<Triple> negs;
  std::vector<double> weights;
  double gamma = 1.0;
  AblationConfig abl;
  Norm norm = Norm::L1;
};

bool near_branch_boundary(const GradConfig& c, double margin) {
  const auto& p = c.params;
  std::vector<Triple> all = c.negs;
  all.push_back(c.pos);
  for (const Triple& t : all) {
    for (int side = 0; side < 2; ++side) {
      const EntityId i = side == 0 ? t.head : t.tail;
      const EntityId j = side == 0 ? t.tail : t.head;
      const auto ts = static_cast<TripleSide>(side);
      for (std::size_t k = 0; k < p.dim(); ++k) {
        const double raw_bm = p.entity_raw(i, 0)[k];
        const double raw_bp = p.entity_raw(i, 1)[k];
        const double raw_um = p.entity_raw(j, 2)[k];
        const double raw_up = p.entity_raw(j, 3)[k];
        const double raw_c = p.relation_raw(t.relation, ts, 0)[k];
        const double raw_s = p.relation_raw(t.relation, ts, 1)[k];
        const double raw_th = p.relation_raw(t.relation, ts, 2)[k];
        const double raw_a = p.relation_raw(t.relation, ts, 3)[k];
        for (double raw : {raw_bm, raw_um, raw_c, raw_s, raw_a})
          if (std::fabs(raw) < margin) return true;
        const double m = c.abl.use_bump
                             ? std::fabs(raw_bm) * std::fabs(raw_um)
                             : std::fabs(raw_bm);
        const double cc = std::fabs(raw_c);
        const double s = std::fabs(raw_s);
        if (std::fabs(std::fabs(m - cc) - 0.5 * s) < margin) return true;
        if (std::fabs(m - cc) < margin) return true;
        const double ph = c.abl.use_bump ? wrap_angle(raw_bp + raw_up)
                                         : wrap_angle(raw_bp);
        const double sg = std::fabs(std::sin(0.5 * (ph - wrap_angle(raw_th))));
        if (std::fabs(sg - 0.5) < margin) return true;
        if (sg < margin) return true;
      }
    }
  }
  return false;
}

CriterionResult c2_gradient_correctness(const Options& opt) {
  CriterionResult r{2, "gradient-correctness"};
  const auto start = Clock::now();
  Rng rng(opt.seed, 102);
  const double h = 1e-5;
  int accepted = 0;
  double worst_rel = 0.0;
  std::size_t coords = 0;
  bool ok = true;

  for (int trial = 0; accepted < 100 && trial < 2000; ++trial) {
    GradConfig c;
    const std::size_t n_ent = 4 + rng.next_below(5);
    const std::size_t n_rel = 1 + rng.next_below(3);
    const std::size_t d = 1 + rng.next_below(8);
    c.params = ModelParams::init_random(n_ent, n_rel, d,
                                        rng.uniform(0.1, 1.0), rng.next_u64());
    c.params.raw_lambda1() = rng.uniform(-0.5, 0.5);
    c.params.raw_lambda2() = rng.uniform(-0.5, 0.5);
    auto rnd_triple = [&] {
      return Triple{static_cast<EntityId>(rng.next_below(n_ent)),
                    static_cast<RelationId>(rng.next_below(n_rel)),
                    static_cast<EntityId>(rng.next_below(n_ent))};
    };
    c.pos = rnd_triple();
    const std::size_t n_neg = 1 + rng.next_below(4);
    double sum = 0.0;
    for (std::size_t i = 0; i < n_neg; ++i) {
      c.negs.push_back(rnd_triple());
      c.weights.push_back(rng.uniform(0.1, 1.0));
      sum += c.weights.back();
    }
    for (double& w : c.weights) w /= sum;
    c.gamma = rng.uniform(0.5, 4.0);
    switch (trial % 4) {
      case 0: break;
      case 1: c.abl.use_bump = false; break;
      case 2: c.abl.use_modulus = false; break;
      case 3: c.abl.use_phase = false; break;
    }
    c.norm = trial % 2 == 0 ? Norm::L1 : Norm::L2;
    if (near_branch_boundary(c, 1e-4)) continue;
    ++accepted;

    const auto lg = loss_gradients(c.params, c.pos, c.negs, c.weights, c.gamma,
                                   c.abl, c.norm);
    auto flat = c.params.flat();
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double saved = flat[i];
      flat[i] = saved + h;
      const double up =
          loss_value(c.params, c.pos, c.negs, c.weights, c.gamma, c.abl, c.norm);
      flat[i] = saved - h;
      const double dn =
          loss_value(c.params, c.pos, c.negs, c.weights, c.gamma, c.abl, c.norm);
      flat[i] = saved;
      const double fd = (up - dn) / (2 * h);
      const double ana = lg.grad[i];
      const double err = std::fabs(ana - fd);
      const double scale = std::max(std::fabs(ana), std::fabs(fd));
      ++coords;
      if (err > 1e-7) {
        worst_rel = std::max(worst_rel, err / scale);
        if (err / scale > 1e-4) ok = false;
      }
    }
  }
  r.seconds = seconds_since(start);
  ok = ok && accepted >= 100 && r.seconds < 30.0;
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = fmt("%d configs, %zu coordinates, worst rel err %.3g", accepted,
                 coords, worst_rel);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 3: evaluate_split against an independent brute-force evaluator.

struct BruteForce {
  std::vector<double> ranks;
  double mrr = 0, h1 = 0, h3 = 0, h10 = 0;
};

BruteForce brute_force_eval(const ModelParams& params, const Dataset& ds,
                            Split split, const AblationConfig& abl, Norm norm) {
  std::set<std::tuple<int, int, int>> known;
  for (const auto* s : {&ds.train, &ds.valid, &ds.test})
    for (const Triple& t : *s) known.insert({t.head, t.relation, t.tail});
  BruteForce out;
  const auto n = static_cast<EntityId>(ds.n_entities());
  for (const Triple& t : ds.split(split)) {
    for (int side = 0; side < 2; ++side) {
      const double s_true = score_triple(params, t, abl, norm);
      double greater = 0, equal = 0;
      for (EntityId e = 0; e < n; ++e) {
        Triple cand = t;
        if (side == 0) {
          if (e == t.tail) continue;
          cand.tail = e;
        } else {
          if (e == t.head) continue;
          cand.head = e;
        }
        if (known.count({cand.head, cand.relation, cand.tail})) continue;
        const double s = score_triple(params, cand, abl, norm);
        if (s > s_true) greater += 1;
        if (s == s_true) equal += 1;
      }
      out.ranks.push_back(1.0 + greater + equal / 2.0);
    }
  }
  for (double rank : out.ranks) {
    out.mrr += 1.0 / rank;
    out.h1 += rank <= 1;
    out.h3 += rank <= 3;
    out.h10 += rank <= 10;
  }
  const double q = static_cast<double>(out.ranks.size());
  out.mrr /= q;
  out.h1 /= q;
  out.h3 /= q;
  out.h10 /= q;
  return out;
}

Dataset random_kg(Rng& rng, std::size_t n_entities, std::size_t n_relations,
                  std::size_t n_train, std::size_t n_valid,
                  std::size_t n_test) {
  Dataset ds;
  for (std::size_t i = 0; i < n_entities; ++i)
    ds.vocab.intern_entity("e" + std::to_string(i));
  for (std::size_t i = 0; i < n_relations; ++i)
    ds.vocab.intern_relation("r" + std::to_string(i));
  std::set<std::tuple<int, int, int>> seen;
  auto draw = [&](std::vector<Triple>& split, std::size_t count) {
    while (split.size() < count) {
      Triple t{static_cast<EntityId>(rng.next_below(n_entities)),
               static_cast<RelationId>(rng.next_below(n_relations)),
               static_cast<EntityId>(rng.next_below(n_entities))};
      if (t.head == t.tail) continue;
      if (!seen.insert({t.head, t.relation, t.tail}).second) continue;
      split.push_back(t);
    }
  };
  draw(ds.train, n_train);
  draw(ds.valid, n_valid);
  draw(ds.test, n_test);
  ds.rebuild_indexes();
  return ds;
}

CriterionResult c3_ranking_oracle(const Options& opt) {
  CriterionResult r{3, "ranking-oracle-equivalence"};
  const auto start = Clock::now();
  Rng rng(opt.seed, 103);
  Dataset ds = random_kg(rng, 50, 3, 150, 25, 25);
  auto params = ModelParams::init_random(50, 3, 4, 0.5, rng.next_u64());

  bool ok = true;
  std::string why;
  for (int variant = 0; variant < 2 && ok; ++variant) {
    const Norm norm = variant == 0 ? Norm::L1 : Norm::L2;
    AblationConfig abl;
    const BruteForce brute = brute_force_eval(params, ds, Split::Test, abl, norm);
    EvalOptions opts;
    opts.norm = norm;
    opts.threads = opt.threads;
    const EvalResult res = evaluate_split(params, ds, Split::Test, opts);
    if (res.both.mrr != brute.mrr || res.both.h1 != brute.h1 ||
        res.both.h3 != brute.h3 || res.both.h10 != brute.h10) {
      ok = false;
      why = fmt("metric mismatch (mrr %.17g vs %.17g)", res.both.mrr, brute.mrr);
    }
    for (std::size_t i = 0; i < ds.test.size() && ok; ++i) {
      const Triple& t = ds.test[i];
      for (int side = 0; side < 2 && ok; ++side) {
        const auto q_side = side == 0 ? QuerySide::Tail : QuerySide::Head;
        const EntityId fixed = side == 0 ? t.head : t.tail;
        const EntityId truth = side == 0 ? t.tail : t.head;
        const auto& pool = side == 0
                               ? ds.filter_all.tails(t.head, t.relation)
                               : ds.filter_all.heads(t.relation, t.tail);
        std::vector<EntityId> filt;
        for (EntityId e : pool)
          if (e != truth) filt.push_back(e);
        const auto scores =
            score_candidates(params, t.relation, fixed, q_side, abl, norm);
        const double rank = filtered_rank(scores, truth, filt);
        if (rank != brute.ranks[2 * i + side]) {
          ok = false;
          why = fmt("rank mismatch at triple %zu side %d: %g vs %g", i, side,
                    rank, brute.ranks[2 * i + side]);
        }
      }
    }
  }
  r.seconds = seconds_since(start);
  ok = ok && r.seconds < 5.0;
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = ok ? fmt("%zu ranks identical under L1 and L2", 2 * ds.test.size())
                : why;
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: self-adversarial weight distribution.

CriterionResult c4_sampling_distribution(const Options& opt) {
  CriterionResult r{4, "sampling-distribution"};
  const auto start = Clock::now();
  Rng rng(opt.seed, 104);
  bool ok = true;
  std::string why;
  double worst_sum = 0.0;

  for (int i = 0; i < 1000 && ok; ++i) {
    std::vector<double> s(1 + rng.next_below(128));
    for (double& x : s) x = rng.uniform(-300.0, 0.0);
    const double alpha = rng.uniform(0.0, 2.0);
    const auto w = adversarial_weights(s, alpha);
    double sum = 0.0;
    for (double x : w) sum += x;
    worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
    if (std::fabs(sum - 1.0) > 1e-12) {
      ok = false;
      why = fmt("weight sum off by %.3g", std::fabs(sum - 1.0));
    }
  }

  // alpha = 0 reduces to uniform, exactly
  for (std::size_t n : {1u, 2u, 7u, 64u}) {
    std::vector<double> s(n);
    for (double& x : s) x = rng.uniform(-50.0, 0.0);
    for (double x : adversarial_weights(s, 0.0)) {
      if (x != 1.0 / static_cast<double>(n)) {
        ok = false;
        why = "alpha=0 not exactly uniform";
      }
    }
  }

  // exact invariance under exactly-representable constant shifts: scores on
  // the 1/64 grid stay on it after shifting by these constants
  for (int i = 0; i < 100 && ok; ++i) {
    std::vector<double> s(1 + rng.next_below(16));
    for (double& x : s)
      x = -static_cast<double>(rng.next_below(640)) / 64.0;
    for (double shift : {4.0, -8.0, 0.25, 1024.0}) {
      std::vector<double> shifted;
      for (double x : s) shifted.push_back(x + shift);
      const auto w1 = adversarial_weights(s, 0.75);
      const auto w2 = adversarial_weights(shifted, 0.75);
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (w1[k] != w2[k]) {
          ok = false;
          why = "constant shift changed a weight";
        }
      }
    }
  }

  r.seconds = seconds_since(start);
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = ok ? fmt("worst |sum-1| = %.3g; uniform and shift checks exact",
                      worst_sum)
                : why;
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: benchmark loader counts.

struct BenchSpec {
  const char* name;
  std::vector<const char*> dirs;
  std::size_t entities, relations, train, valid, test;
};

CriterionResult c5_data_fidelity(const Options& opt) {
  CriterionResult r{5, "data-fidelity"};
  const auto start = Clock::now();
  const std::vector<BenchSpec> specs{
      {"FB15k-237", {"FB15k-237", "fb15k-237", "FB15K-237"},
       14541, 237, 272115, 17535, 20466},
      {"WN18RR", {"WN18RR", "wn18rr"}, 40943, 11, 86835, 3034, 3134},
      {"YAGO3-10", {"YAGO3-10", "yago3-10"}, 123182, 37, 1079040, 5000, 5000},
  };
  bool any_found = false, ok = true;
  std::string detail;
  for (const auto& spec : specs) {
    fs::path dir;
    for (const char* d : spec.dirs) {
      const fs::path cand = fs::path(opt.data_dir) / d;
      if (fs::exists(cand / "train.txt")) {
        dir = cand;
        break;
      }
    }
    if (dir.empty()) {
      detail += fmt("%s: not under %s; ", spec.name, opt.data_dir.c_str());
      continue;
    }
    any_found = true;
    try {
      const Dataset ds = load_dataset(dir.string());
      const bool match = ds.n_entities() == spec.entities &&
                         ds.n_relations() == spec.relations &&
                         ds.train.size() == spec.train &&
                         ds.valid.size() == spec.valid &&
                         ds.test.size() == spec.test;
      if (!match) {
        ok = false;
        detail += fmt(
            "%s: got %zu/%zu/%zu/%zu/%zu, want %zu/%zu/%zu/%zu/%zu; ",
            spec.name, ds.n_entities(), ds.n_relations(), ds.train.size(),
            ds.valid.size(), ds.test.size(), spec.entities, spec.relations,
            spec.train, spec.valid, spec.test);
      } else {
        detail += fmt("%s ok; ", spec.name);
      }
    } catch (const std::exception& e) {
      ok = false;
      detail += fmt("%s: %s; ", spec.name, e.what());
    }
  }
  r.seconds = seconds_since(start);
  if (!any_found) {
    r.status = CriterionResult::Status::Skip;
    r.detail = "no benchmark directory present under '" + opt.data_dir +
               "' (expects <name>/train.txt etc.)";
  } else {
    r.status = ok ? CriterionResult::Status::Pass
                  : CriterionResult::Status::Fail;
    r.detail = detail;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Criteria 6-7: desk-scale pattern learning and the bump ablation direction.

struct DeskRun {
  double test_h1 = 0.0;
  double test_mrr = 0.0;
  double seconds = 0.0;
};

DeskRun desk_train_eval(const SyntheticKg& kg, const Options& opt,
                        const char* tag, bool use_bump) {
  const auto start = Clock::now();
  TrainConfig cfg;  // documented desk-scale defaults: d=50, 2000 steps
  cfg.ablation.use_bump = use_bump;
  const fs::path out = scratch_dir(tag);
  const TrainResult res =
      run_training(kg.dataset, cfg, out.string(), opt.threads);
  const Checkpoint best = load_checkpoint(res.checkpoint_base);
  EvalOptions eopts;
  eopts.ablation = best.ablation;
  eopts.norm = best.norm;
  eopts.threads = opt.threads;
  const EvalResult ev =
      evaluate_split(best.params, kg.dataset, Split::Test, eopts);
  DeskRun run;
  run.test_h1 = ev.both.h1;
  run.test_mrr = ev.both.mrr;
  run.seconds = seconds_since(start);
  fs::remove_all(out);
  return run;
}

CriterionResult c6_pattern_learning(const Options& opt, DeskRun& inversion_full) {
  CriterionResult r{6, "pattern-learning-desk-scale"};
  const auto start = Clock::now();
  const auto sym = generate_pattern_kg(Pattern::Symmetry, 100, 200, 0.2, 7);
  const DeskRun s = desk_train_eval(sym, opt, "c6_sym", true);
  const auto inv = generate_pattern_kg(Pattern::Inversion, 100, 200, 0.2, 7);
  inversion_full = desk_train_eval(inv, opt, "c6_inv", true);
  r.seconds = seconds_since(start);
  const bool ok = s.test_h1 >= 0.90 && inversion_full.test_h1 >= 0.90 &&
                  s.seconds < 180.0 && inversion_full.seconds < 180.0;
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = fmt("symmetry H@1 %.3f (%.0f s), inversion H@1 %.3f (%.0f s)",
                 s.test_h1, s.seconds, inversion_full.test_h1,
                 inversion_full.seconds);
  return r;
}

CriterionResult c7_ablation_direction(const Options& opt,
                                      const DeskRun& inversion_full) {
  CriterionResult r{7, "ablation-direction-desk-scale"};
  const auto start = Clock::now();
  const auto inv = generate_pattern_kg(Pattern::Inversion, 100, 200, 0.2, 7);
  const DeskRun nobump = desk_train_eval(inv, opt, "c7_nobump", false);
  r.seconds = seconds_since(start);
  const bool ok = nobump.test_mrr < inversion_full.test_mrr;
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = fmt("full MRR %.3f vs no-bump MRR %.3f", inversion_full.test_mrr,
                 nobump.test_mrr);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: reduced-budget WN18RR sanity floor (opt-in, hours on CPU).

CriterionResult c8_scaled_benchmark(const Options& opt) {
  CriterionResult r{8, "scaled-benchmark-wn18rr"};
  if (!opt.run_scaled) {
    r.status = CriterionResult::Status::Skip;
    r.detail = "optional long-running criterion; enable with --scaled";
    return r;
  }
  fs::path dir;
  for (const char* d : {"WN18RR", "wn18rr"}) {
    const fs::path cand = fs::path(opt.data_dir) / d;
    if (fs::exists(cand / "train.txt")) dir = cand;
  }
  if (dir.empty()) {
    r.status = CriterionResult::Status::Skip;
    r.detail = "WN18RR not found under '" + opt.data_dir + "'";
    return r;
  }
  const auto start = Clock::now();
  const Dataset ds = load_dataset(dir.string());
  TrainConfig cfg;
  cfg.dimension = 200;
  cfg.gamma = 6.0;
  cfg.alpha = 1.0;
  cfg.batch_size = 512;
  cfg.n_negatives = 256;
  cfg.max_steps = 100000;
  cfg.validation_interval = 10000;
  const fs::path out = scratch_dir("c8_wn18rr");
  const TrainResult res = run_training(ds, cfg, out.string(), opt.threads);
  const Checkpoint best = load_checkpoint(res.checkpoint_base);
  EvalOptions eopts;
  eopts.ablation = best.ablation;
  eopts.norm = best.norm;
  eopts.threads = opt.threads;
  const EvalResult ev = evaluate_split(best.params, ds, Split::Test, eopts);
  r.seconds = seconds_since(start);
  r.status = ev.both.mrr >= 0.40 ? CriterionResult::Status::Pass
                                 : CriterionResult::Status::Fail;
  r.detail = fmt("test MRR %.4f H@10 %.4f after 100k steps", ev.both.mrr,
                 ev.both.h10);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 9: pattern predicates against a dense-sampling membership oracle
// plus hand-built satisfying/violating parameters.

// Membership from first principles, written against the derived bounds
// rather than sector_contains.
bool oracle_in_dim(const AnnularSector& s, std::size_t i, double modulus,
                   double phase) {
  const double u = s.mod_center[i] + 0.5 * s.mod_size[i];
  const double l = std::max(0.0, s.mod_center[i] - 0.5 * s.mod_size[i]);
  if (modulus < l || modulus > u) return false;
  const double half = 0.5 * std::min(s.arc_extra[i] + s.beta * kPi, kTwoPi);
  double diff = std::remainder(phase - s.phase_center[i], kTwoPi);
  return std::fabs(diff) <= half;
}

bool oracle_in(const AnnularSector& s, const std::vector<double>& modulus,
               const std::vector<double>& phase) {
  for (std::size_t i = 0; i < s.dim(); ++i)
    if (!oracle_in_dim(s, i, modulus[i], phase[i])) return false;
  return true;
}

struct OracleRelation {
  bool equal, a_subset_b, b_subset_a, disjoint;
};

OracleRelation sampled_relation(const AnnularSector& a, const AnnularSector& b,
                                std::size_t samples, Rng& rng) {
  const std::size_t d = a.dim();
  double mod_hi = 1.0;
  for (std::size_t i = 0; i < d; ++i)
    mod_hi = std::max({mod_hi, a.upper(i) * 1.2, b.upper(i) * 1.2});
  bool a_minus_b = false, b_minus_a = false, both = false;
  std::vector<double> m(d), p(d);
  for (std::size_t n = 0; n < samples; ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      const int mode = static_cast<int>(rng.next_below(4));
      const AnnularSector& src = (mode == 1) ? a : b;
      switch (mode) {
        case 0:
          m[i] = rng.uniform(0.0, mod_hi);
          p[i] = rng.uniform(0.0, kTwoPi);
          break;
        case 1:
        case 2:
          m[i] = rng.uniform(src.lower_clamped(i), src.upper(i));
          p[i] = wrap_angle(src.phase_center[i] +
                            rng.uniform(-src.arc_half_width(i),
                                        src.arc_half_width(i)));
          break;
        default: {
          const AnnularSector& s2 = rng.coin() ? a : b;
          m[i] = std::max(0.0, (rng.coin() ? s2.upper(i)
                                           : s2.lower_clamped(i)) +
                                   rng.uniform(-0.01, 0.01));
          const double edge =
              rng.coin() ? s2.arc_half_width(i) : -s2.arc_half_width(i);
          p[i] = wrap_angle(s2.phase_center[i] + edge + rng.uniform(-0.01, 0.01));
          break;
        }
      }
    }
    const bool in_a = oracle_in(a, m, p);
    const bool in_b = oracle_in(b, m, p);
    a_minus_b = a_minus_b || (in_a && !in_b);
    b_minus_a = b_minus_a || (in_b && !in_a);
    both = both || (in_a && in_b);
  }
  return {!a_minus_b && !b_minus_a, !a_minus_b, !b_minus_a, !both};
}

AnnularSector random_sector(Rng& rng, std::size_t d, double beta) {
  std::vector<double> c(d), s(d), th(d), a(d);
  for (std::size_t i = 0; i < d; ++i) {
    c[i] = rng.uniform(0.0, 3.0);
    s[i] = rng.uniform(0.0, 2.0);
    th[i] = rng.uniform(-10.0, 10.0);
    a[i] = rng.uniform(0.0, 3.0);
  }
  return sector_from_raw(c, s, th, a, beta);
}

bool margins_tight(const AnnularSector& a, const AnnularSector& b) {
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double dc =
        circular_distance(a.phase_center[i], b.phase_center[i]);
    for (double margin :
         {std::fabs(a.upper(i) - b.upper(i)),
          std::fabs(a.lower_clamped(i) - b.lower_clamped(i)),
          std::fabs(a.upper(i) - b.lower_clamped(i)),
          std::fabs(b.upper(i) - a.lower_clamped(i)),
          std::fabs(dc - (a.arc_half_width(i) + b.arc_half_width(i))),
          std::fabs(dc - std::fabs(a.arc_half_width(i) - b.arc_half_width(i))),
          std::fabs(a.arc_half_width(i) - kPi),
          std::fabs(b.arc_half_width(i) - kPi)}) {
      if (margin < 2e-2) return true;
    }
  }
  return false;
}

void set_sector(ModelParams& p, RelationId r, TripleSide side, double c,
                double s, double theta, double a) {
  for (double& x : p.relation_raw(r, side, 0)) x = c;
  for (double& x : p.relation_raw(r, side, 1)) x = s;
  for (double& x : p.relation_raw(r, side, 2)) x = theta;
  for (double& x : p.relation_raw(r, side, 3)) x = a;
}

void copy_sector(ModelParams& p, RelationId from, TripleSide fs, RelationId to,
                 TripleSide ts) {
  for (int comp = 0; comp < 4; ++comp) {
    auto src = p.relation_raw(from, fs, comp);
    auto dst = p.relation_raw(to, ts, comp);
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

CriterionResult c9_pattern_predicates(const Options& opt) {
  CriterionResult r{9, "pattern-predicates"};
  const auto start = Clock::now();
  Rng rng(opt.seed, 109);
  bool ok = true;
  std::string why;

  int pairs = 0, resampled = 0;
  while (pairs < 1000 && ok) {
    const std::size_t d = 1 + rng.next_below(3);
    const double beta = rng.uniform(0.0, 1.0);
    AnnularSector a = random_sector(rng, d, beta);
    AnnularSector b;
    switch (rng.next_below(4)) {
      case 0: b = random_sector(rng, d, beta); break;
      case 1: b = a; break;
      case 2:
        b = a;
        for (std::size_t i = 0; i < d; ++i) {
          b.mod_size[i] *= 0.5;
          b.arc_extra[i] *= 0.5;
        }
        break;
      default:
        b = a;
        for (std::size_t i = 0; i < d; ++i)
          b.mod_center[i] += a.upper(i) + 1.0 + b.mod_size[i];
        break;
    }
    if (margins_tight(a, b)) {
      ++resampled;
      continue;
    }
    ++pairs;
    const auto rep = sector_relation(a, b, 1e-6);
    const auto sam = sampled_relation(a, b, 10000, rng);
    if (rep.equal != sam.equal || rep.a_subset_b != sam.a_subset_b ||
        rep.b_subset_a != sam.b_subset_a || rep.disjoint != sam.disjoint) {
      ok = false;
      why = fmt("flag mismatch on pair %d (d=%zu)", pairs, d);
    }
  }

  // hand-built satisfying and violating parameters for all six conditions
  if (ok) {
    ModelParams p(2, 3, 2, 0.5);
    set_sector(p, 0, TripleSide::Head, 1.5, 0.5, 1.0, 0.4);
    copy_sector(p, 0, TripleSide::Head, 0, TripleSide::Tail);
    bool hand = check_pattern(p, Pattern::Symmetry, {0}).holds;
    hand = hand && !check_pattern(p, Pattern::AntiSymmetry, {0}).holds;

    set_sector(p, 0, TripleSide::Head, 1.0, 0.5, 0.0, 0.4);
    set_sector(p, 0, TripleSide::Tail, 3.0, 0.5, 0.0, 0.4);
    hand = hand && check_pattern(p, Pattern::AntiSymmetry, {0}).holds;
    hand = hand && !check_pattern(p, Pattern::Symmetry, {0}).holds;

    set_sector(p, 0, TripleSide::Head, 1.0, 0.6, 0.5, 0.3);
    set_sector(p, 0, TripleSide::Tail, 2.5, 0.4, 2.0, 0.6);
    copy_sector(p, 0, TripleSide::Head, 1, TripleSide::Tail);
    copy_sector(p, 0, TripleSide::Tail, 1, TripleSide::Head);
    hand = hand && check_pattern(p, Pattern::Inversion, {0, 1}).holds;
    copy_sector(p, 0, TripleSide::Head, 2, TripleSide::Head);
    copy_sector(p, 0, TripleSide::Tail, 2, TripleSide::Tail);
    hand = hand && !check_pattern(p, Pattern::Inversion, {0, 2}).holds;

    set_sector(p, 0, TripleSide::Head, 1.0, 0.4, 0.5, 0.2);
    set_sector(p, 0, TripleSide::Tail, 2.0, 0.4, 1.5, 0.2);
    set_sector(p, 1, TripleSide::Head, 1.0, 1.0, 0.5, 0.8);
    set_sector(p, 1, TripleSide::Tail, 2.0, 1.0, 1.5, 0.8);
    hand = hand && check_pattern(p, Pattern::Subsumption, {0, 1}).holds;
    hand = hand && !check_pattern(p, Pattern::Subsumption, {1, 0}).holds;

    set_sector(p, 0, TripleSide::Head, 1.0, 0.8, 0.5, 0.5);
    set_sector(p, 0, TripleSide::Tail, 1.0, 0.8, 0.5, 0.5);
    set_sector(p, 1, TripleSide::Head, 1.2, 0.8, 0.7, 0.5);
    set_sector(p, 1, TripleSide::Tail, 1.2, 0.8, 0.7, 0.5);
    set_sector(p, 2, TripleSide::Head, 1.1, 3.0, 0.6, 7.0);
    set_sector(p, 2, TripleSide::Tail, 1.1, 3.0, 0.6, 7.0);
    hand = hand && check_pattern(p, Pattern::Intersection, {0, 1, 2}).holds;
    set_sector(p, 2, TripleSide::Head, 9.0, 0.1, 3.5, 0.1);
    set_sector(p, 2, TripleSide::Tail, 9.0, 0.1, 3.5, 0.1);
    hand = hand && !check_pattern(p, Pattern::Intersection, {0, 1, 2}).holds;

    set_sector(p, 0, TripleSide::Head, 1.0, 0.4, 0.0, 0.3);
    set_sector(p, 0, TripleSide::Tail, 2.0, 0.4, 0.0, 0.3);
    set_sector(p, 1, TripleSide::Head, 4.0, 0.4, 0.0, 0.3);
    set_sector(p, 1, TripleSide::Tail, 2.0, 0.4, 0.0, 0.3);
    hand = hand && check_pattern(p, Pattern::MutualExclusion, {0, 1}).holds;
    copy_sector(p, 0, TripleSide::Head, 1, TripleSide::Head);
    hand = hand && !check_pattern(p, Pattern::MutualExclusion, {0, 1}).holds;

    if (!hand) {
      ok = false;
      why = "hand-constructed pattern check failed";
    }
  }

  r.seconds = seconds_since(start);
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = ok ? fmt("1000 sampled pairs agree (%d resampled as too tight); "
                      "all six hand-built conditions verified",
                      resampled)
                : why;
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 10: round-trips and thread-count invariance.

CriterionResult c10_round_trips(const Options& opt) {
  CriterionResult r{10, "round-trips"};
  const auto start = Clock::now();
  Rng rng(opt.seed, 110);
  bool ok = true;
  std::string why;

  const fs::path dir = scratch_dir("c10");
  {
    auto p = ModelParams::init_random(23, 5, 7, 0.25, rng.next_u64());
    p.raw_lambda1() = 1e-17;
    p.raw_lambda2() = -3.5e300;
    AblationConfig abl;
    abl.use_phase = true;
    abl.use_bump = false;
    save_checkpoint((dir / "ck").string(), p, Norm::L2, abl, 12345);
    const Checkpoint ck = load_checkpoint((dir / "ck").string());
    if (!(ck.params == p) || ck.norm != Norm::L2 || ck.ablation.use_bump ||
        ck.step != 12345) {
      ok = false;
      why = "checkpoint round-trip not bit-identical";
    }
  }

  if (ok) {
    const auto kg = generate_pattern_kg(Pattern::Subsumption, 40, 80, 0.25, 9);
    save_dataset((dir / "kg").string(), kg.dataset);
    const Dataset re = load_dataset((dir / "kg").string());
    if (re.train != kg.dataset.train || re.valid != kg.dataset.valid ||
        re.test != kg.dataset.test) {
      ok = false;
      why = "dataset write/reload changed integer-coded triples";
    }
    if (ok) {
      auto params = ModelParams::init_random(re.n_entities(), re.n_relations(),
                                             6, 0.5, rng.next_u64());
      EvalOptions o1, o8;
      o1.threads = 1;
      o8.threads = 8;
      const auto e1 = evaluate_split(params, re, Split::Test, o1);
      const auto e8 = evaluate_split(params, re, Split::Test, o8);
      if (e1.both.mrr != e8.both.mrr || e1.both.h1 != e8.both.h1 ||
          e1.both.h3 != e8.both.h3 || e1.both.h10 != e8.both.h10) {
        ok = false;
        why = "evaluation differs between 1 and 8 threads";
      }
    }
  }
  fs::remove_all(dir);

  r.seconds = seconds_since(start);
  r.status = ok ? CriterionResult::Status::Pass : CriterionResult::Status::Fail;
  r.detail = ok ? "checkpoint, dataset and threaded evaluation all stable" : why;
  return r;
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& options) {
  std::vector<CriterionResult> out;
  out.push_back(c1_geometry_continuity(options));
  out.push_back(c2_gradient_correctness(options));
  out.push_back(c3_ranking_oracle(options));
  out.push_back(c4_sampling_distribution(options));
  out.push_back(c5_data_fidelity(options));
  DeskRun inversion_full;
  out.push_back(c6_pattern_learning(options, inversion_full));
  out.push_back(c7_ablation_direction(options, inversion_full));
  out.push_back(c8_scaled_benchmark(options));
  out.push_back(c9_pattern_predicates(options));
  out.push_back(c10_round_trips(options));
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (r.status == CriterionResult::Status::Fail) return false;
  return true;
}

void print_results(std::ostream& out,
                   const std::vector<CriterionResult>& results) {
  int passed = 0, failed = 0, skipped = 0;
  for (const auto& r : results) {
    const char* tag = "FAIL";
    if (r.status == CriterionResult::Status::Pass) {
      tag = "PASS";
      ++passed;
    } else if (r.status == CriterionResult::Status::Skip) {
      tag = "SKIP";
      ++skipped;
    } else {
      ++failed;
    }
    out << fmt("[%2d] %s  %-32s %s (%.2f s)\n", r.id, tag, r.name.c_str(),
               r.detail.c_str(), r.seconds);
  }
  out << fmt("%d passed, %d failed, %d skipped\n", passed, failed, skipped);
}

}  // namespace sectore::selftest
