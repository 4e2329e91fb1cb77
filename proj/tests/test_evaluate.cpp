#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sectore/evaluate.hpp"
#include "sectore/rng.hpp"
#include "sectore/synthetic.hpp"

using namespace sectore;

TEST_CASE("filtered_rank") {
  SUBCASE("enumerated example") {
    // entities A=0 B=1 C=2 D=3; true B; C filtered out
    std::vector<double> scores{0.5, 0.9, 0.95, 0.2};
    CHECK(filtered_rank(scores, 1, {2}) == 1.0);
    SUBCASE("without filtering C outranks B") {
      CHECK(filtered_rank(scores, 1, {}) == 2.0);
    }
  }
  SUBCASE("full tie gives the mid rank") {
    std::vector<double> scores(101, -3.25);
    CHECK(filtered_rank(scores, 17, {}) == 1.0 + 100.0 / 2.0);
  }
  SUBCASE("strict maximum ranks first") {
    std::vector<double> scores{-1.0, -0.5, -2.0};
    CHECK(filtered_rank(scores, 1, {}) == 1.0);
  }
  SUBCASE("out-of-range true entity") {
    std::vector<double> scores{0.0, 1.0};
    CHECK_THROWS_AS(filtered_rank(scores, 7, {}), std::out_of_range);
    CHECK_THROWS_AS(filtered_rank(scores, -1, {}), std::out_of_range);
  }
  SUBCASE("strictly increasing transforms preserve ranks") {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> scores(50);
      for (double& s : scores) s = rng.uniform(-10.0, 0.0);
      std::vector<EntityId> filtered;
      for (EntityId e = 0; e < 50; ++e)
        if (rng.next_below(5) == 0) filtered.push_back(e);
      EntityId truth = static_cast<EntityId>(rng.next_below(50));
      filtered.erase(std::remove(filtered.begin(), filtered.end(), truth),
                     filtered.end());
      std::vector<double> mapped(50);
      for (std::size_t i = 0; i < 50; ++i)
        mapped[i] = 3.0 * scores[i] + 1.0;  // strictly increasing
      CHECK(filtered_rank(scores, truth, filtered) ==
            filtered_rank(mapped, truth, filtered));
      std::vector<double> tanhd(50);
      for (std::size_t i = 0; i < 50; ++i) tanhd[i] = std::tanh(scores[i]);
      CHECK(filtered_rank(scores, truth, filtered) ==
            filtered_rank(tanhd, truth, filtered));
    }
  }
  SUBCASE("enlarging the filter never increases the rank") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> scores(40);
      for (double& s : scores) s = rng.uniform(-5.0, 0.0);
      EntityId truth = static_cast<EntityId>(rng.next_below(40));
      std::vector<EntityId> small, large;
      for (EntityId e = 0; e < 40; ++e) {
        if (e == truth) continue;
        const auto draw = rng.next_below(4);
        if (draw == 0) small.push_back(e);
        if (draw <= 1) large.push_back(e);
      }
      for (EntityId e : small)
        if (!std::binary_search(large.begin(), large.end(), e))
          large.push_back(e);
      std::sort(large.begin(), large.end());
      CHECK(filtered_rank(scores, truth, large) <=
            filtered_rank(scores, truth, small));
    }
  }
}

namespace {

// A d=1 model whose entity points have distinct moduli and whose relation-0
// sectors sit exactly on the composed points of triple (0, r, 1); that triple
// outranks every corruption.
ModelParams pointy_params(std::size_t n_entities) {
  ModelParams p(n_entities, 1, 1, 0.0);
  for (std::size_t e = 0; e < n_entities; ++e) {
    p.entity_raw(static_cast<EntityId>(e), 0)[0] = 1.0 + static_cast<double>(e);
    p.entity_raw(static_cast<EntityId>(e), 1)[0] = 0.0;
    p.entity_raw(static_cast<EntityId>(e), 2)[0] = 1.0;
    p.entity_raw(static_cast<EntityId>(e), 3)[0] = 0.0;
  }
  p.relation_raw(0, TripleSide::Head, 0)[0] = 1.0;  // head point of e0
  p.relation_raw(0, TripleSide::Head, 1)[0] = 0.0;
  p.relation_raw(0, TripleSide::Head, 2)[0] = 0.0;
  p.relation_raw(0, TripleSide::Head, 3)[0] = 1.0;
  p.relation_raw(0, TripleSide::Tail, 0)[0] = 2.0;  // tail point of e1
  p.relation_raw(0, TripleSide::Tail, 1)[0] = 0.0;
  p.relation_raw(0, TripleSide::Tail, 2)[0] = 0.0;
  p.relation_raw(0, TripleSide::Tail, 3)[0] = 1.0;
  return p;
}

Dataset single_triple_dataset(std::size_t n_entities) {
  Dataset ds;
  for (std::size_t i = 0; i < n_entities; ++i)
    ds.vocab.intern_entity("e" + std::to_string(i));
  ds.vocab.intern_relation("r0");
  ds.train.push_back({0, 0, 1});
  ds.valid.push_back({0, 0, 1});
  ds.test.push_back({0, 0, 1});
  ds.rebuild_indexes();
  return ds;
}

// Independent reference evaluator: per-triple loops over score_triple, its
// own set-based filtering and counting, no shared ranking code.
struct BruteMetrics {
  std::vector<double> ranks;
  double mrr = 0, h1 = 0, h3 = 0, h10 = 0;
};

BruteMetrics brute_force_eval(const ModelParams& params, const Dataset& ds,
                              Split split, const AblationConfig& abl,
                              Norm norm) {
  std::set<std::tuple<int, int, int>> known;
  for (const auto* s : {&ds.train, &ds.valid, &ds.test})
    for (const Triple& t : *s) known.insert({t.head, t.relation, t.tail});

  BruteMetrics out;
  const auto n = static_cast<EntityId>(ds.n_entities());
  for (const Triple& t : ds.split(split)) {
    // tail query then head query, matching the implementation's order
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
  for (double r : out.ranks) {
    out.mrr += 1.0 / r;
    out.h1 += r <= 1;
    out.h3 += r <= 3;
    out.h10 += r <= 10;
  }
  const double q = static_cast<double>(out.ranks.size());
  out.mrr /= q;
  out.h1 /= q;
  out.h3 /= q;
  out.h10 /= q;
  return out;
}

}  // namespace

TEST_CASE("a model scoring true triples on top gets perfect metrics") {
  const auto ds = single_triple_dataset(6);
  const auto params = pointy_params(6);
  EvalOptions opts;
  auto res = evaluate_split(params, ds, Split::Test, opts);
  CHECK(res.both.mrr == 1.0);
  CHECK(res.both.h1 == 1.0);
  CHECK(res.both.h10 == 1.0);
  CHECK(res.both.n_queries == 2);
}

TEST_CASE("evaluate_split equals the brute-force reference exactly") {
  auto kg = generate_pattern_kg(Pattern::Inversion, 40, 90, 0.25, 12);
  Rng seeds(7);
  for (int trial = 0; trial < 3; ++trial) {
    auto params = ModelParams::init_random(kg.dataset.n_entities(),
                                           kg.dataset.n_relations(), 4, 0.5,
                                           seeds.next_u64());
    const Norm norm = trial % 2 == 0 ? Norm::L1 : Norm::L2;
    AblationConfig abl;
    if (trial == 2) abl.use_bump = false;

    auto brute = brute_force_eval(params, kg.dataset, Split::Test, abl, norm);

    EvalOptions opts;
    opts.ablation = abl;
    opts.norm = norm;
    opts.threads = 2;
    opts.per_relation = true;
    auto res = evaluate_split(params, kg.dataset, Split::Test, opts);

    CHECK(res.both.mrr == brute.mrr);
    CHECK(res.both.h1 == brute.h1);
    CHECK(res.both.h3 == brute.h3);
    CHECK(res.both.h10 == brute.h10);
    CHECK(res.both.n_queries == brute.ranks.size());

    // rank-for-rank via the public per-query surface
    for (std::size_t i = 0; i < kg.dataset.test.size(); ++i) {
      const Triple& t = kg.dataset.test[i];
      auto scores =
          score_candidates(params, t.relation, t.head, QuerySide::Tail, abl, norm);
      std::vector<EntityId> filt;
      for (EntityId e : kg.dataset.filter_all.tails(t.head, t.relation))
        if (e != t.tail) filt.push_back(e);
      CHECK(filtered_rank(scores, t.tail, filt) == brute.ranks[2 * i]);
    }
  }
}

TEST_CASE("metric sanity and breakdowns") {
  auto kg = generate_pattern_kg(Pattern::Symmetry, 30, 70, 0.3, 5);
  auto params = ModelParams::init_random(kg.dataset.n_entities(),
                                         kg.dataset.n_relations(), 6, 0.5, 3);
  EvalOptions opts;
  opts.per_relation = true;
  auto res = evaluate_split(params, kg.dataset, Split::Valid, opts);

  CHECK(res.both.h1 <= res.both.h3);
  CHECK(res.both.h3 <= res.both.h10);
  CHECK(res.both.h10 <= 1.0);
  CHECK(res.both.mrr > 0.0);
  CHECK(res.both.mrr <= 1.0);
  CHECK(res.head.n_queries + res.tail.n_queries == res.both.n_queries);
  CHECK(res.both.n_queries == 2 * kg.dataset.valid.size());

  std::size_t rel_total = 0;
  for (const auto& [rel, m] : res.per_relation) rel_total += m.count;
  CHECK(rel_total == res.both.n_queries);

  // aggregate consistency: both = head+tail pooled
  const double pooled =
      (res.head.mrr * res.head.n_queries + res.tail.mrr * res.tail.n_queries) /
      static_cast<double>(res.both.n_queries);
  CHECK(res.both.mrr == doctest::Approx(pooled).epsilon(1e-12));
}

TEST_CASE("evaluation is identical across thread counts") {
  auto kg = generate_pattern_kg(Pattern::MutualExclusion, 25, 40, 0.3, 8);
  auto params = ModelParams::init_random(kg.dataset.n_entities(),
                                         kg.dataset.n_relations(), 5, 0.5, 21);
  EvalOptions o1, o8;
  o1.threads = 1;
  o8.threads = 8;
  auto r1 = evaluate_split(params, kg.dataset, Split::Test, o1);
  auto r8 = evaluate_split(params, kg.dataset, Split::Test, o8);
  CHECK(r1.both.mrr == r8.both.mrr);
  CHECK(r1.both.h1 == r8.both.h1);
  CHECK(r1.both.h3 == r8.both.h3);
  CHECK(r1.both.h10 == r8.both.h10);
  CHECK(r1.head.mrr == r8.head.mrr);
  CHECK(r1.tail.mrr == r8.tail.mrr);
}

TEST_CASE("evaluation error paths") {
  auto ds = single_triple_dataset(5);
  EvalOptions opts;
  SUBCASE("empty split") {
    ds.test.clear();
    ds.rebuild_indexes();
    CHECK_THROWS_WITH_AS(evaluate_split(pointy_params(5), ds, Split::Test, opts),
                         doctest::Contains("empty"), std::invalid_argument);
  }
  SUBCASE("checkpoint/dataset size mismatch names both sizes") {
    CHECK_THROWS_WITH_AS(evaluate_split(pointy_params(7), ds, Split::Test, opts),
                         doctest::Contains("mismatch"), std::invalid_argument);
  }
}

TEST_CASE("metrics JSON shape") {
  MetricsReport r;
  r.mrr = 0.5;
  r.h1 = 0.25;
  r.h3 = 0.5;
  r.h10 = 0.75;
  r.side = "both";
  r.n_queries = 8;
  const std::string j = metrics_to_json(r);
  CHECK(j.find("\"mrr\":0.5") != std::string::npos);
  CHECK(j.find("\"hits\"") != std::string::npos);
  CHECK(j.find("\"1\":0.25") != std::string::npos);
  CHECK(j.find("\"side\":\"both\"") != std::string::npos);
}
