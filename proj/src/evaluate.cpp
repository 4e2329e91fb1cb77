#include "sectore/evaluate.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sectore/parallel.hpp"

namespace sectore {

double filtered_rank(std::span<const double> scores, EntityId true_entity,
                     const std::vector<EntityId>& filtered) {
  if (true_entity < 0 ||
      static_cast<std::size_t>(true_entity) >= scores.size())
    throw std::out_of_range("true entity id " + std::to_string(true_entity) +
                            " outside candidate range");
  const double s_true = scores[true_entity];
  std::size_t greater = 0, equal = 0;
  for (std::size_t e = 0; e < scores.size(); ++e) {
    const auto id = static_cast<EntityId>(e);
    if (id == true_entity) continue;
    if (std::binary_search(filtered.begin(), filtered.end(), id)) continue;
    if (scores[e] > s_true)
      ++greater;
    else if (scores[e] == s_true)
      ++equal;
  }
  return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(equal);
}

namespace {

std::vector<EntityId> without(const std::vector<EntityId>& sorted,
                              EntityId drop) {
  std::vector<EntityId> out;
  out.reserve(sorted.size());
  for (EntityId e : sorted)
    if (e != drop) out.push_back(e);
  return out;
}

struct Agg {
  double rr = 0.0;
  std::size_t h1 = 0, h3 = 0, h10 = 0, n = 0;

  void add(double rank) {
    rr += 1.0 / rank;
    h1 += rank <= 1.0;
    h3 += rank <= 3.0;
    h10 += rank <= 10.0;
    n += 1;
  }
  MetricsReport report(const std::string& side) const {
    MetricsReport r;
    const double dn = static_cast<double>(n);
    r.mrr = rr / dn;
    r.h1 = static_cast<double>(h1) / dn;
    r.h3 = static_cast<double>(h3) / dn;
    r.h10 = static_cast<double>(h10) / dn;
    r.n_queries = n;
    r.side = side;
    return r;
  }
};

}  // namespace

EvalResult evaluate_split(const ModelParams& params, const Dataset& dataset,
                          Split split, const EvalOptions& options) {
  const auto& triples = dataset.split(split);
  if (triples.empty())
    throw std::invalid_argument(std::string("split '") + split_name(split) +
                                "' is empty");
  if (params.n_entities() != dataset.n_entities() ||
      params.n_relations() != dataset.n_relations()) {
    throw std::invalid_argument(
        "checkpoint/dataset size mismatch: checkpoint has " +
        std::to_string(params.n_entities()) + " entities / " +
        std::to_string(params.n_relations()) + " relations, dataset has " +
        std::to_string(dataset.n_entities()) + " / " +
        std::to_string(dataset.n_relations()));
  }

  // ranks[2*i] is the tail query of triple i, ranks[2*i + 1] the head query.
  std::vector<double> ranks(2 * triples.size());
  parallel_for(triples.size(), options.threads,
               [&](std::size_t begin, std::size_t end) {
                 std::vector<double> scores(params.n_entities());
                 for (std::size_t i = begin; i < end; ++i) {
                   const Triple& t = triples[i];
                   score_candidates_into(params, t.relation, t.head,
                                         QuerySide::Tail, options.ablation,
                                         options.norm, scores);
                   ranks[2 * i] = filtered_rank(
                       scores, t.tail,
                       without(dataset.filter_all.tails(t.head, t.relation),
                               t.tail));
                   score_candidates_into(params, t.relation, t.tail,
                                         QuerySide::Head, options.ablation,
                                         options.norm, scores);
                   ranks[2 * i + 1] = filtered_rank(
                       scores, t.head,
                       without(dataset.filter_all.heads(t.relation, t.tail),
                               t.head));
                 }
               });

  EvalResult result;
  Agg both, head, tail;
  std::map<RelationId, Agg> by_rel;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    tail.add(ranks[2 * i]);
    head.add(ranks[2 * i + 1]);
    both.add(ranks[2 * i]);
    both.add(ranks[2 * i + 1]);
    if (options.per_relation) {
      auto& agg = by_rel[triples[i].relation];
      agg.add(ranks[2 * i]);
      agg.add(ranks[2 * i + 1]);
    }
  }
  result.both = both.report("both");
  result.head = head.report("head");
  result.tail = tail.report("tail");
  for (const auto& [rel, agg] : by_rel) {
    const MetricsReport r = agg.report("both");
    result.per_relation[rel] = {r.mrr, r.h1, r.h3, r.h10, r.n_queries};
  }
  return result;
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j{
      {"mrr", report.mrr},
      {"hits", {{"1", report.h1}, {"3", report.h3}, {"10", report.h10}}},
      {"side", report.side},
      {"n_queries", report.n_queries},
  };
  return j.dump();
}

}  // namespace sectore
