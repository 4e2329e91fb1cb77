#pragma once

#include <map>
#include <span>
#include <string>

#include "sectore/dataset.hpp"
#include "sectore/model.hpp"

namespace sectore {

struct MetricsReport {
  double mrr = 0.0;
  double h1 = 0.0;
  double h3 = 0.0;
  double h10 = 0.0;
  std::size_t n_queries = 0;
  std::string side = "both";  // "head" | "tail" | "both"
};

struct RelationMetrics {
  double mrr = 0.0, h1 = 0.0, h3 = 0.0, h10 = 0.0;
  std::size_t count = 0;  // queries aggregated (two per triple)
};

struct EvalOptions {
  AblationConfig ablation;
  Norm norm = Norm::L1;
  int threads = 1;
  bool per_relation = false;
};

struct EvalResult {
  MetricsReport both, head, tail;
  std::map<RelationId, RelationMetrics> per_relation;  // empty unless asked
};

// Mid-rank of the true entity among unfiltered candidates:
//   1 + #{score > score_true} + #{score == score_true, candidate != true}/2
// `filtered` is a sorted id list to exclude and must not contain the true
// entity. Throws std::out_of_range if true_entity is not a candidate.
double filtered_rank(std::span<const double> scores, EntityId true_entity,
                     const std::vector<EntityId>& filtered);

// Filtered link-prediction over one split: a head and a tail query per
// triple, filters built from train+valid+test minus the query's own answer.
// MRR is the mean reciprocal rank, Hits@N the fraction of ranks <= N.
// Parallel across triples; aggregation order is fixed, so any thread count
// reports identical numbers. Throws std::invalid_argument on an empty split.
EvalResult evaluate_split(const ModelParams& params, const Dataset& dataset,
                          Split split, const EvalOptions& options);

// Renders `{"mrr":..., "hits":{"1":...,"3":...,"10":...}, "side":...,
// "n_queries":...}`.
std::string metrics_to_json(const MetricsReport& report);

}  // namespace sectore
