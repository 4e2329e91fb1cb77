#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sectore/dataset.hpp"
#include "sectore/model.hpp"
#include "sectore/synthetic.hpp"

namespace sectore {

struct AreaRow {
  std::string relation;
  RelationId id = 0;
  double head_area = 0.0;  // geometric mean across dimensions
  double tail_area = 0.0;
};

// One row per relation (geometric-mean sector areas), sorted by name.
std::vector<AreaRow> area_report(const ModelParams& params,
                                 const Vocabulary& vocab);

// Fixed-width rendering: `relation  head_area  tail_area`, areas with four
// decimals, suitable for diffing.
void print_area_report(std::ostream& out, const std::vector<AreaRow>& rows);

enum class Cardinality { OneToMany, ManyToOne, Balanced };
const char* cardinality_name(Cardinality c);

// Head/tail area ratio against threshold tau (> 1): below 1/tau the relation
// leans one-to-many, above tau many-to-one, otherwise balanced.
Cardinality classify_cardinality(double head_area, double tail_area,
                                 double tau = 1.2);

struct PatternCondition {
  std::string description;
  bool holds = false;
};

struct PatternCheck {
  bool holds = false;
  std::vector<PatternCondition> conditions;
};

// Region conditions per pattern over the listed relations (1 for symmetry /
// anti-symmetry, 2 for inversion / subsumption / mutual-exclusion, 3 for
// intersection):
//   symmetry          head == tail
//   anti-symmetry     head and tail disjoint
//   inversion         r1.head == r2.tail and r1.tail == r2.head
//   subsumption       r1.head within r2.head and r1.tail within r2.tail
//   intersection      r1.head/tail meet r2.head/tail inside r3.head/tail
//   mutual-exclusion  heads disjoint or tails disjoint
PatternCheck check_pattern(const ModelParams& params, Pattern pattern,
                           const std::vector<RelationId>& relations,
                           double eps = 1e-6);

// Rows `entity,dim,modulus,phase` for composed embeddings (entity bumped by
// the same-index context entity) or raw base points when contexts is empty.
void export_polar_csv(const ModelParams& params,
                      const std::vector<EntityId>& entities,
                      const std::vector<EntityId>& contexts, std::ostream& out);

}  // namespace sectore
