#include "sectore/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "sectore/geometry.hpp"

namespace sectore {

std::vector<AreaRow> area_report(const ModelParams& params,
                                 const Vocabulary& vocab) {
  std::vector<AreaRow> rows;
  rows.reserve(params.n_relations());
  for (std::size_t r = 0; r < params.n_relations(); ++r) {
    const auto id = static_cast<RelationId>(r);
    AreaRow row;
    row.relation = vocab.relation_name(id);
    row.id = id;
    row.head_area = sector_area(params.sector(id, TripleSide::Head)).geometric_mean;
    row.tail_area = sector_area(params.sector(id, TripleSide::Tail)).geometric_mean;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const AreaRow& a, const AreaRow& b) {
              return a.relation < b.relation;
            });
  return rows;
}

void print_area_report(std::ostream& out, const std::vector<AreaRow>& rows) {
  std::size_t width = 8;
  for (const AreaRow& r : rows) width = std::max(width, r.relation.size());
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s  %12s  %12s\n",
                static_cast<int>(width), "relation", "head_area", "tail_area");
  out << buf;
  for (const AreaRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s  %12.4f  %12.4f\n",
                  static_cast<int>(width), r.relation.c_str(), r.head_area,
                  r.tail_area);
    out << buf;
  }
}

const char* cardinality_name(Cardinality c) {
  switch (c) {
    case Cardinality::OneToMany: return "one-to-many";
    case Cardinality::ManyToOne: return "many-to-one";
    case Cardinality::Balanced: return "balanced";
  }
  return "?";
}

Cardinality classify_cardinality(double head_area, double tail_area,
                                 double tau) {
  if (!(head_area > 0.0 && tail_area > 0.0))
    throw std::invalid_argument("areas must be positive");
  if (!(tau > 1.0)) throw std::invalid_argument("tau must be > 1");
  const double ratio = head_area / tail_area;
  if (ratio < 1.0 / tau) return Cardinality::OneToMany;
  if (ratio > tau) return Cardinality::ManyToOne;
  return Cardinality::Balanced;
}

namespace {

void require_arity(Pattern p, std::size_t got) {
  const auto want = static_cast<std::size_t>(pattern_arity(p));
  if (got != want) {
    throw std::invalid_argument(std::string(pattern_name(p)) + " needs " +
                                std::to_string(want) + " relation(s), got " +
                                std::to_string(got));
  }
}

}  // namespace

PatternCheck check_pattern(const ModelParams& params, Pattern pattern,
                           const std::vector<RelationId>& relations,
                           double eps) {
  require_arity(pattern, relations.size());
  for (RelationId r : relations) {
    if (r < 0 || static_cast<std::size_t>(r) >= params.n_relations())
      throw std::invalid_argument("relation id out of range: " +
                                  std::to_string(r));
  }
  auto head = [&](std::size_t i) {
    return params.sector(relations[i], TripleSide::Head);
  };
  auto tail = [&](std::size_t i) {
    return params.sector(relations[i], TripleSide::Tail);
  };

  PatternCheck out;
  auto cond = [&](std::string text, bool holds) {
    out.conditions.push_back({std::move(text), holds});
  };

  switch (pattern) {
    case Pattern::Symmetry:
      cond("head sector == tail sector",
           sector_relation(head(0), tail(0), eps).equal);
      break;
    case Pattern::AntiSymmetry:
      cond("head sector disjoint from tail sector",
           sector_relation(head(0), tail(0), eps).disjoint);
      break;
    case Pattern::Inversion:
      cond("r1 head == r2 tail",
           sector_relation(head(0), tail(1), eps).equal);
      cond("r1 tail == r2 head",
           sector_relation(tail(0), head(1), eps).equal);
      break;
    case Pattern::Subsumption:
      cond("r1 head within r2 head",
           sector_relation(head(0), head(1), eps).a_subset_b);
      cond("r1 tail within r2 tail",
           sector_relation(tail(0), tail(1), eps).a_subset_b);
      break;
    case Pattern::Intersection:
      cond("r1 head meet r2 head within r3 head",
           intersection_within(head(0), head(1), head(2), eps));
      cond("r1 tail meet r2 tail within r3 tail",
           intersection_within(tail(0), tail(1), tail(2), eps));
      break;
    case Pattern::MutualExclusion:
      cond("heads disjoint", sector_relation(head(0), head(1), eps).disjoint);
      cond("tails disjoint", sector_relation(tail(0), tail(1), eps).disjoint);
      break;
  }

  if (pattern == Pattern::MutualExclusion) {
    out.holds = false;
    for (const auto& c : out.conditions) out.holds = out.holds || c.holds;
  } else {
    out.holds = true;
    for (const auto& c : out.conditions) out.holds = out.holds && c.holds;
  }
  return out;
}

void export_polar_csv(const ModelParams& params,
                      const std::vector<EntityId>& entities,
                      const std::vector<EntityId>& contexts,
                      std::ostream& out) {
  if (!contexts.empty() && contexts.size() != entities.size())
    throw std::invalid_argument(
        "context list must be empty or match the entity list length");
  out << "entity,dim,modulus,phase\n";
  AblationConfig abl;
  abl.use_bump = !contexts.empty();
  char buf[96];
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const EntityId e = entities[i];
    const EntityId ctx = contexts.empty() ? e : contexts[i];
    const PolarVector p = embed_entity(params, e, ctx, abl);
    for (std::size_t k = 0; k < params.dim(); ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g,%.17g\n", e, k,
                    p.modulus[k], p.phase[k]);
      out << buf;
    }
  }
}

}  // namespace sectore
