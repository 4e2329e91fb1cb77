#include "sectore/model.hpp"

#include <stdexcept>

#include "sectore/rng.hpp"

namespace sectore {

const char* norm_name(Norm n) { return n == Norm::L1 ? "L1" : "L2"; }

Norm norm_from_name(const std::string& name) {
  if (name == "L1") return Norm::L1;
  if (name == "L2") return Norm::L2;
  throw std::invalid_argument("unknown norm: " + name + " (expected L1 or L2)");
}

void AblationConfig::validate() const {
  if (!use_modulus && !use_phase)
    throw std::invalid_argument(
        "ablation removes both modulus and phase; at least one must stay on");
}

ModelParams::ModelParams(std::size_t n_entities, std::size_t n_relations,
                         std::size_t dim, double beta)
    : n_entities_(n_entities),
      n_relations_(n_relations),
      dim_(dim),
      beta_(beta),
      data_(4 * n_entities * dim + 8 * n_relations * dim + 2, 0.0) {
  if (dim == 0) throw std::invalid_argument("dimension must be at least 1");
}

std::size_t ModelParams::entity_offset(EntityId e, int comp) const {
  return (static_cast<std::size_t>(comp) * n_entities_ +
          static_cast<std::size_t>(e)) *
         dim_;
}

std::size_t ModelParams::relation_offset(RelationId r, TripleSide side,
                                         int comp) const {
  const std::size_t block = static_cast<std::size_t>(side) * 4 +
                            static_cast<std::size_t>(comp);
  return 4 * n_entities_ * dim_ +
         (block * n_relations_ + static_cast<std::size_t>(r)) * dim_;
}

std::size_t ModelParams::lambda_offset(int which) const {
  return data_.size() - 2 + static_cast<std::size_t>(which);
}

std::span<double> ModelParams::entity_raw(EntityId e, int comp) {
  return {data_.data() + entity_offset(e, comp), dim_};
}
std::span<const double> ModelParams::entity_raw(EntityId e, int comp) const {
  return {data_.data() + entity_offset(e, comp), dim_};
}
std::span<double> ModelParams::relation_raw(RelationId r, TripleSide side,
                                            int comp) {
  return {data_.data() + relation_offset(r, side, comp), dim_};
}
std::span<const double> ModelParams::relation_raw(RelationId r,
                                                  TripleSide side,
                                                  int comp) const {
  return {data_.data() + relation_offset(r, side, comp), dim_};
}

ModelParams ModelParams::init_random(std::size_t n_entities,
                                     std::size_t n_relations, std::size_t dim,
                                     double beta, std::uint64_t seed) {
  ModelParams p(n_entities, n_relations, dim, beta);
  Rng rng(seed);
  auto fill = [&](std::size_t offset, std::size_t count, double lo, double hi) {
    for (std::size_t i = 0; i < count; ++i)
      p.data_[offset + i] = rng.uniform(lo, hi);
  };
  const std::size_t ed = n_entities * dim;
  const std::size_t rd = n_relations * dim;
  fill(0 * ed, ed, 0.5, 1.5);     // base raw-modulus
  fill(1 * ed, ed, 0.0, kTwoPi);  // base raw-phase
  fill(2 * ed, ed, 0.9, 1.1);     // bump raw-modulus
  fill(3 * ed, ed, 0.0, kTwoPi);  // bump raw-phase
  for (int side = 0; side < 2; ++side) {
    const std::size_t base = 4 * ed + static_cast<std::size_t>(side) * 4 * rd;
    fill(base + 0 * rd, rd, 0.5, 1.5);     // raw c
    fill(base + 1 * rd, rd, 0.0, 0.5);     // raw s
    fill(base + 2 * rd, rd, 0.0, kTwoPi);  // raw theta
    fill(base + 3 * rd, rd, 0.0, 0.5);     // raw a
  }
  // lambda raws stay 0 (lambda = 1)
  return p;
}

AnnularSector ModelParams::sector(RelationId r, TripleSide side) const {
  return sector_from_raw(relation_raw(r, side, 0), relation_raw(r, side, 1),
                         relation_raw(r, side, 2), relation_raw(r, side, 3),
                         beta_);
}

PolarVector embed_entity(const ModelParams& params, EntityId i, EntityId j,
                         const AblationConfig& ablation) {
  PolarVector out;
  const std::size_t d = params.dim();
  out.modulus.resize(d);
  out.phase.resize(d);
  const auto bm = params.entity_raw(i, 0);
  const auto bp = params.entity_raw(i, 1);
  if (ablation.use_bump) {
    const auto um = params.entity_raw(j, 2);
    const auto up = params.entity_raw(j, 3);
    for (std::size_t k = 0; k < d; ++k) {
      out.modulus[k] = std::fabs(bm[k]) * std::fabs(um[k]);
      out.phase[k] = wrap_angle(bp[k] + up[k]);
    }
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      out.modulus[k] = std::fabs(bm[k]);
      out.phase[k] = wrap_angle(bp[k]);
    }
  }
  return out;
}

namespace detail {

// Norms of the two per-dimension distance vectors for one side of a triple:
// the point of entity `i` bumped by entity `j` against one sector of `r`.
// Canonical scoring arithmetic; the gradient path mirrors it exactly.
void side_distance_norms(const ModelParams& params, EntityId i, EntityId j,
                         RelationId r, TripleSide side,
                         const AblationConfig& ablation, Norm norm,
                         double& dist_m, double& dist_p) {
  const std::size_t d = params.dim();
  const auto base_m = params.entity_raw(i, 0);
  const auto base_p = params.entity_raw(i, 1);
  const auto bump_m = params.entity_raw(j, 2);
  const auto bump_p = params.entity_raw(j, 3);
  const auto raw_c = params.relation_raw(r, side, 0);
  const auto raw_s = params.relation_raw(r, side, 1);
  const auto raw_th = params.relation_raw(r, side, 2);
  const auto raw_a = params.relation_raw(r, side, 3);
  const double beta_pi = params.beta() * kPi;

  double acc_m = 0.0, acc_p = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    if (ablation.use_modulus) {
      const double m = ablation.use_bump
                           ? std::fabs(base_m[k]) * std::fabs(bump_m[k])
                           : std::fabs(base_m[k]);
      const double v = dist_mod_dim(m, std::fabs(raw_c[k]), std::fabs(raw_s[k]));
      acc_m += norm == Norm::L1 ? v : v * v;
    }
    if (ablation.use_phase) {
      const double p = ablation.use_bump ? wrap_angle(base_p[k] + bump_p[k])
                                         : wrap_angle(base_p[k]);
      const double v = dist_phase_dim(p, wrap_angle(raw_th[k]),
                                      std::fabs(raw_a[k]) + beta_pi);
      acc_p += norm == Norm::L1 ? v : v * v;
    }
  }
  dist_m = norm == Norm::L1 ? acc_m : std::sqrt(acc_m);
  dist_p = norm == Norm::L1 ? acc_p : std::sqrt(acc_p);
}

double score_one(const ModelParams& params, EntityId h, RelationId r,
                 EntityId t, const AblationConfig& ablation, Norm norm) {
  double hm, hp, tm, tp;
  side_distance_norms(params, h, t, r, TripleSide::Head, ablation, norm, hm, hp);
  side_distance_norms(params, t, h, r, TripleSide::Tail, ablation, norm, tm, tp);
  double score = 0.0;
  if (ablation.use_modulus) score -= params.lambda1() * (hm + tm);
  if (ablation.use_phase) score -= params.lambda2() * (hp + tp);
  return score;
}

}  // namespace detail

double score_triple(const ModelParams& params, const Triple& triple,
                    const AblationConfig& ablation, Norm norm) {
  return detail::score_one(params, triple.head, triple.relation, triple.tail,
                           ablation, norm);
}

void score_candidates_into(const ModelParams& params, RelationId r,
                           EntityId fixed_entity, QuerySide substituted,
                           const AblationConfig& ablation, Norm norm,
                           std::span<double> out) {
  const auto n = static_cast<EntityId>(params.n_entities());
  if (substituted == QuerySide::Head) {
    for (EntityId e = 0; e < n; ++e)
      out[e] = detail::score_one(params, e, r, fixed_entity, ablation, norm);
  } else {
    for (EntityId e = 0; e < n; ++e)
      out[e] = detail::score_one(params, fixed_entity, r, e, ablation, norm);
  }
}

std::vector<double> score_candidates(const ModelParams& params, RelationId r,
                                     EntityId fixed_entity,
                                     QuerySide substituted,
                                     const AblationConfig& ablation,
                                     Norm norm) {
  std::vector<double> out(params.n_entities());
  score_candidates_into(params, r, fixed_entity, substituted, ablation, norm,
                        out);
  return out;
}

}  // namespace sectore
