#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sectore/dataset.hpp"
#include "sectore/geometry.hpp"

namespace sectore {

enum class Norm { L1, L2 };
const char* norm_name(Norm n);
Norm norm_from_name(const std::string& name);  // throws on unknown

struct AblationConfig {
  bool use_modulus = true;
  bool use_phase = true;
  bool use_bump = true;

  void validate() const;  // at least one of modulus/phase must stay on
};

enum class TripleSide { Head = 0, Tail = 1 };

// All trainable raw parameters in one flat binary64 buffer. The layout is
// the on-disk checkpoint format; blocks in order, each row-major
// [index][dim]:
//   entity base raw-modulus   |E| x d
//   entity base raw-phase     |E| x d
//   entity bump raw-modulus   |E| x d
//   entity bump raw-phase     |E| x d
//   head sector raw c, s, theta, a    4 blocks of |R| x d
//   tail sector raw c, s, theta, a    4 blocks of |R| x d
//   raw lambda1, raw lambda2          2 scalars
// Effective values: moduli and sector c/s/a through |raw|, phases and theta
// through mod 2pi, lambda_i = exp(raw_lambda_i).
class ModelParams {
 public:
  ModelParams(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
              double beta);

  // Deterministic per seed. Base raw-moduli ~ U(0.5, 1.5), bump raw-moduli
  // ~ U(0.9, 1.1) (near-neutral product), raw phases and theta ~ U(0, 2pi),
  // sector raw c ~ U(0.5, 1.5), raw s and raw a ~ U(0, 0.5), lambda raws 0.
  static ModelParams init_random(std::size_t n_entities,
                                 std::size_t n_relations, std::size_t dim,
                                 double beta, std::uint64_t seed);

  std::size_t n_entities() const { return n_entities_; }
  std::size_t n_relations() const { return n_relations_; }
  std::size_t dim() const { return dim_; }
  double beta() const { return beta_; }

  // comp: 0 = base raw-modulus, 1 = base raw-phase, 2 = bump raw-modulus,
  // 3 = bump raw-phase.
  std::span<double> entity_raw(EntityId e, int comp);
  std::span<const double> entity_raw(EntityId e, int comp) const;
  // comp: 0 = c, 1 = s, 2 = theta, 3 = a.
  std::span<double> relation_raw(RelationId r, TripleSide side, int comp);
  std::span<const double> relation_raw(RelationId r, TripleSide side,
                                       int comp) const;

  double& raw_lambda1() { return data_[lambda_offset(0)]; }
  double& raw_lambda2() { return data_[lambda_offset(1)]; }
  double raw_lambda1() const { return data_[lambda_offset(0)]; }
  double raw_lambda2() const { return data_[lambda_offset(1)]; }
  double lambda1() const { return std::exp(raw_lambda1()); }
  double lambda2() const { return std::exp(raw_lambda2()); }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  std::size_t n_params() const { return data_.size(); }

  std::size_t entity_offset(EntityId e, int comp) const;
  std::size_t relation_offset(RelationId r, TripleSide side, int comp) const;
  std::size_t lambda_offset(int which) const;

  // Effective sector of one relation side (|raw| / wrap applied).
  AnnularSector sector(RelationId r, TripleSide side) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t n_entities_ = 0, n_relations_ = 0, dim_ = 0;
  double beta_ = 0.0;
  std::vector<double> data_;
};

// Composed embedding of entity i in a triple where j is the partner: modulus
// |base_m(i)| * |bump_m(j)|, phase (base_p(i) + bump_p(j)) mod 2pi. With the
// bump ablated the partner contributes nothing.
PolarVector embed_entity(const ModelParams& params, EntityId i, EntityId j,
                         const AblationConfig& ablation);

// score = -(lambda1 * ||dist_mod|| + lambda2 * ||dist_phase||) summed over
// the head point in the head sector and the tail point in the tail sector;
// ablated parts drop their term. Always <= 0.
double score_triple(const ModelParams& params, const Triple& triple,
                    const AblationConfig& ablation, Norm norm);

enum class QuerySide { Head, Tail };  // the slot being substituted

// Scores of every entity substituted into one slot of (h, r, t); entry e is
// exactly score_triple of the substituted triple.
std::vector<double> score_candidates(const ModelParams& params, RelationId r,
                                     EntityId fixed_entity,
                                     QuerySide substituted,
                                     const AblationConfig& ablation, Norm norm);
void score_candidates_into(const ModelParams& params, RelationId r,
                           EntityId fixed_entity, QuerySide substituted,
                           const AblationConfig& ablation, Norm norm,
                           std::span<double> out);

}  // namespace sectore
