#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "sectore/model.hpp"

namespace sectore {

// Sparse gradient accumulator for the parameters a few triples touch.
// Entity blocks hold 4*d values (base raw-modulus, base raw-phase, bump
// raw-modulus, bump raw-phase), relation blocks 8*d (head c,s,theta,a then
// tail), in first-touch order so merges are deterministic.
class GradAccum {
 public:
  explicit GradAccum(std::size_t dim) : dim_(dim) {}

  void clear();
  double* entity_block(EntityId e);
  double* relation_block(RelationId r);
  double& g_raw_lambda1() { return g_lambda_[0]; }
  double& g_raw_lambda2() { return g_lambda_[1]; }

  void scale(double factor);
  // dense must have params.n_params() entries.
  void add_into_dense(std::span<double> dense, const ModelParams& layout) const;

  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
  std::vector<EntityId> ent_ids_;
  std::unordered_map<EntityId, std::size_t> ent_slots_;
  std::vector<double> ent_g_;
  std::vector<RelationId> rel_ids_;
  std::unordered_map<RelationId, std::size_t> rel_slots_;
  std::vector<double> rel_g_;
  double g_lambda_[2] = {0.0, 0.0};
  std::vector<double> scratch_;  // per-dimension forward stash

  friend void accumulate_score_gradient(const ModelParams&, const Triple&,
                                        double, const AblationConfig&, Norm,
                                        GradAccum&);
};

// Adds coef * d(score)/d(raw) for one triple into acc. Subgradients at the
// non-smooth spots: branch boundaries take the inside branch, |x| at 0 takes
// slope +1, the L2 norm at 0 takes 0.
void accumulate_score_gradient(const ModelParams& params, const Triple& triple,
                               double coef, const AblationConfig& ablation,
                               Norm norm, GradAccum& acc);

// loss = -log sigmoid(gamma + score(positive))
//        - sum_i weights[i] * log sigmoid(-score(negatives[i]) - gamma)
// with weights treated as constants. Adds the exact gradient into acc and
// returns the loss.
double loss_and_gradient(const ModelParams& params, const Triple& positive,
                         std::span<const Triple> negatives,
                         std::span<const double> weights, double gamma,
                         const AblationConfig& ablation, Norm norm,
                         GradAccum& acc);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // dense, same layout as ModelParams::flat()
};

// Dense convenience wrapper around loss_and_gradient.
LossGrad loss_gradients(const ModelParams& params, const Triple& positive,
                        std::span<const Triple> negatives,
                        std::span<const double> weights, double gamma,
                        const AblationConfig& ablation, Norm norm);

double sigmoid(double x);
double softplus(double x);  // log(1 + e^x), overflow-safe

}  // namespace sectore
