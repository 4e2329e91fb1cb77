#include "sectore/gradients.hpp"

#include <cstring>
#include <stdexcept>

namespace sectore {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void GradAccum::clear() {
  ent_ids_.clear();
  ent_slots_.clear();
  ent_g_.clear();
  rel_ids_.clear();
  rel_slots_.clear();
  rel_g_.clear();
  g_lambda_[0] = g_lambda_[1] = 0.0;
}

double* GradAccum::entity_block(EntityId e) {
  auto [it, fresh] = ent_slots_.try_emplace(e, ent_ids_.size());
  if (fresh) {
    ent_ids_.push_back(e);
    ent_g_.resize(ent_g_.size() + 4 * dim_, 0.0);
  }
  return ent_g_.data() + it->second * 4 * dim_;
}

double* GradAccum::relation_block(RelationId r) {
  auto [it, fresh] = rel_slots_.try_emplace(r, rel_ids_.size());
  if (fresh) {
    rel_ids_.push_back(r);
    rel_g_.resize(rel_g_.size() + 8 * dim_, 0.0);
  }
  return rel_g_.data() + it->second * 8 * dim_;
}

void GradAccum::scale(double factor) {
  for (double& v : ent_g_) v *= factor;
  for (double& v : rel_g_) v *= factor;
  g_lambda_[0] *= factor;
  g_lambda_[1] *= factor;
}

void GradAccum::add_into_dense(std::span<double> dense,
                               const ModelParams& layout) const {
  for (std::size_t s = 0; s < ent_ids_.size(); ++s) {
    const double* block = ent_g_.data() + s * 4 * dim_;
    for (int comp = 0; comp < 4; ++comp) {
      double* dst = dense.data() + layout.entity_offset(ent_ids_[s], comp);
      const double* src = block + comp * dim_;
      for (std::size_t k = 0; k < dim_; ++k) dst[k] += src[k];
    }
  }
  for (std::size_t s = 0; s < rel_ids_.size(); ++s) {
    const double* block = rel_g_.data() + s * 8 * dim_;
    for (int side = 0; side < 2; ++side) {
      for (int comp = 0; comp < 4; ++comp) {
        double* dst = dense.data() +
                      layout.relation_offset(rel_ids_[s],
                                             static_cast<TripleSide>(side), comp);
        const double* src = block + (side * 4 + comp) * dim_;
        for (std::size_t k = 0; k < dim_; ++k) dst[k] += src[k];
      }
    }
  }
  dense[layout.lambda_offset(0)] += g_lambda_[0];
  dense[layout.lambda_offset(1)] += g_lambda_[1];
}

namespace {

inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

// Backward of one triple side. Mirrors detail::side_distance_norms: a stash
// pass for the per-dimension distances (the norm needs them all), then the
// chain rule back to the raw parameters.
void side_gradient(const ModelParams& params, EntityId i, EntityId j,
                   RelationId r, TripleSide side, double coef,
                   const AblationConfig& abl, Norm norm, GradAccum& acc,
                   std::vector<double>& scratch) {
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

  scratch.assign(2 * d, 0.0);
  double* dm = scratch.data();
  double* dp = scratch.data() + d;

  double acc_m = 0.0, acc_p = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    if (abl.use_modulus) {
      const double m = abl.use_bump ? std::fabs(base_m[k]) * std::fabs(bump_m[k])
                                    : std::fabs(base_m[k]);
      dm[k] = dist_mod_dim(m, std::fabs(raw_c[k]), std::fabs(raw_s[k]));
      acc_m += norm == Norm::L1 ? dm[k] : dm[k] * dm[k];
    }
    if (abl.use_phase) {
      const double p = abl.use_bump ? wrap_angle(base_p[k] + bump_p[k])
                                    : wrap_angle(base_p[k]);
      dp[k] = dist_phase_dim(p, wrap_angle(raw_th[k]),
                             std::fabs(raw_a[k]) + beta_pi);
      acc_p += norm == Norm::L1 ? dp[k] : dp[k] * dp[k];
    }
  }
  const double norm_m = norm == Norm::L1 ? acc_m : std::sqrt(acc_m);
  const double norm_p = norm == Norm::L1 ? acc_p : std::sqrt(acc_p);

  // Touch all three blocks first; creating one can reallocate the backing
  // store and would invalidate pointers fetched earlier.
  acc.entity_block(i);
  acc.entity_block(j);
  acc.relation_block(r);
  double* gi = acc.entity_block(i);  // base blocks of the point entity
  double* gj = acc.entity_block(j);  // bump blocks of the partner
  double* gr = acc.relation_block(r) +
               (side == TripleSide::Head ? 0 : 4 * d);
  const double lambda1 = params.lambda1();
  const double lambda2 = params.lambda2();

  if (abl.use_modulus) {
    acc.g_raw_lambda1() += coef * (-lambda1 * norm_m);
    const double base_coef = coef * (-lambda1);
    for (std::size_t k = 0; k < d; ++k) {
      double gd = base_coef;
      if (norm == Norm::L2) gd *= norm_m > 0.0 ? dm[k] / norm_m : 0.0;
      if (gd == 0.0) continue;

      const double am = std::fabs(base_m[k]);
      const double ab = abl.use_bump ? std::fabs(bump_m[k]) : 1.0;
      const double m = am * ab;
      const double c = std::fabs(raw_c[k]);
      const double s = std::fabs(raw_s[k]);
      const double w = s + 1.0;
      const double diff = m - c;
      const double adm = std::fabs(diff);

      double dv_dadm, dv_dw;
      if (adm <= 0.5 * s) {
        dv_dadm = 1.0 / w;
        dv_dw = -adm / (w * w);
      } else {
        dv_dadm = w;
        dv_dw = adm - 0.5 * ((w - 1.0 / w) + (w - 1.0) * (1.0 + 1.0 / (w * w)));
      }
      const double g_m = gd * dv_dadm * sgn(diff);
      gi[k] += g_m * sgn(base_m[k]) * ab;                   // base raw-modulus
      if (abl.use_bump) gj[2 * d + k] += g_m * am * sgn(bump_m[k]);
      gr[0 * d + k] += -g_m * sgn(raw_c[k]);                // raw c
      gr[1 * d + k] += gd * dv_dw * sgn(raw_s[k]);          // raw s
    }
  }

  if (abl.use_phase) {
    acc.g_raw_lambda2() += coef * (-lambda2 * norm_p);
    const double base_coef = coef * (-lambda2);
    for (std::size_t k = 0; k < d; ++k) {
      double gd = base_coef;
      if (norm == Norm::L2) gd *= norm_p > 0.0 ? dp[k] / norm_p : 0.0;
      if (gd == 0.0) continue;

      const double p = abl.use_bump ? wrap_angle(base_p[k] + bump_p[k])
                                    : wrap_angle(base_p[k]);
      const double th = wrap_angle(raw_th[k]);
      const double delta = std::fabs(raw_a[k]) + beta_pi;
      const double x = 0.5 * (p - th);
      const double g = std::sin(x);
      const double sg = std::fabs(g);

      double dv_dsg, dv_ddelta;
      if (sg <= 0.5) {
        dv_dsg = 1.0 / delta;
        dv_ddelta = -sg / (delta * delta);
      } else {
        dv_dsg = delta;
        dv_ddelta = sg - 0.5 * (1.0 + 1.0 / (delta * delta));
      }
      const double dsg_dx = sgn(g) * std::cos(x);
      const double g_p = gd * dv_dsg * dsg_dx * 0.5;
      gi[1 * d + k] += g_p;                       // base raw-phase
      if (abl.use_bump) gj[3 * d + k] += g_p;     // bump raw-phase
      gr[2 * d + k] += -g_p;                      // raw theta
      gr[3 * d + k] += gd * dv_ddelta * sgn(raw_a[k]);
    }
  }
}

}  // namespace

void accumulate_score_gradient(const ModelParams& params, const Triple& triple,
                               double coef, const AblationConfig& ablation,
                               Norm norm, GradAccum& acc) {
  side_gradient(params, triple.head, triple.tail, triple.relation,
                TripleSide::Head, coef, ablation, norm, acc, acc.scratch_);
  side_gradient(params, triple.tail, triple.head, triple.relation,
                TripleSide::Tail, coef, ablation, norm, acc, acc.scratch_);
}

double loss_and_gradient(const ModelParams& params, const Triple& positive,
                         std::span<const Triple> negatives,
                         std::span<const double> weights, double gamma,
                         const AblationConfig& ablation, Norm norm,
                         GradAccum& acc) {
  if (negatives.empty())
    throw std::invalid_argument("loss needs at least one negative");
  if (negatives.size() != weights.size())
    throw std::invalid_argument("weights/negatives size mismatch");

  const double s_pos = score_triple(params, positive, ablation, norm);
  double loss = softplus(-(gamma + s_pos));
  accumulate_score_gradient(params, positive, sigmoid(gamma + s_pos) - 1.0,
                            ablation, norm, acc);
  for (std::size_t n = 0; n < negatives.size(); ++n) {
    const double s_neg = score_triple(params, negatives[n], ablation, norm);
    loss += weights[n] * softplus(s_neg + gamma);
    accumulate_score_gradient(params, negatives[n],
                              weights[n] * sigmoid(s_neg + gamma), ablation,
                              norm, acc);
  }
  return loss;
}

LossGrad loss_gradients(const ModelParams& params, const Triple& positive,
                        std::span<const Triple> negatives,
                        std::span<const double> weights, double gamma,
                        const AblationConfig& ablation, Norm norm) {
  GradAccum acc(params.dim());
  LossGrad out;
  out.loss = loss_and_gradient(params, positive, negatives, weights, gamma,
                               ablation, norm, acc);
  out.grad.assign(params.n_params(), 0.0);
  acc.add_into_dense(out.grad, params);
  return out;
}

}  // namespace sectore
