#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sectore/gradients.hpp"
#include "sectore/model.hpp"
#include "sectore/rng.hpp"

using namespace sectore;

namespace {

void set_vec(std::span<double> dst, std::initializer_list<double> vals) {
  REQUIRE(dst.size() == vals.size());
  std::size_t i = 0;
  for (double v : vals) dst[i++] = v;
}

// Loss with the weights held fixed; the quantity the analytic gradient
// differentiates.
double loss_value(const ModelParams& params, const Triple& pos,
                  std::span<const Triple> negs, std::span<const double> w,
                  double gamma, const AblationConfig& abl, Norm norm) {
  double loss = softplus(-(gamma + score_triple(params, pos, abl, norm)));
  for (std::size_t i = 0; i < negs.size(); ++i)
    loss += w[i] * softplus(score_triple(params, negs[i], abl, norm) + gamma);
  return loss;
}

struct FdConfig {
  ModelParams params{1, 1, 1, 0.0};
  Triple pos;
  std::vector<Triple> negs;
  std::vector<double> weights;
  double gamma = 1.0;
  AblationConfig abl;
  Norm norm = Norm::L1;
};

// True when some branch condition or |.| kink sits within `margin` of the
// configuration, where finite differences go blind.
bool near_branch_boundary(const FdConfig& c, double margin) {
  const auto& p = c.params;
  const std::size_t d = p.dim();
  std::vector<Triple> all = c.negs;
  all.push_back(c.pos);
  for (const Triple& t : all) {
    for (int side = 0; side < 2; ++side) {
      const EntityId i = side == 0 ? t.head : t.tail;
      const EntityId j = side == 0 ? t.tail : t.head;
      const auto ts = static_cast<TripleSide>(side);
      for (std::size_t k = 0; k < d; ++k) {
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

        const double m = c.abl.use_bump ? std::fabs(raw_bm) * std::fabs(raw_um)
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

FdConfig random_config(Rng& rng, int which) {
  FdConfig c;
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
  switch (which % 4) {  // cycle the ablation/norm variants
    case 0: break;
    case 1: c.abl.use_bump = false; break;
    case 2: c.abl.use_modulus = false; break;
    case 3: c.abl.use_phase = false; break;
  }
  c.norm = which % 2 == 0 ? Norm::L1 : Norm::L2;
  return c;
}

}  // namespace

TEST_CASE("init_random is deterministic with documented shapes") {
  auto a = ModelParams::init_random(10, 3, 4, 0.5, 42);
  auto b = ModelParams::init_random(10, 3, 4, 0.5, 42);
  CHECK(a == b);
  auto c = ModelParams::init_random(10, 3, 4, 0.5, 43);
  const auto af = a.flat();
  const auto cf = c.flat();
  CHECK_FALSE(std::equal(af.begin(), af.end(), cf.begin()));

  CHECK(a.n_params() == 4 * 10 * 4 + 8 * 3 * 4 + 2);
  CHECK(a.entity_raw(9, 3).size() == 4);
  CHECK(a.lambda1() == 1.0);
  CHECK(a.lambda2() == 1.0);

  // init ranges land where documented
  for (EntityId e = 0; e < 10; ++e) {
    for (double v : a.entity_raw(e, 0)) CHECK((v >= 0.5 && v <= 1.5));
    for (double v : a.entity_raw(e, 2)) CHECK((v >= 0.9 && v <= 1.1));
  }
}

TEST_CASE("bump moduli are near-neutral at init") {
  auto p = ModelParams::init_random(100, 2, 100, 0.5, 7);
  double sum = 0.0;
  for (EntityId e = 0; e < 100; ++e)
    for (double v : p.entity_raw(e, 2)) sum += std::fabs(v);
  const double mean = sum / 1e4;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.01));

  // composed moduli stay within 10% of the base moduli
  AblationConfig abl;
  auto point = embed_entity(p, 3, 17, abl);
  for (std::size_t k = 0; k < p.dim(); ++k) {
    const double base = std::fabs(p.entity_raw(3, 0)[k]);
    CHECK(point.modulus[k] >= 0.9 * base);
    CHECK(point.modulus[k] <= 1.1 * base);
  }
}

TEST_CASE("embed_entity composition") {
  ModelParams p(3, 1, 2, 0.5);
  set_vec(p.entity_raw(0, 0), {2.0, 0.5});    // base modulus of e0
  set_vec(p.entity_raw(0, 1), {3 * kPi / 2, 1.0});
  set_vec(p.entity_raw(1, 2), {0.5, 4.0});    // bump modulus of e1
  set_vec(p.entity_raw(1, 3), {kPi, 0.0});

  AblationConfig abl;
  auto v = embed_entity(p, 0, 1, abl);
  CHECK(v.modulus[0] == doctest::Approx(1.0));
  CHECK(v.modulus[1] == doctest::Approx(2.0));
  CHECK(v.phase[0] == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(v.phase[1] == doctest::Approx(1.0));

  SUBCASE("bump off reduces to the base point") {
    abl.use_bump = false;
    auto w = embed_entity(p, 0, 1, abl);
    CHECK(w.modulus[0] == 2.0);
    CHECK(w.modulus[1] == 0.5);
    CHECK(w.phase[0] == doctest::Approx(3 * kPi / 2));
  }
  SUBCASE("reflexive triple bumps with itself") {
    auto w = embed_entity(p, 0, 0, abl);
    CHECK(w.modulus[0] ==
          doctest::Approx(std::fabs(p.entity_raw(0, 0)[0]) *
                          std::fabs(p.entity_raw(0, 2)[0])));
  }
}

namespace {

// d=1 setup where the positive (0,0,1) sits exactly at both sector centers
// and (0,0,2) scores -2: tail sector has s=0 (w=1), e2's base modulus is 3.
ModelParams centered_params() {
  ModelParams p(3, 1, 1, 0.0);
  for (EntityId e = 0; e < 3; ++e) {
    set_vec(p.entity_raw(e, 0), {1.0});
    set_vec(p.entity_raw(e, 1), {0.0});
    set_vec(p.entity_raw(e, 2), {1.0});
    set_vec(p.entity_raw(e, 3), {0.0});
  }
  set_vec(p.entity_raw(2, 0), {3.0});
  for (int side = 0; side < 2; ++side) {
    const auto ts = static_cast<TripleSide>(side);
    set_vec(p.relation_raw(0, ts, 0), {1.0});  // c
    set_vec(p.relation_raw(0, ts, 1), {0.0});  // s
    set_vec(p.relation_raw(0, ts, 2), {0.0});  // theta
    set_vec(p.relation_raw(0, ts, 3), {2.0});  // a -> delta = 2
  }
  return p;
}

}  // namespace

TEST_CASE("score_triple worked values") {
  SUBCASE("points at sector centers score zero") {
    auto p = centered_params();
    AblationConfig abl;
    CHECK(score_triple(p, {0, 0, 1}, abl, Norm::L1) == 0.0);
    CHECK(score_triple(p, {0, 0, 1}, abl, Norm::L2) == 0.0);
    CHECK(score_triple(p, {0, 0, 2}, abl, Norm::L1) == doctest::Approx(-2.0));
  }
  SUBCASE("composed head distances: -(1/6 + 1/4)") {
    ModelParams p(2, 1, 1, 0.0);
    set_vec(p.entity_raw(0, 0), {2.5});       // head modulus 2.5
    set_vec(p.entity_raw(0, 1), {kPi / 3});   // sigma = sin(pi/6) = 1/2
    set_vec(p.entity_raw(0, 2), {1.0});
    set_vec(p.entity_raw(0, 3), {0.0});
    set_vec(p.entity_raw(1, 0), {1.0});       // tail point at center
    set_vec(p.entity_raw(1, 1), {0.0});
    set_vec(p.entity_raw(1, 2), {1.0});
    set_vec(p.entity_raw(1, 3), {0.0});
    set_vec(p.relation_raw(0, TripleSide::Head, 0), {2.0});  // c=2
    set_vec(p.relation_raw(0, TripleSide::Head, 1), {2.0});  // s=2, w=3
    set_vec(p.relation_raw(0, TripleSide::Head, 2), {0.0});
    set_vec(p.relation_raw(0, TripleSide::Head, 3), {2.0});  // delta=2
    set_vec(p.relation_raw(0, TripleSide::Tail, 0), {1.0});
    set_vec(p.relation_raw(0, TripleSide::Tail, 1), {0.5});
    set_vec(p.relation_raw(0, TripleSide::Tail, 2), {0.0});
    set_vec(p.relation_raw(0, TripleSide::Tail, 3), {2.0});

    AblationConfig abl;
    CHECK(score_triple(p, {0, 0, 1}, abl, Norm::L1) ==
          doctest::Approx(-(1.0 / 6.0 + 0.25)).epsilon(1e-12));
    SUBCASE("dropping the phase part keeps only -1/6") {
      abl.use_phase = false;
      CHECK(score_triple(p, {0, 0, 1}, abl, Norm::L1) ==
            doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("score is never positive and zero only at zero distances") {
  Rng rng(21);
  AblationConfig abl;
  for (int i = 0; i < 200; ++i) {
    auto p = ModelParams::init_random(6, 2, 3, 0.5, rng.next_u64());
    Triple t{static_cast<EntityId>(rng.next_below(6)),
             static_cast<RelationId>(rng.next_below(2)),
             static_cast<EntityId>(rng.next_below(6))};
    const Norm norm = rng.coin() ? Norm::L1 : Norm::L2;
    CHECK(score_triple(p, t, abl, norm) <= 0.0);
  }
}

TEST_CASE("score_candidates matches per-triple scoring bit for bit") {
  auto p = ModelParams::init_random(20, 3, 5, 0.5, 9);
  AblationConfig abl;
  auto tail_scores = score_candidates(p, 1, 4, QuerySide::Tail, abl, Norm::L1);
  REQUIRE(tail_scores.size() == 20);
  for (EntityId e = 0; e < 20; ++e)
    CHECK(tail_scores[e] == score_triple(p, {4, 1, e}, abl, Norm::L1));
  auto head_scores = score_candidates(p, 1, 4, QuerySide::Head, abl, Norm::L1);
  for (EntityId e = 0; e < 20; ++e)
    CHECK(head_scores[e] == score_triple(p, {e, 1, 4}, abl, Norm::L1));
}

TEST_CASE("scores ignore bump arrays when the bump is ablated") {
  Rng rng(31);
  auto p = ModelParams::init_random(8, 2, 4, 0.5, 55);
  auto q = p;
  for (EntityId e = 0; e < 8; ++e) {
    for (int comp : {2, 3})
      for (double& v : q.entity_raw(e, comp)) v = rng.uniform(-5.0, 5.0);
  }
  AblationConfig abl;
  abl.use_bump = false;
  for (int i = 0; i < 50; ++i) {
    Triple t{static_cast<EntityId>(rng.next_below(8)),
             static_cast<RelationId>(rng.next_below(2)),
             static_cast<EntityId>(rng.next_below(8))};
    CHECK(score_triple(p, t, abl, Norm::L1) ==
          score_triple(q, t, abl, Norm::L1));
  }
}

TEST_CASE("loss worked value and saturation") {
  auto p = centered_params();
  AblationConfig abl;
  const Triple pos{0, 0, 1};
  const std::vector<Triple> negs{{0, 0, 2}};
  const std::vector<double> w{1.0};

  SUBCASE("gamma=1, s_pos=0, s_neg=-2") {
    auto lg = loss_gradients(p, pos, negs, w, 1.0, abl, Norm::L1);
    CHECK(lg.loss == doctest::Approx(0.6265233750364456).epsilon(1e-12));
    CHECK(lg.grad.size() == p.n_params());
  }
  SUBCASE("saturated negative contributes no gradient") {
    set_vec(p.entity_raw(2, 0), {1e8});
    auto lg = loss_gradients(p, pos, negs, w, 1.0, abl, Norm::L1);
    CHECK(lg.loss == doctest::Approx(softplus(-1.0)).epsilon(1e-9));
    for (int comp = 0; comp < 4; ++comp)
      for (std::size_t k = 0; k < p.dim(); ++k)
        CHECK(lg.grad[p.entity_offset(2, comp) + k] == 0.0);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(2026);
  const double h = 1e-5;
  int accepted = 0;
  int trial = 0;
  while (accepted < 30 && trial < 500) {
    FdConfig c = random_config(rng, trial++);
    if (near_branch_boundary(c, 1e-4)) continue;
    ++accepted;
    CAPTURE(trial);

    auto lg = loss_gradients(c.params, c.pos, c.negs, c.weights, c.gamma,
                             c.abl, c.norm);
    auto flat = c.params.flat();
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double saved = flat[i];
      flat[i] = saved + h;
      const double up = loss_value(c.params, c.pos, c.negs, c.weights,
                                   c.gamma, c.abl, c.norm);
      flat[i] = saved - h;
      const double dn = loss_value(c.params, c.pos, c.negs, c.weights,
                                   c.gamma, c.abl, c.norm);
      flat[i] = saved;
      const double fd = (up - dn) / (2 * h);
      const double ana = lg.grad[i];
      const double err = std::fabs(ana - fd);
      const double scale = std::max(std::fabs(ana), std::fabs(fd));
      CAPTURE(i);
      CHECK((err <= 1e-7 || err / scale <= 1e-4));
    }
  }
  CHECK(accepted == 30);
}

TEST_CASE("ablated parts freeze their lambda and parameters") {
  Rng rng(8);
  FdConfig c = random_config(rng, 0);
  c.abl.use_modulus = false;
  auto lg = loss_gradients(c.params, c.pos, c.negs, c.weights, c.gamma, c.abl,
                           c.norm);
  CHECK(lg.grad[c.params.lambda_offset(0)] == 0.0);
  // modulus sector raws receive nothing
  for (std::size_t r = 0; r < c.params.n_relations(); ++r) {
    for (int side = 0; side < 2; ++side) {
      for (int comp : {0, 1}) {  // c and s
        const auto off = c.params.relation_offset(
            static_cast<RelationId>(r), static_cast<TripleSide>(side), comp);
        for (std::size_t k = 0; k < c.params.dim(); ++k)
          CHECK(lg.grad[off + k] == 0.0);
      }
    }
  }
}

TEST_CASE("ablation validation") {
  AblationConfig abl;
  abl.use_modulus = false;
  abl.use_phase = false;
  CHECK_THROWS_AS(abl.validate(), std::invalid_argument);
}
