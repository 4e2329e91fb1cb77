#include "sectore/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace sectore {

AnnularSector sector_from_raw(std::span<const double> raw_c,
                              std::span<const double> raw_s,
                              std::span<const double> raw_theta,
                              std::span<const double> raw_a, double beta) {
  AnnularSector sec;
  sec.beta = beta;
  const std::size_t d = raw_c.size();
  sec.mod_center.resize(d);
  sec.mod_size.resize(d);
  sec.phase_center.resize(d);
  sec.arc_extra.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    sec.mod_center[i] = std::fabs(raw_c[i]);
    sec.mod_size[i] = std::fabs(raw_s[i]);
    sec.phase_center[i] = wrap_angle(raw_theta[i]);
    sec.arc_extra[i] = std::fabs(raw_a[i]);
  }
  return sec;
}

std::vector<double> dist_mod(std::span<const double> point_modulus,
                             const AnnularSector& sector) {
  std::vector<double> out(point_modulus.size());
  for (std::size_t i = 0; i < point_modulus.size(); ++i) {
    out[i] = dist_mod_dim(point_modulus[i], sector.mod_center[i],
                          sector.mod_size[i]);
  }
  return out;
}

std::vector<double> dist_phase(std::span<const double> point_phase,
                               const AnnularSector& sector) {
  std::vector<double> out(point_phase.size());
  for (std::size_t i = 0; i < point_phase.size(); ++i) {
    out[i] = dist_phase_dim(point_phase[i], sector.phase_center[i],
                            sector.angle(i));
  }
  return out;
}

bool sector_contains_dim(const AnnularSector& sector, std::size_t i,
                         double modulus, double phase) {
  if (modulus < sector.lower_clamped(i) || modulus > sector.upper(i))
    return false;
  return circular_distance(phase, sector.phase_center[i]) <=
         sector.arc_half_width(i);
}

bool sector_contains(const AnnularSector& sector, const PolarVector& point) {
  for (std::size_t i = 0; i < sector.dim(); ++i) {
    if (!sector_contains_dim(sector, i, point.modulus[i], point.phase[i]))
      return false;
  }
  return true;
}

namespace {

struct Interval {
  double lo, hi;  // nonempty: lo <= hi
};

struct Arc {
  double center;  // in [0, 2pi)
  double half;    // in [0, pi]; half == pi is the full circle
};

Interval interval_of(const AnnularSector& s, std::size_t i) {
  return {s.lower_clamped(i), s.upper(i)};
}

Arc arc_of(const AnnularSector& s, std::size_t i) {
  return {s.phase_center[i], s.arc_half_width(i)};
}

bool interval_subset(const Interval& a, const Interval& b, double eps) {
  return b.lo <= a.lo + eps && a.hi <= b.hi + eps;
}

bool interval_disjoint(const Interval& a, const Interval& b, double eps) {
  return a.hi + eps < b.lo || b.hi + eps < a.lo;
}

bool arc_full(const Arc& a, double eps) { return a.half >= kPi - eps; }

bool arc_subset(const Arc& a, const Arc& b, double eps) {
  if (arc_full(b, eps)) return true;
  return circular_distance(a.center, b.center) + a.half <= b.half + eps;
}

bool arc_disjoint(const Arc& a, const Arc& b, double eps) {
  if (arc_full(a, eps) || arc_full(b, eps)) return false;
  return circular_distance(a.center, b.center) > a.half + b.half + eps;
}

// Components of a intersect b. Arcs are intervals on the circle; two arcs can
// meet in up to two pieces. Assumes neither input is the full circle.
int arc_intersection(const Arc& a, const Arc& b, Arc out[2], double eps) {
  const double sa = a.center - a.half, ea = a.center + a.half;
  // Align b's start near a's, then test the two neighbouring period copies.
  const double sb0 = b.center - b.half;
  const double base = sb0 + kTwoPi * std::floor((sa - sb0) / kTwoPi);
  int n = 0;
  for (int k = 0; k <= 1; ++k) {
    const double sb = base + kTwoPi * k;
    const double eb = sb + 2.0 * b.half;
    const double lo = std::max(sa, sb);
    const double hi = std::min(ea, eb);
    if (hi >= lo - eps) {
      out[n].center = wrap_angle(0.5 * (lo + hi));
      out[n].half = std::max(0.0, 0.5 * (hi - lo));
      ++n;
    }
  }
  return n;
}

void check_same_dim(const AnnularSector& a, const AnnularSector& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("sector dimension mismatch: " +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
}

}  // namespace

SectorRelationReport sector_relation(const AnnularSector& a,
                                     const AnnularSector& b, double eps) {
  check_same_dim(a, b);
  SectorRelationReport rep;
  bool a_sub = true, b_sub = true, disj = false;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const Interval ia = interval_of(a, i), ib = interval_of(b, i);
    const Arc pa = arc_of(a, i), pb = arc_of(b, i);
    a_sub = a_sub && interval_subset(ia, ib, eps) && arc_subset(pa, pb, eps);
    b_sub = b_sub && interval_subset(ib, ia, eps) && arc_subset(pb, pa, eps);
    disj = disj || interval_disjoint(ia, ib, eps) || arc_disjoint(pa, pb, eps);
  }
  rep.a_subset_b = a_sub;
  rep.b_subset_a = b_sub;
  rep.equal = a_sub && b_sub;
  rep.disjoint = disj;
  rep.overlapping = !disj;
  return rep;
}

bool intersection_within(const AnnularSector& a, const AnnularSector& b,
                         const AnnularSector& c, double eps) {
  check_same_dim(a, b);
  check_same_dim(a, c);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const Interval ia = interval_of(a, i), ib = interval_of(b, i);
    const Arc pa = arc_of(a, i), pb = arc_of(b, i);
    // An empty factor in any dimension empties the whole intersection.
    if (interval_disjoint(ia, ib, eps) || arc_disjoint(pa, pb, eps))
      return true;
  }
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const Interval ia = interval_of(a, i), ib = interval_of(b, i);
    const Interval ic = interval_of(c, i);
    const Interval ii{std::max(ia.lo, ib.lo), std::min(ia.hi, ib.hi)};
    if (!interval_subset(ii, ic, eps)) return false;

    const Arc pa = arc_of(a, i), pb = arc_of(b, i), pc = arc_of(c, i);
    if (arc_full(pa, eps) && arc_full(pb, eps)) {
      if (!arc_full(pc, eps)) return false;
    } else if (arc_full(pa, eps)) {
      if (!arc_subset(pb, pc, eps)) return false;
    } else if (arc_full(pb, eps)) {
      if (!arc_subset(pa, pc, eps)) return false;
    } else {
      Arc parts[2];
      const int n = arc_intersection(pa, pb, parts, eps);
      for (int k = 0; k < n; ++k) {
        if (!arc_subset(parts[k], pc, eps)) return false;
      }
    }
  }
  return true;
}

AreaReport sector_area(const AnnularSector& sector) {
  AreaReport rep;
  rep.per_dim.resize(sector.dim());
  bool any_zero = sector.dim() == 0;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < sector.dim(); ++i) {
    const double u = sector.upper(i);
    const double l = sector.lower_clamped(i);
    const double delta_eff = std::min(sector.angle(i), kTwoPi);
    const double area = 0.5 * delta_eff * (u * u - l * l);
    rep.per_dim[i] = area;
    if (area <= 0.0) {
      any_zero = true;
    } else {
      log_sum += std::log(area);
    }
  }
  rep.geometric_mean =
      any_zero ? 0.0
               : std::exp(log_sum / static_cast<double>(sector.dim()));
  return rep;
}

}  // namespace sectore
