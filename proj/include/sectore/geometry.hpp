#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sectore {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wrap an angle into [0, 2pi).
inline double wrap_angle(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y;
}

// Minimal distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return d > kPi ? kTwoPi - d : d;
}

// A point with one polar plane per dimension: modulus in R+, phase in [0, 2pi).
struct PolarVector {
  std::vector<double> modulus;
  std::vector<double> phase;

  std::size_t dim() const { return modulus.size(); }
};

// One annular sector per dimension. Stored in center/size form:
//   modulus interval   [c - s/2, c + s/2]   =>  depth  w = s + 1
//   phase arc          center theta, width a =>  angle  delta = a + beta*pi
// The sector boundary pair (phi, psi) is theta +- a/2.
struct AnnularSector {
  std::vector<double> mod_center;    // c, >= 0
  std::vector<double> mod_size;      // s, >= 0
  std::vector<double> phase_center;  // theta, in [0, 2pi)
  std::vector<double> arc_extra;     // a, >= 0
  double beta = 0.0;

  std::size_t dim() const { return mod_center.size(); }

  double upper(std::size_t i) const { return mod_center[i] + 0.5 * mod_size[i]; }
  double lower(std::size_t i) const { return mod_center[i] - 0.5 * mod_size[i]; }
  double lower_clamped(std::size_t i) const { return std::max(0.0, lower(i)); }
  double depth(std::size_t i) const { return mod_size[i] + 1.0; }
  double angle(std::size_t i) const { return arc_extra[i] + beta * kPi; }
  // Geometric arc half-width; the arc saturates at the full circle.
  double arc_half_width(std::size_t i) const {
    return 0.5 * std::min(angle(i), kTwoPi);
  }
};

// Map unconstrained raw parameters onto a valid sector: absolute value for
// the nonnegative quantities, modular wrap for the phase center.
AnnularSector sector_from_raw(std::span<const double> raw_c,
                              std::span<const double> raw_s,
                              std::span<const double> raw_theta,
                              std::span<const double> raw_a, double beta);

// Per-dimension modulus distance. With dm = |m - c| and w = s + 1:
//   inside  (dm <= s/2):  dm / w
//   outside (dm >  s/2):  dm * w - 0.5*(w - 1)*(w - 1/w)
// The constant makes the two pieces meet at dm = s/2.
inline double dist_mod_dim(double m, double c, double s) {
  const double w = s + 1.0;
  const double dm = std::fabs(m - c);
  if (dm <= 0.5 * s) return dm / w;
  return dm * w - 0.5 * (w - 1.0) * (w - 1.0 / w);
}

// Per-dimension phase distance. With sg = |sin((p - theta)/2)|:
//   inside  (sg <= 1/2):  sg / delta
//   outside (sg >  1/2):  sg * delta - 0.5*(delta - 1/delta)
// Continuity at sg = 1/2 is what fixes the inside threshold.
inline double dist_phase_dim(double p, double theta, double delta) {
  const double sg = std::fabs(std::sin(0.5 * (p - theta)));
  if (sg <= 0.5) return sg / delta;
  return sg * delta - 0.5 * (delta - 1.0 / delta);
}

std::vector<double> dist_mod(std::span<const double> point_modulus,
                             const AnnularSector& sector);
std::vector<double> dist_phase(std::span<const double> point_phase,
                               const AnnularSector& sector);

// Point membership under the geometric reading: modulus within the clamped
// interval [max(0,l), u] and phase within the arc of half-width
// min(delta, 2pi)/2 around theta. Used by the set predicates and analysis,
// not by the distance functions.
bool sector_contains(const AnnularSector& sector, const PolarVector& point);
bool sector_contains_dim(const AnnularSector& sector, std::size_t i,
                         double modulus, double phase);

struct SectorRelationReport {
  bool equal = false;
  bool a_subset_b = false;
  bool b_subset_a = false;
  bool disjoint = false;
  bool overlapping = false;  // regions share at least one point
};

// Set relations between two sectors of equal dimension, by per-dimension
// interval logic on the clamped modulus intervals and circular arcs.
// equal / subset flags hold iff they hold in every dimension; disjoint holds
// iff some dimension separates in modulus or phase. Comparisons use eps.
// Throws std::invalid_argument on dimension mismatch.
SectorRelationReport sector_relation(const AnnularSector& a,
                                     const AnnularSector& b,
                                     double eps = 1e-6);

// Whether (a intersect b) is contained in c, per the same interval logic.
// Needed for the intersection pattern; an empty intersection counts as
// contained. Throws std::invalid_argument on dimension mismatch.
bool intersection_within(const AnnularSector& a, const AnnularSector& b,
                         const AnnularSector& c, double eps = 1e-6);

struct AreaReport {
  std::vector<double> per_dim;
  double geometric_mean = 0.0;
};

// Per-dimension area (delta_eff/2) * (u^2 - l+^2) with delta_eff = min(delta,
// 2pi), and the geometric mean across dimensions (0 if any dimension is 0).
AreaReport sector_area(const AnnularSector& sector);

}  // namespace sectore
