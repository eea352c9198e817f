#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "reebdyn/link_knot.hpp"
#include "reebdyn/reeb_flow.hpp"

namespace reebdyn {

/// A disk-like surface of section: a parametrized closed disk in S³ whose
/// open interior is the zero level of a crossing functional (with a sign
/// condition) transverse to the Reeb field, bounded by a periodic orbit.
struct DiskSection {
  /// Embedding of the closed unit disk; z is the complex disk coordinate.
  std::function<Vec4(std::complex<double>)> param;
  /// Signed functional whose zero level (where side_condition holds) is the
  /// open page.
  std::function<double(const Vec4&)> crossing;
  /// Membership test completing the page definition (e.g. Re x₂ > 0).
  std::function<bool(const Vec4&)> side_condition;
  /// Phase rate of the crossing coordinate along R (transversality margin).
  std::function<double(const Vec4&)> phase_rate;
  PeriodicOrbit boundary;
  /// Hausdorff-type defect between the parametrized boundary circle and the
  /// refined boundary orbit (0 for exact ellipsoids).
  double boundary_defect = 0.0;
  /// Chart: complex coordinate of a page point (inverse of param).
  std::function<std::complex<double>(const Vec4&)> chart;
};

/// The explicit pages of the ellipsoid open book: which = 0 is the page
/// {arg x₂ = 0} bounded by {x₂ = 0}; which = 1 is the dual page
/// {arg x₁ = 0} bounded by {x₁ = 0}. Perturbed-ellipsoid levels reuse the
/// same crossing functional; the boundary orbit is refined numerically and
/// the transversality margin re-checked (> 50% of the unperturbed value).
DiskSection ellipsoid_section(const StarShapedLevel& level, int which = 0);

struct ReturnResult {
  Vec4 point;
  double time = 0.0;
};

/// First forward crossing of the open page from an interior point:
/// integrates with event detection (sign-change bracketing on the crossing
/// functional at accepted steps, secant refinement to tol), filtered to
/// positive-direction crossings. Horizon: 10× the boundary period.
ReturnResult return_map(const StarShapedLevel& level, const DiskSection& sec,
                        const Vec4& p, double tol = 1e-12);

struct ReturnMapSample {
  Vec4 point;
  Vec4 image;
  double time = 0.0;
};

struct ReturnMapReport {
  std::vector<ReturnMapSample> samples;
  double area_defect = 0.0;
  Vec4 fixed_point;
  PeriodicOrbit fixed_point_orbit;
};

/// Damped Newton on the return displacement in the disk chart from a coarse
/// grid of starts; returns the periodic orbit through the fixed point.
PeriodicOrbit fixed_point(const StarShapedLevel& level, const DiskSection& sec);

/// Worst |dλ-area Jacobian − 1| of the return map over sampled interior
/// points (central differences in the chart, measured with dλ at source and
/// image so the result is chart-free).
double area_preservation_check(const StarShapedLevel& level,
                               const DiskSection& sec, int sample_count);

struct AuditEntry {
  Vec4 start;
  bool forward_crossed = false;
  bool backward_crossed = false;
  double forward_time = 0.0;
  double backward_time = 0.0;
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  int forward_crossings = 0;
  int backward_crossings = 0;
  int total = 0;
};

/// For N seeded random starts, verify forward and backward crossings of the
/// open page within the horizon.
AuditReport global_section_audit(const StarShapedLevel& level,
                                 const DiskSection& sec, int n_starts,
                                 double horizon, unsigned seed = 1234);

}  // namespace reebdyn
