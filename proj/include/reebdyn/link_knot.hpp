#pragma once

#include <vector>

#include "reebdyn/reeb_flow.hpp"

namespace reebdyn {

/// A closed oriented curve on S³: samples[i] at parameter i/n, closure
/// implicit. Closure defect must be < 1e−8 and consecutive chords ≤ 0.1.
class ClosedCurve {
public:
  explicit ClosedCurve(std::vector<Vec4> samples);
  static ClosedCurve from_orbit(const PeriodicOrbit& orbit);

  const std::vector<Vec4>& samples() const { return samples_; }
  int size() const { return static_cast<int>(samples_.size()); }
  /// Trigonometrically-smooth resampling to n points (periodic cubic
  /// spline through the samples, reprojected to S³).
  ClosedCurve resampled(int n) const;
  ClosedCurve reversed() const;

private:
  std::vector<Vec4> samples_;
};

struct StereographicResult {
  std::vector<std::vector<Vec3>> curves;  ///< projected images
  Vec4 pole;
  double pole_clearance = 0.0;  ///< min distance from pole to any sample
};

/// Project curves to R³ from a pole chosen to maximize the minimum distance
/// to all samples (coarse lattice search, then hill-climb refinement). The
/// chart is orientation-preserving from (S³, λ∧dλ) to standard R³.
StereographicResult stereographic_project(const std::vector<ClosedCurve>& curves);

/// Same projection from an explicitly given pole (used for the
/// pole-invariance audit). The pole is normalized internally.
StereographicResult stereographic_project_from(
    const std::vector<ClosedCurve>& curves, const Vec4& pole);

struct LinkingResult {
  int value = 0;
  double residual = 0.0;  ///< |integral − value| after refinement
  int samples_used = 0;   ///< per-curve sample count at the last refinement
  Vec4 pole;
};

/// Linking number of two disjoint closed curves: Gauss double integral over
/// the stereographic images (midpoint rule, refined by doubling until the
/// integer residual < 1e−2 or the 4096-sample cap), rounded to the nearest
/// integer.
LinkingResult gauss_linking_detail(const ClosedCurve& c1, const ClosedCurve& c2);
int gauss_linking(const ClosedCurve& c1, const ClosedCurve& c2);

/// Geodesic pushoff p ↦ exp_p(eps·Z1(p)) along the first frame leg.
ClosedCurve pushoff(const ClosedCurve& knot, const GlobalXiFrame& frame,
                    double eps);

struct SelfLinkingResult {
  int value = 0;
  double eps_used = 0.0;
  double residual = 0.0;
};

/// Self-linking number: linking of the knot with its frame pushoff, with
/// eps auto-selected (start 1e−2, halve while disjointness or stability
/// under eps/2 fails, at most 6 halvings).
SelfLinkingResult self_linking_detail(const ClosedCurve& knot,
                                      const GlobalXiFrame& frame);
int self_linking(const ClosedCurve& knot, const GlobalXiFrame& frame);

}  // namespace reebdyn
