#pragma once

#include "reebdyn/sp_path.hpp"

namespace reebdyn {

/// Image of s ↦ (θ(1,s) − s)/2π, a closed interval of length < 1/2.
struct WindingInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct CzResult {
  int index = 0;
  bool degenerate = false;
  WindingInterval interval;
  /// Distance of the nearer interval endpoint to the integer lattice.
  double endpoint_gap = 0.0;
};

/// Compute the winding interval of a symplectic path: evaluate
/// Δ(s) = (θ(1,s) − s)/2π on an adaptive s-grid over [0,π) (Δ is π-periodic
/// in s) starting from 64 points, refining until the extrema are stable to
/// 1e−9. Interval length ≥ 1/2 is a hard error (broken path).
WindingInterval winding_interval(const SymplecticPath& path);

/// Index of a winding interval: with endpoints snapped to integers within
/// 1e−6, returns 2k when some integer k lies in [lo, hi), else 2·ceil(lo)−1.
/// (Nondegenerate intervals: 2k for an interior integer, 2k+1 when contained
/// in (k, k+1); degenerate endpoints resolved by the left-shift limit.)
int mu_hat(const WindingInterval& iv);

/// Full geometric index computation. Degeneracy is declared when an interval
/// endpoint is within 1e−6 of an integer AND |det(φ(1) − I)| < 1e−8; if the
/// two tests disagree the path is rejected (DegeneracyMismatch) rather than
/// silently classified.
CzResult cz_geometric(const SymplecticPath& path);

/// Index change under a trivialization change of relative winding sl:
/// index + 2·sl.
int framing_shift(int index, int sl);

}  // namespace reebdyn
