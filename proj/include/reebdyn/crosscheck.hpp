#pragma once

#include <cstdint>
#include <vector>

#include "reebdyn/cz_spectral.hpp"

namespace reebdyn {

/// Seeded random trigonometric symmetric potential: degree ≤ max_degree,
/// entries bounded by max_entry on a fine grid.
SymmetricPotential random_potential(std::uint64_t seed, int max_degree = 4,
                                    double max_entry = 6.0);

/// Seeded degenerate potential: a random trig potential shifted by θ·I with
/// θ tuned (bisection on det(φ(1) − I)) so the path end matrix has
/// eigenvalue 1 to ~1e−12.
SymmetricPotential engineered_degenerate_potential(std::uint64_t seed);

struct CrosscheckItem {
  std::uint64_t seed = 0;
  bool engineered_degenerate = false;
  int geometric = 0;
  int spectral = 0;
  bool degenerate = false;
  bool agree = false;
};

struct CrosscheckReport {
  std::vector<CrosscheckItem> items;
  int agree = 0;
  int disagree = 0;
  int degenerate_count = 0;
};

/// The two-route index comparison batch: n items derived from `seed`, the
/// first n_degenerate of them engineered degenerate. Each item computes
/// cz_geometric(path_from_potential(S)) and cz_spectral(S) and compares.
CrosscheckReport crosscheck_batch(int n, std::uint64_t seed,
                                  int n_degenerate = 0, int jobs = 1);

}  // namespace reebdyn
