#pragma once

#include <functional>
#include <vector>

#include "reebdyn/sp_path.hpp"

namespace reebdyn {

/// A 1-periodic symmetric 2×2 potential t ↦ S(t). Validated at construction:
/// symmetry pointwise and S(0) = S(1) within 1e−10.
class SymmetricPotential {
public:
  static SymmetricPotential constant(const Mat2& s);
  /// S(t) = a0 + Σ_d cos_coeffs[d]·cos(2π(d+1)t) + sin_coeffs[d]·sin(2π(d+1)t);
  /// all coefficient matrices must be symmetric.
  static SymmetricPotential trig(const Mat2& a0, std::vector<Mat2> cos_coeffs,
                                 std::vector<Mat2> sin_coeffs);
  static SymmetricPotential from_evaluator(std::function<Mat2(double)> eval);

  Mat2 operator()(double t) const;
  /// max_t ‖S − Sᵀ‖ encountered while symmetrizing (0 for exact builders).
  double symmetry_defect() const { return symmetry_defect_; }

private:
  SymmetricPotential(std::function<Mat2(double)> eval, double defect);
  std::function<Mat2(double)> eval_;
  double symmetry_defect_ = 0.0;
  friend SymmetricPotential potential_from_path(const SymplecticPath&);
};

/// One spectral line of the operator v ↦ −J₀v′ − Sv on 1-periodic R²-valued
/// functions: eigenvalue, eigenvector winding, and multiplicity (1 or 2).
struct SpectralLine {
  double value = 0.0;
  int winding = 0;
  int multiplicity = 1;
};

/// Certified slice of the spectrum inside a window. Structure invariants
/// (two eigenvalues per winding, winding monotone in value) are validated on
/// the full certified range at construction.
struct SpectrumSlice {
  std::vector<SpectralLine> lines;  ///< sorted by value, restricted to window
  int truncation = 0;               ///< Fourier mode count K used
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// Solve φ′ = J₀ S φ, φ(0) = I (the defining relation −iφ′ − Sφ = 0) by
/// classical RK4 with per-step determinant renormalization. The returned
/// path evaluates by local re-integration from stored nodes, so it is exact
/// to integrator accuracy at every t.
SymplecticPath path_from_potential(const SymmetricPotential& s,
                                   int steps = 4096);

/// Recover S(t) = −J₀ φ′(t) φ(t)⁻¹, symmetrized. Uses high-order finite
/// differences of the path. Raises NonPeriodicPotential when S(0) ≠ S(1)
/// beyond 1e−6 (spectral work needs loop-compatible paths).
SymmetricPotential potential_from_path(const SymplecticPath& path);

/// Fourier–Galerkin discretization with K modes (matrix size 2(2K+1)) in the
/// real trigonometric basis; dense symmetric eigensolve; windings from
/// eigenvector angle unwrapping on a 4K-point grid. Eigenvalues in
/// [window_lo, window_hi] are certified against a doubled-K computation to
/// 1e−8 (the window must stay well inside the resolvable range ~πK/2).
SpectrumSlice spectrum(const SymmetricPotential& s, int K, double window_lo,
                       double window_hi);

struct CzSpectralDetail {
  int index = 0;
  double lambda_minus = 0.0;  ///< max{λ ∈ σ | λ < 0}
  double lambda_plus = 0.0;   ///< min{λ ∈ σ | λ ≥ 0} (|λ| < 1e−9 counts as 0)
  int wind_minus = 0;
  int wind_plus = 0;
};

/// Spectral index 2·wind(λ⁻) + p with p = 0 when wind(λ⁺) = wind(λ⁻) and
/// p = 1 when they differ by one. Valid for degenerate paths as well.
CzSpectralDetail cz_spectral_detail(const SymmetricPotential& s, int K = 64);
int cz_spectral(const SymmetricPotential& s, int K = 64);

}  // namespace reebdyn
