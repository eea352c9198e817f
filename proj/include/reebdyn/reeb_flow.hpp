#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reebdyn/cz_geometric.hpp"
#include "reebdyn/sp_path.hpp"

namespace reebdyn {

/// A star-shaped energy level {√f(x)·x : x ∈ S³}, represented by the
/// positive weight f on S³. All dynamics are computed on S³ carrying the
/// contact form f·λ₀ (the embedded hypersurface itself is never needed).
class StarShapedLevel {
public:
  enum class Kind { ellipsoid, perturbed_ellipsoid, custom };

  /// f(x) = (|x₁|²/r₁² + |x₂|²/r₂²)⁻¹, the level of the ellipsoid with
  /// semiaxes (r1, r2) in the two complex coordinate planes.
  static StarShapedLevel ellipsoid(double r1, double r2);

  /// f_pert = f_ellipsoid · (1 + eps·g) with g a fixed degree-≤4 polynomial
  /// basis in (q₁,p₁,q₂,p₂) weighted by `coeffs` (up to 10 entries):
  ///   [q₁q₂, q₁p₂, p₁q₂, p₁p₂, q₁²−p₁², q₂²−p₂², q₁p₁, q₂p₂,
  ///    q₁²q₂²−p₁²p₂², q₁p₁q₂p₂].
  static StarShapedLevel perturbed_ellipsoid(double r1, double r2,
                                             std::vector<double> coeffs,
                                             double eps = 1.0);

  /// Custom positive weight with analytic ambient gradient.
  static StarShapedLevel custom(std::function<double(const Vec4&)> f,
                                std::function<Vec4(const Vec4&)> grad_f);

  double f(const Vec4& p) const { return f_(p); }
  Vec4 grad_f(const Vec4& p) const { return grad_(p); }
  Kind kind() const { return kind_; }
  double r1() const { return r1_; }
  double r2() const { return r2_; }

  /// λ = f λ₀ evaluated on a tangent vector at p.
  double lambda(const Vec4& p, const Vec4& v) const;
  /// dλ = df∧λ₀ + f ω₀ evaluated on a pair of tangent vectors at p.
  double dlambda(const Vec4& p, const Vec4& u, const Vec4& v) const;

private:
  StarShapedLevel(Kind kind, std::function<double(const Vec4&)> f,
                  std::function<Vec4(const Vec4&)> grad, double r1, double r2);
  Kind kind_;
  std::function<double(const Vec4&)> f_;
  std::function<Vec4(const Vec4&)> grad_;
  double r1_ = 0.0, r2_ = 0.0;
};

/// A closed Reeb trajectory: uniformly spaced samples over one period
/// (samples[i] at time i·T/n, closure implicit), the period (= action), a
/// minimality flag, and the closure residual ‖flow(p,T) − p‖.
struct PeriodicOrbit {
  std::vector<Vec4> samples;
  double period = 0.0;
  bool minimal = true;
  double residual = 0.0;
};

/// Global nonvanishing frame of the contact structure ξ = ker λ, normalized
/// so dλ(Z1, Z2) = 1 pointwise. The default is the quaternionic frame
/// Z1 ∝ j·p, Z2 ∝ k·p rescaled by f^{-1/2}.
struct GlobalXiFrame {
  std::function<Vec4(const Vec4&)> Z1;
  std::function<Vec4(const Vec4&)> Z2;
};

/// Left quaternion multiplications on R⁴ ≅ H with x = (q₁,p₁,q₂,p₂) ↔
/// x₁ + x₂·j, x₁ = q₁+ip₁, x₂ = q₂+ip₂.
Vec4 quat_i(const Vec4& p);
Vec4 quat_j(const Vec4& p);
Vec4 quat_k(const Vec4& p);

/// The dλ-normalized quaternionic frame for a level.
GlobalXiFrame quaternionic_frame(const StarShapedLevel& level);

/// Reeb vector at p: unique solution of i_R dλ = 0 on T_pS³ and λ(R) = 1,
/// obtained from the kernel of the antisymmetric dλ-Gram matrix in an
/// orthonormal tangent frame. Defining-equation residuals < 1e−10.
Vec4 reeb_at(const StarShapedLevel& level, const Vec4& p);

/// Flow p₀ forward (or backward for t < 0) by time t: adaptive embedded
/// Runge–Kutta with reprojection of accepted steps onto S³.
Vec4 flow(const StarShapedLevel& level, const Vec4& p0, double t,
          double tol = 1e-10);

/// Variational integration along an orbit: expresses dφ_{T·t}|_ξ in the
/// frame at departure/arrival points as a determinant-renormalized
/// symplectic path on t ∈ [0,1].
SymplecticPath linearized_flow(const StarShapedLevel& level,
                               const PeriodicOrbit& orbit,
                               const GlobalXiFrame& frame);

/// Newton shooting for a closed trajectory near (seed, T_guess): unknowns
/// move in the hyperplane through the seed transverse to R plus the period;
/// converged when the closure residual < 1e−10 (50 iterations max).
/// Minimality is tested via flow(p, T/m) for divisors m ≤ 64.
PeriodicOrbit find_orbit(const StarShapedLevel& level, const Vec4& seed,
                         double T_guess, int samples = 512);

/// Conley–Zehnder data of an orbit: cz_geometric of its linearized flow in
/// the global frame (= disk-induced trivialization for unknotted orbits).
CzResult orbit_cz(const StarShapedLevel& level, const PeriodicOrbit& orbit);

struct ScanOrbit {
  PeriodicOrbit orbit;
  int multiplicity = 1;   ///< covering multiplicity of the minimal orbit
  double minimal_period = 0.0;
  int index = 0;
  WindingInterval interval;
};

struct ScanReport {
  std::vector<ScanOrbit> orbits;        ///< sorted by period
  std::vector<Vec4> unconverged_seeds;  ///< seeds whose refinement failed
  std::optional<int> min_index;         ///< empty when no orbit below cutoff
  bool dynamically_convex_up_to_cutoff = false;
  double action_cutoff = 0.0;
};

/// Detect near-recurrences from a deterministic seed grid, refine with
/// find_orbit, deduplicate geometrically (Hausdorff < 1e−5, matching
/// periods), and report periods / multiplicities / indices below the action
/// cutoff.
ScanReport convexity_scan(const StarShapedLevel& level, double action_cutoff,
                          int seed_resolution);

}  // namespace reebdyn
