#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "reebdyn/errors.hpp"
#include "reebdyn/mat2.hpp"

namespace reebdyn {

/// A 2×2 real matrix with determinant 1, validated on construction
/// (tolerance 1e−10).
struct SymplecticMatrix2 {
  Mat2 m;
  explicit SymplecticMatrix2(const Mat2& value);
};

/// A continuous path φ: [0,1] → Sp(2,R) with φ(0) = I.
///
/// Two representations share one interface: closed-form builders evaluate
/// exactly at any t, while externally sampled paths are stored on a uniform
/// grid (≥ 256 nodes) and evaluated by cubic interpolation with
/// determinant renormalization. Instances are immutable value types.
class SymplecticPath {
public:
  /// φ(t) = e^{i·2π·alpha_turns·t} (rotation; alpha in full turns).
  static SymplecticPath rotation(double alpha_turns);
  /// φ(t) = [[1, a·t], [0, 1]].
  static SymplecticPath shear(double a);
  /// φ(t) = diag(e^{c t}, e^{−c t}).
  static SymplecticPath hyperbolic(double c);
  /// Exact evaluator supplied by the caller (treated as closed form).
  static SymplecticPath from_evaluator(std::function<Mat2(double)> eval,
                                       int grid_hint = 512);
  /// Uniform samples at t = i/(n−1), i = 0..n−1, n ≥ 257 (grid ≥ 256
  /// intervals); cubic interpolation in between.
  static SymplecticPath from_samples(std::vector<Mat2> samples);

  Mat2 operator()(double t) const;
  Mat2 end() const { return (*this)(1.0); }

  /// Natural evaluation grid size (number of intervals on [0,1]).
  int grid_size() const { return grid_; }
  bool exact() const { return exact_; }

private:
  SymplecticPath(std::function<Mat2(double)> eval, int grid, bool exact,
                 bool validate);
  std::function<Mat2(double)> eval_;
  int grid_ = 512;
  bool exact_ = true;

  friend SymplecticPath path_product(const SymplecticPath&,
                                     const SymplecticPath&);
  friend SymplecticPath path_inverse(const SymplecticPath&);
  friend SymplecticPath path_concat(const SymplecticPath&,
                                    const SymplecticPath&);
};

/// Pointwise product t ↦ a(t)·b(t); grid = the finer of the two.
SymplecticPath path_product(const SymplecticPath& a, const SymplecticPath& b);

/// Pointwise inverse t ↦ a(t)⁻¹.
SymplecticPath path_inverse(const SymplecticPath& a);

/// Concatenation in t: first a on [0,1/2], then the translate of b starting
/// from a(1) on [1/2,1].
SymplecticPath path_concat(const SymplecticPath& a, const SymplecticPath& b);

struct LiftResult {
  double theta1;  ///< continuous angle θ(1,s) with θ(0,s) = s
  double r_end;   ///< |φ(1)·e^{is}|
};

/// Continuous polar-angle lift of t ↦ φ(t)·e^{is}. Steps adaptively so each
/// accepted substep turns by less than π/4; bisection depth is capped at 20
/// per step (LiftResolutionFailure beyond that).
LiftResult angle_lift(const SymplecticPath& path, double s);

/// Winding number of a loop of symplectic matrices: the integer
/// (θ(1,s) − s)/2π, verified independent of s on a 16-point grid.
/// Requires ‖φ(1) − I‖ < 1e−8 (NotALoop otherwise).
int maslov_index(const SymplecticPath& loop);

/// A loop of nonzero vectors in R² sampled at t = i/n, i = 0..n−1
/// (closure implicit). Minimum sample norm must exceed 1e−10.
class PlaneSectionLoop {
public:
  explicit PlaneSectionLoop(std::vector<Vec2> samples);
  const std::vector<Vec2>& samples() const { return samples_; }
  int size() const { return static_cast<int>(samples_.size()); }

private:
  std::vector<Vec2> samples_;
};

/// Degree of a nonvanishing R²-valued loop (sum of principal-branch angle
/// increments / 2π). Throws DegenerateSection when consecutive samples turn
/// by ≥ π/2 (undersampled) or a sample is too small.
int loop_degree(const std::vector<Vec2>& samples);

/// Relative winding wind(W, Z): write W(t) = a(t)Z(t) + b(t)·J₀Z(t) and
/// return the degree of the loop a + ib. Grids must match exactly.
int wind_rel(const PlaneSectionLoop& w, const PlaneSectionLoop& z);

}  // namespace reebdyn
