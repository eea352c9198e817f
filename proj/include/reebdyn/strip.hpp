#pragma once

#include <vector>

#include "reebdyn/sp_path.hpp"

namespace reebdyn {

/// Conjugacy-normal-form data of an end matrix m ∈ Sp(2,R):
///   case a: m = T⁻¹ e^Y T, Y = diag(ln a, −ln a), a > 0, a ≠ 1
///   case b: m = T⁻¹ e^Y T, Y = [[0, a],[0, 0]], a ≠ 0 (σ(m) = {1}, m ≠ I)
///   case c: m = T⁻¹ e^Y T, Y = γ·J₀, γ ∈ (0, 2π)
///   case d: −m = T⁻¹ e^Y T, Y = diag(ln(−a), −ln(−a)), a < 0, a ≠ −1
struct EndMatrixClass {
  enum class Tag { a, b, c, d };
  Tag tag = Tag::a;
  Mat2 Y = Mat2::Zero();
  Mat2 T_conj = Mat2::Identity();
  /// case a/d: the eigenvalue a (|a| > 1 canonical); case b: the shear
  /// corner (normalized to ±1); case c: the angle γ.
  double param = 0.0;
};

/// The twist profile b(t) of the model strip
/// F(r,t) = (t, (1−r)cos b(t), (1−r)sin b(t)): uniform samples of b and b′
/// on [0,1] with b(1) = b(0) − 2πk.
struct TwistFunction {
  std::vector<double> b;        ///< values at t_i = i/(n−1)
  std::vector<double> db;       ///< derivative samples
  int k = 0;
  EndMatrixClass::Tag tag = EndMatrixClass::Tag::a;
  double shear_sign = 1.0;      ///< case b only: sign of the shear corner
  double gamma = 0.0;           ///< case c only
  double log_a = 0.0;           ///< cases a/d: ln|a|
};

/// Classify an end matrix into one of the four normal-form cases.
/// Eigenvalues within 1e−8 of a case boundary (|tr∓2| tiny with no usable
/// normal form, or an elliptic angle below 1e−6) raise BoundaryCase.
EndMatrixClass classify_end_matrix(const SymplecticMatrix2& m);

/// Model path K(t) = e^{tY} (cases a, b, c) or e^{iπt}·e^{tY} (case d),
/// in closed form. K(1) agrees with T·m·T⁻¹ within 1e−8.
SymplecticPath build_model_path(const EndMatrixClass& cls);

struct ComparisonLoop {
  SymplecticPath loop;
  int maslov = 0;
};

/// The comparison loop M(t) = K(t)·(Tφ(t)T⁻¹)⁻¹, with the extra e^{i2πt}
/// factor in case b with positive shear; returns the loop and Maslov(M).
ComparisonLoop comparison_loop(const SymplecticPath& path,
                               const EndMatrixClass& cls);

/// Construct a twist profile for the given class and winding k: a smooth
/// monotone b with b(1) = b(0) − 2πk making the case inequality strict on a
/// 1024-interval grid. k ≥ 1 for cases a and b(a<0) (μ(φ) = 2k); k ≥ 0 for
/// b(a>0), c, d (μ(φ) = 2k+1).
TwistFunction build_twist(const EndMatrixClass& cls, int k);

struct DeterminantCheck {
  double min_abs = 0.0;
  int sign = 0;  ///< +1 or −1; the constant sign of ∂_r d(1,t)
};

/// Evaluate the first-order boundary coefficient ∂_r d(1,t) of the strip
/// determinant on the twist grid:
///   case a: b′ + (ln a)·sin 2b          case b: β′ + a·sin²β
///   case c: b′ − γ                      case d: β′ + ln(−a)·sin 2β
/// (β = b − 2πt when the shear is positive, β = b − πt in case d, β = b for
/// negative shear). Success requires a constant sign across the grid.
DeterminantCheck strip_determinant_check(const EndMatrixClass& cls,
                                         const TwistFunction& tw);

}  // namespace reebdyn
