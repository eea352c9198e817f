#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace reebdyn {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// The standard complex structure on R², i.e. multiplication by i under
/// (x, y) ↔ x + iy.
inline Mat2 J0() {
  Mat2 j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

/// Rotation by angle `a` (radians); equals multiplication by e^{ia}.
inline Mat2 rot2(double a) {
  Mat2 r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

/// Rescale m so det = 1, distributing the correction evenly over both
/// columns. Requires det m > 0.
inline Mat2 unit_det(const Mat2& m) {
  const double d = m.determinant();
  return m / std::sqrt(d);
}

/// Inverse of a determinant-1 matrix (adjugate).
inline Mat2 sp_inverse(const Mat2& m) {
  Mat2 inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv;
}

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace reebdyn
