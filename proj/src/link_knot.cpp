#include "reebdyn/link_knot.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace reebdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;

double frac(double x) { return x - std::floor(x); }

/// Minimum distance from a point to any sample of any curve.
double clearance_of(const Vec4& pole, const std::vector<ClosedCurve>& curves) {
  double best = 1e300;
  for (const ClosedCurve& c : curves) {
    for (const Vec4& s : c.samples()) {
      best = std::min(best, (pole - s).squaredNorm());
    }
  }
  return std::sqrt(best);
}

/// Orthonormal frame (b1, b2, b3, pole) with positive determinant, so the
/// chart below is consistently oriented across pole choices.
Mat4 chart_basis(const Vec4& pole) {
  Mat4 basis;
  basis.col(3) = pole;
  int order[3];
  {
    // remaining standard axes, most transverse to the pole first
    int axes[4] = {0, 1, 2, 3};
    std::sort(axes, axes + 4, [&pole](int a, int b) {
      return std::abs(pole[a]) < std::abs(pole[b]);
    });
    order[0] = axes[0];
    order[1] = axes[1];
    order[2] = axes[2];
  }
  for (int c = 0; c < 3; ++c) {
    Vec4 v = Vec4::Unit(order[c]);
    v -= v.dot(basis.col(3)) * basis.col(3);
    for (int d = 0; d < c; ++d) {
      v -= v.dot(basis.col(d)) * basis.col(d);
    }
    const double n = v.norm();
    if (n < 1e-8) {
      throw DomainError(errc::pole_too_close,
                        "chart basis construction failed near the pole");
    }
    basis.col(c) = v / n;
  }
  if (basis.determinant() < 0.0) basis.col(2) = -basis.col(2);
  return basis;
}

std::vector<Vec3> project_curve(const ClosedCurve& curve, const Mat4& basis) {
  std::vector<Vec3> out;
  out.reserve(curve.samples().size());
  for (const Vec4& p : curve.samples()) {
    const double x1 = basis.col(0).dot(p);
    const double x2 = basis.col(1).dot(p);
    const double x3 = basis.col(2).dot(p);
    const double x4 = basis.col(3).dot(p);
    out.emplace_back(Vec3(x1, x2, x3) / (1.0 - x4));
  }
  return out;
}

StereographicResult project_with_pole(const std::vector<ClosedCurve>& curves,
                                      const Vec4& pole,
                                      double min_clearance) {
  StereographicResult result;
  result.pole = pole;
  result.pole_clearance = clearance_of(pole, curves);
  if (result.pole_clearance < min_clearance) {
    throw DomainError(errc::pole_too_close,
                      "projection pole is within " +
                          std::to_string(result.pole_clearance) +
                          " of a curve sample");
  }
  const Mat4 basis = chart_basis(pole);
  result.curves.reserve(curves.size());
  for (const ClosedCurve& c : curves) {
    result.curves.push_back(project_curve(c, basis));
  }
  return result;
}

/// Midpoint-rule Gauss linking integral of two closed polylines in R³.
double gauss_sum(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const size_t na = a.size(), nb = b.size();
  std::vector<Vec3> ma(na), ea(na), mb(nb), eb(nb);
  for (size_t i = 0; i < na; ++i) {
    const Vec3& p = a[i];
    const Vec3& q = a[(i + 1) % na];
    ma[i] = 0.5 * (p + q);
    ea[i] = q - p;
  }
  for (size_t j = 0; j < nb; ++j) {
    const Vec3& p = b[j];
    const Vec3& q = b[(j + 1) % nb];
    mb[j] = 0.5 * (p + q);
    eb[j] = q - p;
  }
  double acc = 0.0;
  for (size_t i = 0; i < na; ++i) {
    const double mix = ma[i][0], miy = ma[i][1], miz = ma[i][2];
    const double eix = ea[i][0], eiy = ea[i][1], eiz = ea[i][2];
    double row = 0.0;
    for (size_t j = 0; j < nb; ++j) {
      const double dx = mix - mb[j][0];
      const double dy = miy - mb[j][1];
      const double dz = miz - mb[j][2];
      const double cx = eiy * eb[j][2] - eiz * eb[j][1];
      const double cy = eiz * eb[j][0] - eix * eb[j][2];
      const double cz = eix * eb[j][1] - eiy * eb[j][0];
      const double r2 = dx * dx + dy * dy + dz * dz;
      row += (dx * cx + dy * cy + dz * cz) / (r2 * std::sqrt(r2));
    }
    acc += row;
  }
  return acc / (4.0 * kPi);
}

}  // namespace

ClosedCurve::ClosedCurve(std::vector<Vec4> samples)
    : samples_(std::move(samples)) {
  const size_t n = samples_.size();
  if (n < 16) {
    throw DomainError(errc::bad_input,
                      "a closed curve needs at least 16 samples, got " +
                          std::to_string(n));
  }
  for (size_t i = 0; i < n; ++i) {
    const double norm = samples_[i].norm();
    if (!(norm > 1e-6) || !samples_[i].allFinite()) {
      throw DomainError(errc::bad_input, "curve sample too close to origin");
    }
    samples_[i] /= norm;
  }
  for (size_t i = 0; i < n; ++i) {
    const double chord = (samples_[(i + 1) % n] - samples_[i]).norm();
    if (chord > 0.1) {
      throw DomainError(errc::bad_input,
                        "curve is undersampled or not closed: chord " +
                            std::to_string(chord) + " at segment " +
                            std::to_string(i));
    }
  }
}

ClosedCurve ClosedCurve::from_orbit(const PeriodicOrbit& orbit) {
  if (!(orbit.residual < 1e-8)) {
    throw DomainError(errc::bad_input,
                      "orbit closure residual " +
                          std::to_string(orbit.residual) +
                          " too large for a closed curve");
  }
  return ClosedCurve(orbit.samples);
}

ClosedCurve ClosedCurve::resampled(int n) const {
  if (n < 16) {
    throw DomainError(errc::bad_input, "resampling needs at least 16 points");
  }
  const int m = static_cast<int>(samples_.size());
  std::vector<Vec4> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = frac(static_cast<double>(i) / n) * m;
    const int j = std::min(static_cast<int>(s), m - 1);
    const double u = s - j;
    // periodic Catmull-Rom through the four surrounding samples
    const Vec4& p0 = samples_[(j + m - 1) % m];
    const Vec4& p1 = samples_[j];
    const Vec4& p2 = samples_[(j + 1) % m];
    const Vec4& p3 = samples_[(j + 2) % m];
    Vec4 q = 0.5 * ((2.0 * p1) + (p2 - p0) * u +
                    (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (u * u) +
                    (3.0 * p1 - p0 - 3.0 * p2 + p3) * (u * u * u));
    out.push_back(q / q.norm());
  }
  return ClosedCurve(std::move(out));
}

ClosedCurve ClosedCurve::reversed() const {
  const size_t n = samples_.size();
  std::vector<Vec4> out(n);
  for (size_t i = 0; i < n; ++i) {
    out[i] = samples_[(n - i) % n];
  }
  return ClosedCurve(std::move(out));
}

StereographicResult stereographic_project(
    const std::vector<ClosedCurve>& curves) {
  if (curves.empty()) {
    throw DomainError(errc::bad_input, "no curves to project");
  }
  // Deterministic low-discrepancy candidates plus the coordinate axes.
  std::vector<Vec4> candidates;
  for (int sign = -1; sign <= 1; sign += 2) {
    for (int axis = 0; axis < 4; ++axis) {
      candidates.push_back(sign * Vec4::Unit(axis));
    }
  }
  for (int i = 0; i < 80; ++i) {
    const double a = 2.0 * kPi * frac(0.5 + i * 0.6180339887498949);
    const double b = 2.0 * kPi * frac(0.5 + i * 0.4142135623730951);
    const double s = frac(0.5 + i * 0.7320508075688772);
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    candidates.emplace_back(c * std::cos(a), c * std::sin(a), s * std::cos(b),
                            s * std::sin(b));
  }
  Vec4 best = candidates.front();
  double best_cl = -1.0;
  for (const Vec4& cand : candidates) {
    const double cl = clearance_of(cand, curves);
    if (cl > best_cl) {
      best_cl = cl;
      best = cand;
    }
  }
  // Hill-climb on the sphere along tangent coordinate directions.
  double step = 0.3;
  while (step > 1e-3) {
    bool improved = false;
    for (int axis = 0; axis < 4 && !improved; ++axis) {
      for (int sign = -1; sign <= 1 && !improved; sign += 2) {
        Vec4 trial = best + sign * step * Vec4::Unit(axis);
        trial /= trial.norm();
        const double cl = clearance_of(trial, curves);
        if (cl > best_cl) {
          best_cl = cl;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return project_with_pole(curves, best, 0.02);
}

StereographicResult stereographic_project_from(
    const std::vector<ClosedCurve>& curves, const Vec4& pole) {
  if (curves.empty()) {
    throw DomainError(errc::bad_input, "no curves to project");
  }
  const double norm = pole.norm();
  if (!(norm > 1e-12)) {
    throw DomainError(errc::bad_input, "projection pole must be nonzero");
  }
  return project_with_pole(curves, Vec4(pole / norm), 1e-2);
}

LinkingResult gauss_linking_detail(const ClosedCurve& c1,
                                   const ClosedCurve& c2) {
  double d_min = 1e300;
  for (const Vec4& p : c1.samples()) {
    for (const Vec4& q : c2.samples()) {
      d_min = std::min(d_min, (p - q).squaredNorm());
    }
  }
  d_min = std::sqrt(d_min);
  if (d_min < 1e-9) {
    throw DomainError(errc::not_disjoint,
                      "curves intersect (minimum gap " +
                          std::to_string(d_min) + ")");
  }
  if (d_min < 1e-4) {
    throw DomainError(errc::curves_too_close,
                      "curves are only " + std::to_string(d_min) +
                          " apart; linking integral unreliable");
  }

  const StereographicResult chart = stereographic_project({c1, c2});
  const Mat4 basis = chart_basis(chart.pole);

  LinkingResult result;
  result.pole = chart.pole;
  for (int n = 256; n <= 4096; n *= 2) {
    const std::vector<Vec3> a = project_curve(c1.resampled(n), basis);
    const std::vector<Vec3> b = project_curve(c2.resampled(n), basis);
    const double integral = gauss_sum(a, b);
    const double rounded = std::round(integral);
    result.value = static_cast<int>(rounded);
    result.residual = std::abs(integral - rounded);
    result.samples_used = n;
    if (result.residual < 1e-2) return result;
  }
  throw DomainError(errc::residual_too_large,
                    "linking integral residual " +
                        std::to_string(result.residual) +
                        " after refinement to 4096 samples");
}

int gauss_linking(const ClosedCurve& c1, const ClosedCurve& c2) {
  return gauss_linking_detail(c1, c2).value;
}

ClosedCurve pushoff(const ClosedCurve& knot, const GlobalXiFrame& frame,
                    double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw DomainError(errc::bad_input, "pushoff size must lie in (0, 1)");
  }
  std::vector<Vec4> out;
  out.reserve(knot.samples().size());
  for (const Vec4& p : knot.samples()) {
    const Vec4 z = frame.Z1(p);
    const double zn = z.norm();
    if (!(zn > 1e-12)) {
      throw DomainError(errc::frame_degenerate,
                        "frame vanishes along the knot");
    }
    const double theta = eps * zn;
    out.push_back(Vec4(std::cos(theta) * p + std::sin(theta) * (z / zn)));
  }
  return ClosedCurve(std::move(out));
}

SelfLinkingResult self_linking_detail(const ClosedCurve& knot,
                                      const GlobalXiFrame& frame) {
  double eps = 1e-2;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    try {
      const ClosedCurve push_full = pushoff(knot, frame, eps);
      const ClosedCurve push_half = pushoff(knot, frame, eps / 2.0);
      const LinkingResult full = gauss_linking_detail(knot, push_full);
      const LinkingResult half = gauss_linking_detail(knot, push_half);
      if (full.value == half.value) {
        return SelfLinkingResult{full.value, eps,
                                 std::max(full.residual, half.residual)};
      }
    } catch (const DomainError& err) {
      if (err.code() != errc::curves_too_close &&
          err.code() != errc::residual_too_large) {
        throw;
      }
    }
    eps /= 2.0;
  }
  throw DomainError(errc::unstable_eps,
                    "self-linking did not stabilize under pushoff shrinking");
}

int self_linking(const ClosedCurve& knot, const GlobalXiFrame& frame) {
  return self_linking_detail(knot, frame).value;
}

}  // namespace reebdyn
