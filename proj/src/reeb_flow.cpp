#include "reebdyn/reeb_flow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace reebdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec4 normalized4(const Vec4& p) {
  const double n = p.norm();
  if (!(n > 1e-12) || !p.allFinite()) {
    throw DomainError(errc::bad_input, "point too close to the origin");
  }
  return p / n;
}

/// Deterministic spread of points on S³ used for positivity validation.
std::vector<Vec4> validation_grid() {
  std::vector<Vec4> pts;
  const int ns = 9, na = 8;
  for (int a = 0; a < ns; ++a) {
    const double s = static_cast<double>(a) / (ns - 1);
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < na; ++j) {
        const double al = 2.0 * kPi * (i + 0.37 * a) / na;
        const double be = 2.0 * kPi * (j + 0.61 * a) / na;
        pts.emplace_back(c * std::cos(al), c * std::sin(al), s * std::cos(be),
                         s * std::sin(be));
      }
    }
  }
  return pts;
}

/// Fixed degree-≤4 monomial basis for level perturbations, with gradients.
struct Monomial {
  std::function<double(const Vec4&)> value;
  std::function<Vec4(const Vec4&)> grad;
};

const std::vector<Monomial>& perturbation_basis() {
  static const std::vector<Monomial> basis = [] {
    std::vector<Monomial> b;
    // x = (q1, p1, q2, p2)
    b.push_back({[](const Vec4& x) { return x[0] * x[2]; },
                 [](const Vec4& x) { return Vec4(x[2], 0, x[0], 0); }});
    b.push_back({[](const Vec4& x) { return x[0] * x[3]; },
                 [](const Vec4& x) { return Vec4(x[3], 0, 0, x[0]); }});
    b.push_back({[](const Vec4& x) { return x[1] * x[2]; },
                 [](const Vec4& x) { return Vec4(0, x[2], x[1], 0); }});
    b.push_back({[](const Vec4& x) { return x[1] * x[3]; },
                 [](const Vec4& x) { return Vec4(0, x[3], 0, x[1]); }});
    b.push_back({[](const Vec4& x) { return x[0] * x[0] - x[1] * x[1]; },
                 [](const Vec4& x) { return Vec4(2 * x[0], -2 * x[1], 0, 0); }});
    b.push_back({[](const Vec4& x) { return x[2] * x[2] - x[3] * x[3]; },
                 [](const Vec4& x) { return Vec4(0, 0, 2 * x[2], -2 * x[3]); }});
    b.push_back({[](const Vec4& x) { return x[0] * x[1]; },
                 [](const Vec4& x) { return Vec4(x[1], x[0], 0, 0); }});
    b.push_back({[](const Vec4& x) { return x[2] * x[3]; },
                 [](const Vec4& x) { return Vec4(0, 0, x[3], x[2]); }});
    b.push_back(
        {[](const Vec4& x) {
           return x[0] * x[0] * x[2] * x[2] - x[1] * x[1] * x[3] * x[3];
         },
         [](const Vec4& x) {
           return Vec4(2 * x[0] * x[2] * x[2], -2 * x[1] * x[3] * x[3],
                       2 * x[0] * x[0] * x[2], -2 * x[1] * x[1] * x[3]);
         }});
    b.push_back({[](const Vec4& x) { return x[0] * x[1] * x[2] * x[3]; },
                 [](const Vec4& x) {
                   return Vec4(x[1] * x[2] * x[3], x[0] * x[2] * x[3],
                               x[0] * x[1] * x[3], x[0] * x[1] * x[2]);
                 }});
    return b;
  }();
  return basis;
}

}  // namespace

Vec4 quat_i(const Vec4& p) { return Vec4(-p[1], p[0], -p[3], p[2]); }
Vec4 quat_j(const Vec4& p) { return Vec4(-p[2], p[3], p[0], -p[1]); }
Vec4 quat_k(const Vec4& p) { return Vec4(-p[3], -p[2], p[1], p[0]); }

StarShapedLevel::StarShapedLevel(Kind kind, std::function<double(const Vec4&)> f,
                                 std::function<Vec4(const Vec4&)> grad,
                                 double r1, double r2)
    : kind_(kind), f_(std::move(f)), grad_(std::move(grad)), r1_(r1), r2_(r2) {
  for (const Vec4& p : validation_grid()) {
    const double v = f_(p);
    if (!std::isfinite(v) || v <= 1e-8) {
      throw DomainError(errc::bad_input,
                        "level weight is not positive on the sphere (f = " +
                            std::to_string(v) + ")");
    }
    if (!grad_(p).allFinite()) {
      throw DomainError(errc::bad_input,
                        "level weight gradient is not finite on the sphere");
    }
  }
}

StarShapedLevel StarShapedLevel::ellipsoid(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) {
    throw DomainError(errc::bad_input, "ellipsoid semiaxes must be positive");
  }
  const double w1 = 1.0 / (r1 * r1), w2 = 1.0 / (r2 * r2);
  auto q = [w1, w2](const Vec4& x) {
    return w1 * (x[0] * x[0] + x[1] * x[1]) + w2 * (x[2] * x[2] + x[3] * x[3]);
  };
  auto f = [q](const Vec4& x) { return 1.0 / q(x); };
  auto grad = [q, w1, w2](const Vec4& x) {
    const double qq = q(x);
    const Vec4 gq(2.0 * w1 * x[0], 2.0 * w1 * x[1], 2.0 * w2 * x[2],
                  2.0 * w2 * x[3]);
    return Vec4(-gq / (qq * qq));
  };
  return StarShapedLevel(Kind::ellipsoid, std::move(f), std::move(grad), r1,
                         r2);
}

StarShapedLevel StarShapedLevel::perturbed_ellipsoid(
    double r1, double r2, std::vector<double> coeffs, double eps) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) {
    throw DomainError(errc::bad_input, "ellipsoid semiaxes must be positive");
  }
  const auto& basis = perturbation_basis();
  if (coeffs.size() > basis.size()) {
    throw DomainError(errc::bad_input,
                      "perturbation takes at most " +
                          std::to_string(basis.size()) + " coefficients, got " +
                          std::to_string(coeffs.size()));
  }
  const StarShapedLevel base = ellipsoid(r1, r2);
  auto fb = base.f_;
  auto gb = base.grad_;
  auto g = [coeffs](const Vec4& x) {
    double acc = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i) {
      acc += coeffs[i] * perturbation_basis()[i].value(x);
    }
    return acc;
  };
  auto gg = [coeffs](const Vec4& x) {
    Vec4 acc = Vec4::Zero();
    for (size_t i = 0; i < coeffs.size(); ++i) {
      acc += coeffs[i] * perturbation_basis()[i].grad(x);
    }
    return acc;
  };
  auto f = [fb, g, eps](const Vec4& x) { return fb(x) * (1.0 + eps * g(x)); };
  auto grad = [fb, gb, g, gg, eps](const Vec4& x) {
    return Vec4(gb(x) * (1.0 + eps * g(x)) + fb(x) * eps * gg(x));
  };
  return StarShapedLevel(Kind::perturbed_ellipsoid, std::move(f),
                         std::move(grad), r1, r2);
}

StarShapedLevel StarShapedLevel::custom(std::function<double(const Vec4&)> f,
                                        std::function<Vec4(const Vec4&)> grad_f) {
  return StarShapedLevel(Kind::custom, std::move(f), std::move(grad_f), 0.0,
                         0.0);
}

double StarShapedLevel::lambda(const Vec4& p, const Vec4& v) const {
  return f_(p) * 0.5 * quat_i(p).dot(v);
}

double StarShapedLevel::dlambda(const Vec4& p, const Vec4& u,
                                const Vec4& v) const {
  const Vec4 g = grad_(p);
  const double lu = 0.5 * quat_i(p).dot(u);
  const double lv = 0.5 * quat_i(p).dot(v);
  return g.dot(u) * lv - g.dot(v) * lu + f_(p) * quat_i(u).dot(v);
}

GlobalXiFrame quaternionic_frame(const StarShapedLevel& level) {
  auto f = [level](const Vec4& p) {
    const Vec4 q = normalized4(p);
    return 1.0 / std::sqrt(level.f(q));
  };
  return GlobalXiFrame{
      [f](const Vec4& p) { return Vec4(f(p) * quat_j(normalized4(p))); },
      [f](const Vec4& p) { return Vec4(f(p) * quat_k(normalized4(p))); }};
}

Vec4 reeb_at(const StarShapedLevel& level, const Vec4& p_in) {
  const Vec4 p = normalized4(p_in);
  const double f = level.f(p);
  if (!(f > 1e-12)) {
    throw DomainError(errc::singular_system,
                      "level weight vanishes; Reeb field undefined");
  }
  const Vec4 g = level.grad_f(p);
  const Vec4 ip = quat_i(p), jp = quat_j(p), kp = quat_k(p);
  // Kernel direction of the antisymmetric dλ-Gram matrix in the orthonormal
  // tangent frame (ip, jp, kp), scaled so λ(R) = 1.
  const Vec4 kappa = f * ip + 0.5 * g.dot(kp) * jp - 0.5 * g.dot(jp) * kp;
  return Vec4(kappa * (2.0 / (f * f)));
}

// ---------------------------------------------------------------------------
// Flow: Dormand–Prince 5(4) with S³ reprojection
// ---------------------------------------------------------------------------

Vec4 flow(const StarShapedLevel& level, const Vec4& p0, double t, double tol) {
  if (!(tol > 0.0)) {
    throw DomainError(errc::bad_input, "flow tolerance must be positive");
  }
  const double direction = (t >= 0.0) ? 1.0 : -1.0;
  const double total = std::abs(t);
  auto field = [&level, direction](const Vec4& y) {
    return Vec4(direction * reeb_at(level, y));
  };

  Vec4 y = normalized4(p0);
  double done = 0.0;
  double h = std::min(0.05, total > 0.0 ? total : 0.05);
  int guard = 0;
  while (done < total - 1e-15 * (1.0 + total)) {
    if (++guard > 2000000) {
      throw DomainError(errc::integration_divergence,
                        "flow exceeded the step budget");
    }
    h = std::min(h, total - done);
    if (h < 1e-14 * (1.0 + total)) {
      throw DomainError(errc::step_size_underflow,
                        "flow step size underflowed at t = " +
                            std::to_string(direction * done));
    }
    const Vec4 k1 = field(y);
    const Vec4 k2 = field(y + h * (0.2 * k1));
    const Vec4 k3 = field(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const Vec4 k4 =
        field(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const Vec4 k5 =
        field(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                       64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const Vec4 k6 =
        field(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                       46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                       5103.0 / 18656.0 * k5));
    const Vec4 y5 =
        y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    const Vec4 k7 = field(y5);
    const Vec4 y4 =
        y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                 393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                 187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
    if (!y5.allFinite()) {
      throw DomainError(errc::integration_divergence,
                        "flow produced non-finite values");
    }
    const double err = (y5 - y4).norm();
    if (err <= tol) {
      y = y5 / y5.norm();
      done += h;
      const double grow =
          (err > 0.0) ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
      h = std::min(h, 0.2);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Linearized flow
// ---------------------------------------------------------------------------

namespace {

/// Jacobian of the 0-homogeneous Reeb extension by central differences.
Mat4 reeb_jacobian(const StarShapedLevel& level, const Vec4& p) {
  const double h = 1e-5;
  Mat4 out;
  for (int c = 0; c < 4; ++c) {
    Vec4 ep = p, em = p;
    ep[c] += h;
    em[c] -= h;
    out.col(c) = (reeb_at(level, ep) - reeb_at(level, em)) / (2.0 * h);
  }
  return out;
}

}  // namespace

SymplecticPath linearized_flow(const StarShapedLevel& level,
                               const PeriodicOrbit& orbit,
                               const GlobalXiFrame& frame) {
  if (orbit.samples.empty() || !(orbit.period > 0.0)) {
    throw DomainError(errc::bad_input, "orbit has no samples or no period");
  }
  const Vec4 p0 = normalized4(orbit.samples.front());
  const double T = orbit.period;

  const int n_nodes = 513;           // stored path resolution
  const int sub = 4;                 // integration substeps between nodes
  const int n_steps = (n_nodes - 1) * sub;
  const double ds = 1.0 / n_steps;

  const Vec4 z1_0 = frame.Z1(p0);
  const Vec4 z2_0 = frame.Z2(p0);

  // State: base point and the two transported frame vectors.
  Vec4 p = p0;
  Vec4 v1 = z1_0, v2 = z2_0;

  auto rhs = [&level, T](const Vec4& q, const Vec4& w1, const Vec4& w2,
                         Vec4& dq, Vec4& dw1, Vec4& dw2) {
    const Mat4 dr = reeb_jacobian(level, q);
    dq = T * reeb_at(level, q);
    dw1 = T * (dr * w1);
    dw2 = T * (dr * w2);
  };

  std::vector<Mat2> nodes;
  nodes.reserve(n_nodes);

  auto record = [&](const Vec4& q, const Vec4& w1, const Vec4& w2) {
    // Express (w1, w2) in the frame at q: solve [Z1 Z2 R q] c = w.
    Mat4 basis;
    basis.col(0) = frame.Z1(q);
    basis.col(1) = frame.Z2(q);
    basis.col(2) = reeb_at(level, q);
    basis.col(3) = normalized4(q);
    Eigen::PartialPivLU<Mat4> lu(basis);
    const Vec4 c1 = lu.solve(w1);
    const Vec4 c2 = lu.solve(w2);
    Mat2 m;
    m << c1[0], c2[0], c1[1], c2[1];
    const double det = m.determinant();
    if (!(det > 0.1)) {
      throw DomainError(errc::frame_degenerate,
                        "linearized flow is not expressible in the global "
                        "frame (determinant " +
                            std::to_string(det) + ")");
    }
    nodes.push_back(unit_det(m));
  };

  record(p, v1, v2);
  for (int i = 0; i < n_steps; ++i) {
    // Classical RK4 on the joined system.
    Vec4 dq1, dw11, dw21, dq2, dw12, dw22, dq3, dw13, dw23, dq4, dw14, dw24;
    rhs(p, v1, v2, dq1, dw11, dw21);
    rhs(p + 0.5 * ds * dq1, v1 + 0.5 * ds * dw11, v2 + 0.5 * ds * dw21, dq2,
        dw12, dw22);
    rhs(p + 0.5 * ds * dq2, v1 + 0.5 * ds * dw12, v2 + 0.5 * ds * dw22, dq3,
        dw13, dw23);
    rhs(p + ds * dq3, v1 + ds * dw13, v2 + ds * dw23, dq4, dw14, dw24);
    p += (ds / 6.0) * (dq1 + 2.0 * dq2 + 2.0 * dq3 + dq4);
    v1 += (ds / 6.0) * (dw11 + 2.0 * dw12 + 2.0 * dw13 + dw14);
    v2 += (ds / 6.0) * (dw21 + 2.0 * dw22 + 2.0 * dw23 + dw24);
    p = normalized4(p);
    if (!v1.allFinite() || !v2.allFinite() || v1.norm() > 1e10) {
      throw DomainError(errc::integration_divergence,
                        "variational integration diverged");
    }
    if ((i + 1) % sub == 0) record(p, v1, v2);
  }

  nodes.front() = Mat2::Identity();
  return SymplecticPath::from_samples(std::move(nodes));
}

// ---------------------------------------------------------------------------
// Orbit search
// ---------------------------------------------------------------------------

PeriodicOrbit find_orbit(const StarShapedLevel& level, const Vec4& seed,
                         double T_guess, int samples) {
  if (samples < 64) {
    throw DomainError(errc::bad_input, "orbit needs at least 64 samples");
  }
  if (!(T_guess > 1e-3)) {
    throw DomainError(errc::bad_input, "period guess must exceed 1e-3");
  }
  const Vec4 p0 = normalized4(seed);
  const Vec4 r0 = reeb_at(level, p0).normalized();

  // Orthonormal section directions spanning {p0, R(p0)}^⊥.
  Mat4 proj = Mat4::Identity() - p0 * p0.transpose() - r0 * r0.transpose();
  Eigen::SelfAdjointEigenSolver<Mat4> es(proj);
  // The two eigenvectors with eigenvalue ≈ 1 span the section.
  Vec4 w1 = es.eigenvectors().col(3);
  Vec4 w2 = es.eigenvectors().col(2);

  const double flow_tol = 1e-12;
  Vec3 u(0.0, 0.0, T_guess);
  auto point_of = [&](const Vec3& v) {
    return normalized4(Vec4(p0 + v[0] * w1 + v[1] * w2));
  };
  auto residual_of = [&](const Vec3& v) {
    const Vec4 x = point_of(v);
    return Vec4(flow(level, x, v[2], flow_tol) - x);
  };

  bool converged = false;
  for (int iter = 0; iter < 50; ++iter) {
    const Vec4 F = residual_of(u);
    if (F.norm() < 1e-10) {
      converged = true;
      break;
    }
    Eigen::Matrix<double, 4, 3> J;
    const double hstep = 1e-7;
    for (int c = 0; c < 3; ++c) {
      Vec3 up = u, um = u;
      up[c] += hstep;
      um[c] -= hstep;
      J.col(c) = (residual_of(up) - residual_of(um)) / (2.0 * hstep);
    }
    Vec3 delta = J.colPivHouseholderQr().solve(-F);
    const double cap = 0.25 * (1.0 + std::abs(u[2]));
    if (delta.norm() > cap) delta *= cap / delta.norm();
    u += delta;
    if (!(u[2] > 1e-3) || !u.allFinite()) {
      throw DomainError(errc::no_convergence,
                        "orbit refinement collapsed to zero period");
    }
  }
  if (!converged) {
    throw DomainError(errc::no_convergence,
                      "orbit refinement did not reach residual 1e-10 within "
                      "50 iterations");
  }

  const Vec4 p = point_of(u);
  const double T = u[2];

  PeriodicOrbit orbit;
  orbit.period = T;
  orbit.residual = (flow(level, p, T, 1e-13) - p).norm();
  orbit.samples.reserve(samples);
  Vec4 x = p;
  orbit.samples.push_back(x);
  for (int i = 1; i < samples; ++i) {
    x = flow(level, x, T / samples, flow_tol);
    orbit.samples.push_back(x);
  }

  orbit.minimal = true;
  for (int m = 2; m <= 64; ++m) {
    if ((flow(level, p, T / m, flow_tol) - p).norm() < 1e-8) {
      orbit.minimal = false;
      break;
    }
  }
  return orbit;
}

CzResult orbit_cz(const StarShapedLevel& level, const PeriodicOrbit& orbit) {
  return cz_geometric(linearized_flow(level, orbit, quaternionic_frame(level)));
}

// ---------------------------------------------------------------------------
// Convexity scan
// ---------------------------------------------------------------------------

namespace {

/// Distance from each sample of `a` to the polyline of `b` (nearest segment),
/// maximized over samples: a one-sided Hausdorff estimate.
double one_sided_hausdorff(const std::vector<Vec4>& a,
                           const std::vector<Vec4>& b) {
  double worst = 0.0;
  const size_t nb = b.size();
  for (size_t i = 0; i < a.size(); i += 4) {
    double best = 1e300;
    for (size_t j = 0; j < nb; ++j) {
      const Vec4& s0 = b[j];
      const Vec4& s1 = b[(j + 1) % nb];
      const Vec4 d = s1 - s0;
      const double len2 = d.squaredNorm();
      double t = (len2 > 0.0) ? (a[i] - s0).dot(d) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      best = std::min(best, (a[i] - (s0 + t * d)).squaredNorm());
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

bool same_orbit(const PeriodicOrbit& a, const PeriodicOrbit& b) {
  if (std::abs(a.period - b.period) > 1e-6 * (1.0 + a.period)) return false;
  return one_sided_hausdorff(a.samples, b.samples) < 1e-5 &&
         one_sided_hausdorff(b.samples, a.samples) < 1e-5;
}

PeriodicOrbit cover_orbit(const PeriodicOrbit& minimal, int k) {
  PeriodicOrbit cover;
  cover.period = minimal.period * k;
  cover.residual = minimal.residual;
  cover.minimal = (k == 1);
  const int n = static_cast<int>(minimal.samples.size());
  cover.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    cover.samples[i] =
        minimal.samples[static_cast<size_t>((static_cast<long>(i) * k) % n)];
  }
  return cover;
}

}  // namespace

ScanReport convexity_scan(const StarShapedLevel& level, double action_cutoff,
                          int seed_resolution) {
  if (!(action_cutoff > 0.0) || seed_resolution < 1) {
    throw DomainError(errc::bad_input, "invalid scan parameters");
  }
  ScanReport report;
  report.action_cutoff = action_cutoff;

  // Deterministic seed grid: radius splits including both coordinate
  // circles, times phase lattices.
  std::vector<Vec4> seeds;
  std::vector<double> splits = {0.0, 1.0};
  for (int k = 0; k < seed_resolution; ++k) {
    splits.push_back((k + 0.5) / seed_resolution);
  }
  const int na = 2 * seed_resolution;
  for (double s : splits) {
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    const bool degenerate_alpha = (c < 1e-12);
    const bool degenerate_beta = (s < 1e-12);
    for (int i = 0; i < na; ++i) {
      const double al = 2.0 * kPi * i / na;
      for (int j = 0; j < na; ++j) {
        const double be = 2.0 * kPi * j / na;
        seeds.emplace_back(c * std::cos(al), c * std::sin(al),
                           s * std::cos(be), s * std::sin(be));
        if (degenerate_beta) break;  // β is irrelevant on the x₁-circle
      }
      if (degenerate_alpha) break;  // α is irrelevant on the x₂-circle
    }
  }

  std::vector<PeriodicOrbit> minimal_orbits;
  const double dt = 0.02;
  const int max_steps = static_cast<int>(action_cutoff / dt) + 2;

  for (const Vec4& seed_raw : seeds) {
    const Vec4 seed = normalized4(seed_raw);
    // Walk the trajectory and record local minima of the return distance.
    double d_prev2 = 0.0, d_prev = 0.0;
    Vec4 x = seed;
    int candidates = 0;
    bool seed_failed = false;
    for (int step = 1; step <= max_steps && candidates < 3; ++step) {
      x = flow(level, x, dt, 1e-9);
      const double d = (x - seed).norm();
      const double t = step * dt;
      if (step >= 3 && d_prev < 0.08 && d_prev <= d && d_prev <= d_prev2 &&
          t - dt > 0.2) {
        ++candidates;
        try {
          // 2048 samples keep the polyline sagitta well below the 1e-5
          // geometric-deduplication threshold.
          PeriodicOrbit orb = find_orbit(level, seed, t - dt, 2048);
          if (orb.period <= action_cutoff + 1e-9 && orb.minimal) {
            bool dup = false;
            for (const PeriodicOrbit& known : minimal_orbits) {
              if (same_orbit(orb, known)) {
                dup = true;
                break;
              }
            }
            if (!dup) minimal_orbits.push_back(std::move(orb));
          }
        } catch (const DomainError&) {
          if (!seed_failed) {
            report.unconverged_seeds.push_back(seed);
            seed_failed = true;
          }
        }
      }
      d_prev2 = d_prev;
      d_prev = d;
    }
  }

  for (const PeriodicOrbit& base : minimal_orbits) {
    for (int k = 1; base.period * k <= action_cutoff + 1e-9; ++k) {
      ScanOrbit entry;
      entry.orbit = cover_orbit(base, k);
      entry.multiplicity = k;
      entry.minimal_period = base.period;
      const CzResult cz = orbit_cz(level, entry.orbit);
      entry.index = cz.index;
      entry.interval = cz.interval;
      report.orbits.push_back(std::move(entry));
    }
  }
  std::sort(report.orbits.begin(), report.orbits.end(),
            [](const ScanOrbit& a, const ScanOrbit& b) {
              return a.orbit.period < b.orbit.period;
            });

  if (!report.orbits.empty()) {
    int mi = report.orbits.front().index;
    for (const ScanOrbit& o : report.orbits) mi = std::min(mi, o.index);
    report.min_index = mi;
    report.dynamically_convex_up_to_cutoff = (mi >= 3);
  }
  return report;
}

}  // namespace reebdyn
