#include "reebdyn/strip.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "reebdyn/cz_geometric.hpp"
#include "reebdyn/errors.hpp"

namespace reebdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBoundaryTol = 1e-8;
constexpr int kTwistSamples = 1025;  // 1024 intervals

double omega2(const Vec2& u, const Vec2& v) { return u[0] * v[1] - u[1] * v[0]; }

/// Fix the overall sign of a det-1 column pair so the dominant entry of the
/// first column is nonnegative (both columns flip together, det unchanged).
void canonicalize_sign(Mat2& p) {
  const double lead =
      std::abs(p(0, 0)) >= std::abs(p(1, 0)) ? p(0, 0) : p(1, 0);
  if (lead < 0.0) p = -p;
}

/// Eigenbasis of a hyperbolic matrix with trace > 2: returns P = [v+, v-]
/// with det P = 1, P^-1 n P = diag(a, 1/a), a > 1.
Mat2 hyperbolic_basis(const Mat2& n, double* a_out) {
  const double tr = n.trace();
  const double disc = std::sqrt(tr * tr - 4.0);
  const double a = 0.5 * (tr + disc);
  Mat2 p;
  for (int which = 0; which < 2; ++which) {
    const double lam = which == 0 ? a : 1.0 / a;
    const Mat2 shifted = n - lam * Mat2::Identity();
    const Vec2 r0 = shifted.row(0);
    const Vec2 r1 = shifted.row(1);
    const Vec2 r = r0.norm() >= r1.norm() ? r0 : r1;
    if (r.norm() < 1e-14) {
      throw DomainError(errc::boundary_case,
                        "eigenvector direction is numerically undefined");
    }
    p.col(which) = Vec2(-r[1], r[0]).normalized();
  }
  const double det = p.determinant();
  if (std::abs(det) < 1e-10) {
    throw DomainError(errc::boundary_case,
                      "eigenvectors collapse near the case boundary");
  }
  p.col(1) /= det;
  canonicalize_sign(p);
  *a_out = a;
  return p;
}

Mat2 case_end_matrix(const EndMatrixClass& cls) {
  switch (cls.tag) {
    case EndMatrixClass::Tag::a:
      return Mat2(Vec2(std::exp(cls.Y(0, 0)), std::exp(cls.Y(1, 1)))
                      .asDiagonal());
    case EndMatrixClass::Tag::b: {
      Mat2 e = Mat2::Identity();
      e(0, 1) = cls.Y(0, 1);
      return e;
    }
    case EndMatrixClass::Tag::c:
      return rot2(cls.param);
    case EndMatrixClass::Tag::d:
    default:
      return Mat2(-Mat2(Vec2(std::exp(cls.Y(0, 0)), std::exp(cls.Y(1, 1)))
                            .asDiagonal()));
  }
}

double reconstruction_defect(const Mat2& m, const EndMatrixClass& cls) {
  const Mat2 recon =
      sp_inverse(cls.T_conj) * case_end_matrix(cls) * cls.T_conj;
  return (m - recon).norm();
}

/// Strictly decreasing profile beta on [0,1] with beta(0) = 0,
/// beta(1) = -span and beta' = -total * u(beta), where
/// u(beta) = 1 + kappa * g(sin 2beta) and g is a smooth upper bound of
/// max(0, x). Sampled by inverting the travel-time integral in beta.
struct DescentProfile {
  std::vector<double> value;
  std::vector<double> slope;
};

DescentProfile descend(double span, double kappa) {
  const double w = std::min(0.1, 1.0 / (1.0 + kappa));
  const auto speed = [kappa, w](double beta) {
    const double x = std::sin(2.0 * beta);
    return 1.0 + kappa * 0.5 * (x + std::hypot(x, w));
  };

  const int m = 1 << 15;
  std::vector<double> tau(m + 1, 0.0);
  const double h = span / m;
  double prev = 1.0 / speed(0.0);
  for (int j = 1; j <= m; ++j) {
    const double cur = 1.0 / speed(-h * j);
    tau[j] = tau[j - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  const double total = tau[m];

  DescentProfile pr;
  pr.value.resize(kTwistSamples);
  pr.slope.resize(kTwistSamples);
  int j = 0;
  for (int i = 0; i < kTwistSamples; ++i) {
    const double target = total * static_cast<double>(i) / (kTwistSamples - 1);
    while (j + 1 < m && tau[j + 1] < target) ++j;
    const double seg = tau[j + 1] - tau[j];
    const double frac = seg > 0.0 ? (target - tau[j]) / seg : 0.0;
    pr.value[i] = -h * (j + frac);
    pr.slope[i] = -total * speed(pr.value[i]);
  }
  pr.value.front() = 0.0;
  pr.value.back() = -span;
  return pr;
}

/// The per-case boundary coefficient at one grid node.
double boundary_coefficient(const EndMatrixClass& cls, double t, double b,
                            double db) {
  switch (cls.tag) {
    case EndMatrixClass::Tag::a:
      return db + cls.Y(0, 0) * std::sin(2.0 * b);
    case EndMatrixClass::Tag::b: {
      const double beta = cls.param > 0.0 ? b - 2.0 * kPi * t : b;
      const double dbeta = cls.param > 0.0 ? db - 2.0 * kPi : db;
      const double s = std::sin(beta);
      return dbeta + cls.param * s * s;
    }
    case EndMatrixClass::Tag::c:
      return db - cls.param;
    case EndMatrixClass::Tag::d:
    default: {
      const double beta = b - kPi * t;
      return (db - kPi) + cls.Y(0, 0) * std::sin(2.0 * beta);
    }
  }
}

double worst_coefficient(const EndMatrixClass& cls, const TwistFunction& tw) {
  double worst = -1e300;
  const int n = static_cast<int>(tw.b.size());
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    worst = std::max(worst, boundary_coefficient(cls, t, tw.b[i], tw.db[i]));
  }
  return worst;
}

}  // namespace

EndMatrixClass classify_end_matrix(const SymplecticMatrix2& input) {
  const Mat2& m = input.m;
  const double tr = m.trace();
  EndMatrixClass cls;

  if (std::abs(tr + 2.0) <= kBoundaryTol) {
    // both eigenvalues pinned at -1: between the elliptic and negative
    // hyperbolic cases, no usable normal form
    throw DomainError(errc::boundary_case,
                      "trace within 1e-8 of -2 (double eigenvalue -1)");
  }

  if (std::abs(tr - 2.0) <= kBoundaryTol) {
    // parabolic band: either a genuine unipotent matrix or an eigenvalue
    // pair unresolvably close to +1
    if ((m - Mat2::Identity()).norm() <= kBoundaryTol) {
      throw DomainError(errc::boundary_case, "matrix is the identity");
    }
    const Mat2 n = m - Mat2::Identity();
    const Vec2 r0 = n.row(0);
    const Vec2 r1 = n.row(1);
    const Vec2 r = r0.norm() >= r1.norm() ? r0 : r1;
    const Vec2 v = Vec2(-r[1], r[0]).normalized();  // kernel = image direction
    const Vec2 w(-v[1], v[0]);                      // omega2(v, w) = 1
    const Vec2 u = m * w - w;
    const double c = omega2(u, w);
    if (std::abs(c) <= kBoundaryTol) {
      throw DomainError(errc::boundary_case,
                        "shear corner is numerically zero");
    }
    const double s = std::sqrt(std::abs(c));
    Mat2 p;
    p.col(0) = s * v;
    p.col(1) = w / s;
    canonicalize_sign(p);
    cls.tag = EndMatrixClass::Tag::b;
    cls.param = c > 0.0 ? 1.0 : -1.0;
    cls.Y = Mat2::Zero();
    cls.Y(0, 1) = cls.param;
    cls.T_conj = sp_inverse(p);
  } else if (tr > 2.0) {
    double a = 0.0;
    const Mat2 p = hyperbolic_basis(m, &a);
    cls.tag = EndMatrixClass::Tag::a;
    cls.param = a;
    cls.Y = Mat2(Vec2(std::log(a), -std::log(a)).asDiagonal());
    cls.T_conj = sp_inverse(p);
  } else if (tr < -2.0) {
    double a = 0.0;
    const Mat2 p = hyperbolic_basis(Mat2(-m), &a);
    cls.tag = EndMatrixClass::Tag::d;
    cls.param = -a;
    cls.Y = Mat2(Vec2(std::log(a), -std::log(a)).asDiagonal());
    cls.T_conj = sp_inverse(p);
  } else {
    // elliptic: trace strictly inside (-2, 2)
    const double g0 = std::acos(std::clamp(0.5 * tr, -1.0, 1.0));
    const double sg = std::sin(g0);
    // complex eigenvector for e^{i g0} from the better-conditioned row of
    // m - lambda I; real/imaginary parts span the invariant plane
    const Vec2 row0(m(0, 0) - std::cos(g0), m(0, 1));
    const Vec2 row1(m(1, 0), m(1, 1) - std::cos(g0));
    Vec2 u, w;
    if (row0.norm() >= row1.norm()) {
      u = Vec2(-row0[1], row0[0]);
      w = Vec2(0.0, -sg);
    } else {
      u = Vec2(-row1[1], row1[0]);
      w = Vec2(sg, 0.0);
    }
    double gamma = 0.0;
    Mat2 p;
    p.col(0) = u;
    const double det = omega2(u, w);
    if (std::abs(det) < 1e-12) {
      throw DomainError(errc::boundary_case,
                        "elliptic eigenplane is numerically degenerate");
    }
    if (det < 0.0) {
      gamma = g0;
      p.col(1) = -w;
    } else {
      gamma = 2.0 * kPi - g0;
      p.col(1) = w;
    }
    p /= std::sqrt(std::abs(p.determinant()));
    canonicalize_sign(p);
    if (gamma < 1e-6 || 2.0 * kPi - gamma < 1e-6) {
      throw DomainError(errc::boundary_case, "elliptic angle below 1e-6");
    }
    cls.tag = EndMatrixClass::Tag::c;
    cls.param = gamma;
    cls.Y = gamma * J0();
    cls.T_conj = sp_inverse(p);
  }

  if (reconstruction_defect(m, cls) > kBoundaryTol) {
    throw DomainError(errc::boundary_case,
                      "no normal form reconstructs the matrix within 1e-8");
  }
  return cls;
}

SymplecticPath build_model_path(const EndMatrixClass& cls) {
  switch (cls.tag) {
    case EndMatrixClass::Tag::a: {
      const double la = cls.Y(0, 0);
      return SymplecticPath::from_evaluator(
          [la](double t) {
            return Mat2(
                Vec2(std::exp(la * t), std::exp(-la * t)).asDiagonal());
          },
          512);
    }
    case EndMatrixClass::Tag::b: {
      const double c = cls.Y(0, 1);
      return SymplecticPath::from_evaluator(
          [c](double t) {
            Mat2 k = Mat2::Identity();
            k(0, 1) = c * t;
            return k;
          },
          512);
    }
    case EndMatrixClass::Tag::c: {
      const double gamma = cls.param;
      return SymplecticPath::from_evaluator(
          [gamma](double t) { return rot2(gamma * t); }, 512);
    }
    case EndMatrixClass::Tag::d:
    default: {
      const double la = cls.Y(0, 0);
      return SymplecticPath::from_evaluator(
          [la](double t) {
            return Mat2(
                rot2(kPi * t) *
                Mat2(Vec2(std::exp(la * t), std::exp(-la * t)).asDiagonal()));
          },
          512);
    }
  }
}

ComparisonLoop comparison_loop(const SymplecticPath& path,
                               const EndMatrixClass& cls) {
  const SymplecticPath model = build_model_path(cls);
  const Mat2 t_conj = cls.T_conj;
  const Mat2 t_inv = sp_inverse(t_conj);
  const bool extra_turn =
      cls.tag == EndMatrixClass::Tag::b && cls.param > 0.0;

  const int grid = std::max(512, 2 * path.grid_size());
  SymplecticPath loop = SymplecticPath::from_evaluator(
      [model, path, t_conj, t_inv, extra_turn](double t) {
        const Mat2 conj = t_conj * path(t) * t_inv;
        Mat2 m = model(t) * sp_inverse(conj);
        if (extra_turn) m = rot2(2.0 * kPi * t) * m;
        return m;
      },
      grid);

  const int maslov = maslov_index(loop);

  // consistency: the path index must equal the model index corrected by the
  // loop winding (and the extra full turn in the positive-shear case)
  const int mu_path = cz_geometric(path).index;
  const int mu_model = cz_geometric(model).index;
  if (mu_path != mu_model + 2 * (extra_turn ? 1 : 0) - 2 * maslov) {
    throw DomainError(errc::inconsistent_winding,
                      "comparison loop winding contradicts the two indices");
  }
  return ComparisonLoop{loop, maslov};
}

TwistFunction build_twist(const EndMatrixClass& cls, int k) {
  const bool even_case =
      cls.tag == EndMatrixClass::Tag::a ||
      (cls.tag == EndMatrixClass::Tag::b && cls.param < 0.0);
  if (k < (even_case ? 1 : 0)) {
    throw DomainError(errc::bad_input,
                      "winding k below the admissible range for this case");
  }

  TwistFunction tw;
  tw.k = k;
  tw.tag = cls.tag;
  tw.b.resize(kTwistSamples);
  tw.db.resize(kTwistSamples);

  switch (cls.tag) {
    case EndMatrixClass::Tag::b:
      tw.shear_sign = cls.param;
      [[fallthrough]];
    case EndMatrixClass::Tag::c: {
      if (cls.tag == EndMatrixClass::Tag::c) tw.gamma = cls.param;
      // linear profile: the case inequality already holds with slope -2pi k
      for (int i = 0; i < kTwistSamples; ++i) {
        const double t = static_cast<double>(i) / (kTwistSamples - 1);
        tw.b[i] = -2.0 * kPi * k * t;
        tw.db[i] = -2.0 * kPi * k;
      }
      break;
    }
    case EndMatrixClass::Tag::a:
    case EndMatrixClass::Tag::d: {
      tw.log_a = cls.Y(0, 0);
      const bool is_d = cls.tag == EndMatrixClass::Tag::d;
      // descend in the shifted angle beta: span 2pi k (case a) or
      // 2pi k + pi (case d, beta = b - pi t)
      const double span = 2.0 * kPi * k + (is_d ? kPi : 0.0);
      double kappa = std::max(1.0, tw.log_a);
      for (int attempt = 0; attempt < 5; ++attempt) {
        const DescentProfile pr = descend(span, kappa);
        for (int i = 0; i < kTwistSamples; ++i) {
          const double t = static_cast<double>(i) / (kTwistSamples - 1);
          tw.b[i] = pr.value[i] + (is_d ? kPi * t : 0.0);
          tw.db[i] = pr.slope[i] + (is_d ? kPi : 0.0);
        }
        if (span == 0.0 || worst_coefficient(cls, tw) < -1e-9) break;
        kappa *= 2.0;
      }
      break;
    }
  }

  if (worst_coefficient(cls, tw) >= -1e-12) {
    throw DomainError(errc::inequality_violated,
                      "twist slope fails the strict case inequality");
  }
  return tw;
}

DeterminantCheck strip_determinant_check(const EndMatrixClass& cls,
                                         const TwistFunction& tw) {
  if (tw.tag != cls.tag) {
    throw DomainError(errc::bad_input,
                      "twist profile belongs to a different case");
  }
  const int n = static_cast<int>(tw.b.size());
  if (n < 2 || tw.db.size() != tw.b.size()) {
    throw DomainError(errc::bad_input, "twist grid is malformed");
  }

  DeterminantCheck result;
  result.min_abs = 1e300;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const double d = boundary_coefficient(cls, t, tw.b[i], tw.db[i]);
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0 || (result.sign != 0 && sign != result.sign)) {
      throw DomainError(errc::sign_change,
                        "boundary coefficient changes sign on the grid");
    }
    result.sign = sign;
    result.min_abs = std::min(result.min_abs, std::abs(d));
  }
  return result;
}

}  // namespace reebdyn
