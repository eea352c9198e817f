#include "reebdyn/cz_spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace reebdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTau = 2.0 * kPi;

double frac01(double t) { return t - std::floor(t); }

Mat2 sym_part(const Mat2& m) { return 0.5 * (m + m.transpose()); }

// ---------------------------------------------------------------------------
// Potential plumbing
// ---------------------------------------------------------------------------

void require_symmetric_coeff(const Mat2& m, const char* what) {
  if ((m - m.transpose()).norm() > 1e-12) {
    throw DomainError(errc::bad_input,
                      std::string(what) + " coefficient matrix is not "
                                          "symmetric");
  }
}

}  // namespace

SymmetricPotential::SymmetricPotential(std::function<Mat2(double)> eval,
                                       double defect)
    : eval_(std::move(eval)), symmetry_defect_(defect) {}

SymmetricPotential SymmetricPotential::constant(const Mat2& s) {
  require_symmetric_coeff(s, "constant");
  return SymmetricPotential([s](double) { return s; }, 0.0);
}

SymmetricPotential SymmetricPotential::trig(const Mat2& a0,
                                            std::vector<Mat2> cos_coeffs,
                                            std::vector<Mat2> sin_coeffs) {
  require_symmetric_coeff(a0, "constant-term");
  for (const Mat2& c : cos_coeffs) require_symmetric_coeff(c, "cosine");
  for (const Mat2& c : sin_coeffs) require_symmetric_coeff(c, "sine");
  auto cc = std::make_shared<std::vector<Mat2>>(std::move(cos_coeffs));
  auto sc = std::make_shared<std::vector<Mat2>>(std::move(sin_coeffs));
  auto eval = [a0, cc, sc](double t) {
    Mat2 acc = a0;
    for (size_t d = 0; d < cc->size(); ++d) {
      acc += std::cos(kTau * static_cast<double>(d + 1) * t) * (*cc)[d];
    }
    for (size_t d = 0; d < sc->size(); ++d) {
      acc += std::sin(kTau * static_cast<double>(d + 1) * t) * (*sc)[d];
    }
    return acc;
  };
  return SymmetricPotential(std::move(eval), 0.0);
}

SymmetricPotential SymmetricPotential::from_evaluator(
    std::function<Mat2(double)> eval) {
  double defect = 0.0;
  for (int i = 0; i <= 128; ++i) {
    const double t = static_cast<double>(i) / 128.0;
    const Mat2 m = eval(t);
    if (!m.allFinite()) {
      throw DomainError(errc::bad_input,
                        "potential evaluates to a non-finite matrix");
    }
    defect = std::max(defect, (m - m.transpose()).norm());
  }
  if (defect > 1e-6) {
    throw DomainError(errc::bad_input,
                      "potential asymmetry " + std::to_string(defect) +
                          " exceeds 1e-6");
  }
  if ((eval(0.0) - eval(1.0)).norm() > 1e-10) {
    throw DomainError(errc::non_periodic_potential,
                      "potential values at t = 0 and t = 1 differ beyond "
                      "1e-10");
  }
  // Wrap to [0,1) so the stored potential is exactly 1-periodic, and
  // symmetrize pointwise.
  auto wrapped = [eval = std::move(eval)](double t) {
    return sym_part(eval(frac01(t)));
  };
  return SymmetricPotential(std::move(wrapped), defect);
}

Mat2 SymmetricPotential::operator()(double t) const { return eval_(t); }

// ---------------------------------------------------------------------------
// Path ↔ potential
// ---------------------------------------------------------------------------

namespace {

Mat2 rk4_step(const SymmetricPotential& s, const Mat2& phi, double t,
              double h) {
  const Mat2 j = J0();
  auto f = [&](double u, const Mat2& m) { return Mat2(j * s(u) * m); };
  const Mat2 k1 = f(t, phi);
  const Mat2 k2 = f(t + 0.5 * h, phi + 0.5 * h * k1);
  const Mat2 k3 = f(t + 0.5 * h, phi + 0.5 * h * k2);
  const Mat2 k4 = f(t + h, phi + h * k3);
  return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

SymplecticPath path_from_potential(const SymmetricPotential& s, int steps) {
  const int n = std::max(steps, 256);
  auto nodes = std::make_shared<std::vector<Mat2>>();
  nodes->reserve(n + 1);
  Mat2 phi = Mat2::Identity();
  nodes->push_back(phi);
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    phi = rk4_step(s, phi, i * h, h);
    if (!phi.allFinite() || max_abs(phi) > 1e12) {
      throw DomainError(errc::integration_divergence,
                        "fundamental solution blew up near t = " +
                            std::to_string((i + 1) * h));
    }
    phi = unit_det(phi);
    nodes->push_back(phi);
  }

  // Local re-integration from the nearest stored node keeps off-node values
  // at integrator accuracy (interpolation would cap the winding resolution).
  SymmetricPotential pot = s;
  auto eval = [nodes, pot, n](double t) -> Mat2 {
    const double x = std::clamp(t, 0.0, 1.0) * n;
    int j = static_cast<int>(std::floor(x));
    j = std::min(j, n);
    const double t0 = static_cast<double>(j) / n;
    const double dt = t - t0;
    if (std::abs(dt) < 1e-14) return (*nodes)[j];
    return unit_det(rk4_step(pot, (*nodes)[j], t0, dt));
  };
  SymplecticPath path = SymplecticPath::from_evaluator(std::move(eval), n);

  // Verify the defining relation φ' = J₀Sφ on a spot grid by high-order
  // finite differences.
  const Mat2 j0 = J0();
  const double fd = 1.0 / n;
  static const double w6[7] = {-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0,
                               3.0 / 4.0,   -3.0 / 20.0, 1.0 / 60.0};
  for (int i = 1; i < 32; ++i) {
    const double t = static_cast<double>(i) / 32.0;
    if (t - 3.0 * fd < 0.0 || t + 3.0 * fd > 1.0) continue;
    Mat2 deriv = Mat2::Zero();
    for (int q = -3; q <= 3; ++q) deriv += w6[q + 3] * path(t + q * fd);
    deriv /= fd;
    const Mat2 residual = deriv - j0 * pot(t) * path(t);
    const double scale = std::max(1.0, max_abs(path(t)));
    if (max_abs(residual) > 1e-8 * scale) {
      throw DomainError(errc::integration_divergence,
                        "integrated path fails the defining relation at t = " +
                            std::to_string(t) + " (residual " +
                            std::to_string(max_abs(residual) / scale) + ")");
    }
  }
  return path;
}

SymmetricPotential potential_from_path(const SymplecticPath& path) {
  const double h = 1e-4;
  const Mat2 j0 = J0();

  auto derivative = [&path, h](double t) -> Mat2 {
    if (t >= 2.0 * h && t <= 1.0 - 2.0 * h) {
      // central 5-point, order 4
      return (path(t - 2.0 * h) - 8.0 * path(t - h) + 8.0 * path(t + h) -
              path(t + 2.0 * h)) /
             (12.0 * h);
    }
    const double dir = (t < 0.5) ? 1.0 : -1.0;
    const double g = dir * h;
    // one-sided 5-point, order 4
    return (-25.0 * path(t) + 48.0 * path(t + g) - 36.0 * path(t + 2.0 * g) +
            16.0 * path(t + 3.0 * g) - 3.0 * path(t + 4.0 * g)) /
           (12.0 * g);
  };

  auto raw = [&](double t) -> Mat2 {
    return Mat2(-j0 * derivative(t) * sp_inverse(unit_det(path(t))));
  };

  const Mat2 s0 = raw(0.0);
  const Mat2 s1 = raw(1.0);
  if ((s0 - s1).norm() > 1e-6) {
    throw DomainError(errc::non_periodic_potential,
                      "recovered potential differs at the endpoints by " +
                          std::to_string((s0 - s1).norm()) +
                          "; the path does not close up periodically");
  }

  double defect = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const Mat2 m = raw(static_cast<double>(i) / 64.0);
    defect = std::max(defect, (m - m.transpose()).norm());
  }

  // Keep a handle on the path inside the closure; evaluate on [0,1) so the
  // result is exactly periodic.
  SymplecticPath copy = path;
  auto eval = [copy, h, j0](double t) -> Mat2 {
    const double u = frac01(t);
    Mat2 deriv;
    if (u >= 2.0 * h && u <= 1.0 - 2.0 * h) {
      deriv = (copy(u - 2.0 * h) - 8.0 * copy(u - h) + 8.0 * copy(u + h) -
               copy(u + 2.0 * h)) /
              (12.0 * h);
    } else {
      const double dir = (u < 0.5) ? 1.0 : -1.0;
      const double g = dir * h;
      deriv = (-25.0 * copy(u) + 48.0 * copy(u + g) - 36.0 * copy(u + 2.0 * g) +
               16.0 * copy(u + 3.0 * g) - 3.0 * copy(u + 4.0 * g)) /
              (12.0 * g);
    }
    return sym_part(Mat2(-j0 * deriv * sp_inverse(unit_det(copy(u)))));
  };
  return SymmetricPotential(std::move(eval), defect);
}

// ---------------------------------------------------------------------------
// Fourier–Galerkin spectrum
// ---------------------------------------------------------------------------

namespace {

struct GalerkinSolution {
  int K = 0;
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

/// Trapezoid Fourier coefficients ∫S·cos(2πdt), ∫S·sin(2πdt) for d = 0..dmax.
void fourier_coefficients(const SymmetricPotential& s, int dmax,
                          std::vector<Mat2>& cosc, std::vector<Mat2>& sinc) {
  const int n = std::max(512, 4 * dmax + 64);
  cosc.assign(dmax + 1, Mat2::Zero());
  sinc.assign(dmax + 1, Mat2::Zero());
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Mat2 st = s(t);
    for (int d = 0; d <= dmax; ++d) {
      const double a = kTau * d * t;
      cosc[d] += std::cos(a) * st;
      sinc[d] += std::sin(a) * st;
    }
  }
  for (int d = 0; d <= dmax; ++d) {
    cosc[d] /= n;
    sinc[d] /= n;
  }
}

GalerkinSolution solve_galerkin(const SymmetricPotential& s, int K) {
  const int modes = 2 * K + 1;    // scalar basis functions
  const int M = 2 * modes;        // block size
  std::vector<Mat2> cosc, sinc;
  fourier_coefficients(s, 2 * K, cosc, sinc);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
  auto sub = [&A](int m, int n, const Mat2& b) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) A(2 * m + i, 2 * n + j) -= b(i, j);
    }
  };

  // Derivative part: ⟨β_m e_i, −J₀(β_n e_j)'⟩ couples cos_k with sin_k.
  const Mat2 j0 = J0();
  for (int k = 1; k <= K; ++k) {
    const double w = kTau * k;
    const int mc = 2 * k - 1, ms = 2 * k;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        A(2 * mc + i, 2 * ms + j) += -j0(i, j) * w;
        A(2 * ms + i, 2 * mc + j) += j0(i, j) * w;
      }
    }
  }

  // Potential part via product-to-sum expansion of basis products.
  const double r2 = std::sqrt(2.0);
  sub(0, 0, cosc[0]);
  for (int k = 1; k <= K; ++k) {
    sub(0, 2 * k - 1, r2 * cosc[k]);
    sub(2 * k - 1, 0, r2 * cosc[k]);
    sub(0, 2 * k, r2 * sinc[k]);
    sub(2 * k, 0, r2 * sinc[k]);
  }
  for (int a = 1; a <= K; ++a) {
    for (int b = 1; b <= K; ++b) {
      const int dd = std::abs(a - b);
      const int ss = a + b;
      const double sg = (a > b) ? 1.0 : (a < b ? -1.0 : 0.0);
      sub(2 * a - 1, 2 * b - 1, cosc[dd] + cosc[ss]);       // cos·cos
      sub(2 * a, 2 * b, cosc[dd] - cosc[ss]);               // sin·sin
      sub(2 * a - 1, 2 * b, sinc[ss] - sg * sinc[dd]);      // cos·sin
      sub(2 * a, 2 * b - 1, sinc[ss] + sg * sinc[dd]);      // sin·cos
    }
  }

  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    throw DomainError(errc::truncation_not_converged,
                      "dense symmetric eigensolve failed");
  }
  return GalerkinSolution{K, es.eigenvalues(), es.eigenvectors()};
}

Vec2 eigenfunction_value(const Eigen::VectorXd& c, int K, double t) {
  Vec2 acc(c[0], c[1]);
  const double r2 = std::sqrt(2.0);
  for (int k = 1; k <= K; ++k) {
    const double ck = r2 * std::cos(kTau * k * t);
    const double sk = r2 * std::sin(kTau * k * t);
    acc.x() += ck * c[2 * (2 * k - 1)] + sk * c[2 * (2 * k)];
    acc.y() += ck * c[2 * (2 * k - 1) + 1] + sk * c[2 * (2 * k) + 1];
  }
  return acc;
}

double angle_increment(const Eigen::VectorXd& c, int K, const Vec2& a,
                       const Vec2& b, double t0, double t1, int depth) {
  const double inc = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  if (std::abs(inc) < kPi / 2.0) return inc;
  if (depth > 16) {
    throw DomainError(errc::winding_ambiguous,
                      "eigenfunction turns too fast to resolve its winding");
  }
  const double tm = 0.5 * (t0 + t1);
  const Vec2 m = eigenfunction_value(c, K, tm);
  if (m.norm() < 1e-8) {
    throw DomainError(errc::winding_ambiguous,
                      "eigenfunction nearly vanishes at t = " +
                          std::to_string(tm));
  }
  return angle_increment(c, K, a, m, t0, tm, depth + 1) +
         angle_increment(c, K, m, b, tm, t1, depth + 1);
}

int eigenfunction_winding(const Eigen::VectorXd& c, int K) {
  const int n = std::max(256, 4 * K);
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) {
    pts[i] = eigenfunction_value(c, K, static_cast<double>(i) / n);
    if (pts[i].norm() < 1e-8) {
      throw DomainError(errc::winding_ambiguous,
                        "eigenfunction nearly vanishes on the sampling grid; "
                        "winding undefined");
    }
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t0 = static_cast<double>(i) / n;
    const double t1 = static_cast<double>(i + 1) / n;
    total += angle_increment(c, K, pts[i], pts[(i + 1) % n], t0, t1, 0);
  }
  const double turns = total / kTau;
  const long k = std::lround(turns);
  if (std::abs(turns - static_cast<double>(k)) > 1e-6) {
    throw DomainError(errc::winding_ambiguous,
                      "eigenfunction winding " + std::to_string(turns) +
                          " is not an integer");
  }
  return static_cast<int>(k);
}

/// Cluster in-window eigenvalues into spectral lines with windings.
std::vector<SpectralLine> window_lines(const GalerkinSolution& g, double lo,
                                       double hi) {
  std::vector<SpectralLine> lines;
  const int m = static_cast<int>(g.values.size());
  int i = 0;
  while (i < m) {
    const double v = g.values[i];
    if (v < lo || v > hi) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < m && std::abs(g.values[j + 1] - v) <
                            1e-7 * std::max(1.0, std::abs(v))) {
      ++j;
    }
    const int mult = j - i + 1;
    if (mult > 2) {
      throw DomainError(errc::truncation_not_converged,
                        "eigenvalue cluster of size " + std::to_string(mult) +
                            " near " + std::to_string(v) +
                            "; multiplicity above 2 signals an unresolved "
                            "discretization");
    }
    const int w = eigenfunction_winding(g.vectors.col(i), g.K);
    if (mult == 2) {
      const int w2 = eigenfunction_winding(g.vectors.col(j), g.K);
      if (w2 != w) {
        throw DomainError(errc::truncation_not_converged,
                          "windings inside a degenerate cluster disagree (" +
                              std::to_string(w) + " vs " + std::to_string(w2) +
                              ")");
      }
    }
    double mean = 0.0;
    for (int q = i; q <= j; ++q) mean += g.values[q];
    mean /= mult;
    lines.push_back(SpectralLine{mean, w, mult});
    i = j + 1;
  }
  return lines;
}

void validate_structure(const std::vector<SpectralLine>& lines) {
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].value < lines[i - 1].value - 1e-12 ||
        lines[i].winding < lines[i - 1].winding) {
      throw DomainError(errc::inconsistent_winding,
                        "eigenvector winding is not monotone in the "
                        "eigenvalue");
    }
  }
  if (lines.empty()) return;
  const int w_lo = lines.front().winding;
  const int w_hi = lines.back().winding;
  for (int w = w_lo; w <= w_hi; ++w) {
    int count = 0;
    for (const SpectralLine& l : lines) {
      if (l.winding == w) count += l.multiplicity;
    }
    if (count > 2 || (w > w_lo && w < w_hi && count != 2)) {
      throw DomainError(errc::inconsistent_winding,
                        "winding " + std::to_string(w) + " carries " +
                            std::to_string(count) +
                            " eigenvalues in the window; expected 2");
    }
  }
}

}  // namespace

SpectrumSlice spectrum(const SymmetricPotential& s, int K, double window_lo,
                       double window_hi) {
  if (K < 8) {
    throw DomainError(errc::bad_input, "truncation K must be at least 8");
  }
  if (!(window_lo <= window_hi)) {
    throw DomainError(errc::bad_input, "empty spectral window");
  }
  const double band = kPi * K / 2.0;
  if (std::max(std::abs(window_lo), std::abs(window_hi)) > band - kTau) {
    throw DomainError(errc::truncation_not_converged,
                      "window reaches outside the certifiable range for K = " +
                          std::to_string(K));
  }

  const GalerkinSolution base = solve_galerkin(s, K);
  const GalerkinSolution fine = solve_galerkin(s, 2 * K);
  const std::vector<SpectralLine> lines = window_lines(base, window_lo,
                                                       window_hi);
  const std::vector<SpectralLine> ref = window_lines(fine, window_lo,
                                                     window_hi);

  if (lines.size() != ref.size()) {
    throw DomainError(errc::truncation_not_converged,
                      "doubled truncation changes the line count in the "
                      "window (" +
                          std::to_string(lines.size()) + " vs " +
                          std::to_string(ref.size()) + ")");
  }
  for (size_t i = 0; i < lines.size(); ++i) {
    const double tol = 1e-8 * std::max(1.0, std::abs(lines[i].value));
    if (std::abs(lines[i].value - ref[i].value) > tol ||
        lines[i].winding != ref[i].winding ||
        lines[i].multiplicity != ref[i].multiplicity) {
      throw DomainError(errc::truncation_not_converged,
                        "eigenvalue near " + std::to_string(lines[i].value) +
                            " failed certification against the doubled "
                            "truncation");
    }
  }
  validate_structure(lines);

  return SpectrumSlice{lines, K, window_lo, window_hi};
}

namespace {

struct ZeroSplit {
  int idx_minus = 0;
  int idx_plus = 0;
  bool ambiguous = false;
};

ZeroSplit split_at_zero(const Eigen::VectorXd& values) {
  const int m = static_cast<int>(values.size());
  int idx_plus = m;
  for (int i = 0; i < m; ++i) {
    if (values[i] > -1e-9) {
      idx_plus = i;
      break;
    }
  }
  if (idx_plus == 0 || idx_plus == m) {
    throw DomainError(errc::truncation_not_converged,
                      "spectrum does not straddle zero; truncation too small");
  }
  ZeroSplit out;
  out.idx_plus = idx_plus;
  out.idx_minus = idx_plus - 1;
  for (int i : {out.idx_minus, out.idx_plus}) {
    const double a = std::abs(values[i]);
    if (a >= 1e-9 && a <= 1e-8) out.ambiguous = true;
  }
  return out;
}

}  // namespace

CzSpectralDetail cz_spectral_detail(const SymmetricPotential& s, int K) {
  if (K < 8) {
    throw DomainError(errc::bad_input, "truncation K must be at least 8");
  }
  const GalerkinSolution base = solve_galerkin(s, K);
  const GalerkinSolution fine = solve_galerkin(s, 2 * K);

  const ZeroSplit sb = split_at_zero(base.values);
  const ZeroSplit sf = split_at_zero(fine.values);
  if (sb.ambiguous && sf.ambiguous) {
    throw DomainError(errc::zero_eigenvalue_ambiguity,
                      "an eigenvalue sits inside (1e-9, 1e-8] at both "
                      "truncations; cannot decide degeneracy");
  }

  CzSpectralDetail out;
  out.lambda_minus = base.values[sb.idx_minus];
  out.lambda_plus = base.values[sb.idx_plus];
  out.wind_minus = eigenfunction_winding(base.vectors.col(sb.idx_minus), K);
  out.wind_plus = eigenfunction_winding(base.vectors.col(sb.idx_plus), K);

  const double ref_minus = fine.values[sf.idx_minus];
  const double ref_plus = fine.values[sf.idx_plus];
  const int ref_wind_minus =
      eigenfunction_winding(fine.vectors.col(sf.idx_minus), 2 * K);
  const int ref_wind_plus =
      eigenfunction_winding(fine.vectors.col(sf.idx_plus), 2 * K);
  const double tol_m = 1e-8 * std::max(1.0, std::abs(out.lambda_minus));
  const double tol_p = 1e-8 * std::max(1.0, std::abs(out.lambda_plus));
  if (std::abs(out.lambda_minus - ref_minus) > tol_m ||
      std::abs(out.lambda_plus - ref_plus) > tol_p ||
      out.wind_minus != ref_wind_minus || out.wind_plus != ref_wind_plus) {
    throw DomainError(errc::truncation_not_converged,
                      "the eigenvalues around zero failed certification "
                      "against the doubled truncation");
  }

  const int p = out.wind_plus - out.wind_minus;
  if (p != 0 && p != 1) {
    throw DomainError(errc::inconsistent_winding,
                      "windings around zero differ by " + std::to_string(p) +
                          "; expected 0 or 1");
  }
  out.index = 2 * out.wind_minus + p;
  return out;
}

int cz_spectral(const SymmetricPotential& s, int K) {
  return cz_spectral_detail(s, K).index;
}

}  // namespace reebdyn
