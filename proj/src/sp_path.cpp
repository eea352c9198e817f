#include "reebdyn/sp_path.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

namespace reebdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTau = 2.0 * kPi;

std::string matrix_brief(const Mat2& m) {
  std::ostringstream os;
  os << "[[" << m(0, 0) << ", " << m(0, 1) << "], [" << m(1, 0) << ", "
     << m(1, 1) << "]]";
  return os.str();
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Principal angle from `a` to `b` in (−π, π]; both must be nonzero.
double turn_between(const Vec2& a, const Vec2& b) {
  return std::atan2(cross2(a, b), a.dot(b));
}

void check_start_and_determinant(const std::function<Mat2(double)>& eval) {
  const Mat2 start = eval(0.0);
  if ((start - Mat2::Identity()).norm() > 1e-10) {
    throw DomainError(errc::non_symplectic_path,
                      "path must start at the identity, got " +
                          matrix_brief(start) + " at t = 0");
  }
  for (int i = 0; i <= 64; ++i) {
    const double t = static_cast<double>(i) / 64.0;
    const Mat2 m = eval(t);
    if (!m.allFinite()) {
      throw DomainError(errc::non_symplectic_path,
                        "path evaluates to a non-finite matrix at t = " +
                            std::to_string(t));
    }
    const double det = m.determinant();
    if (std::abs(det - 1.0) > 1e-8) {
      throw DomainError(errc::non_symplectic_path,
                        "determinant " + std::to_string(det) +
                            " departs from 1 at t = " + std::to_string(t));
    }
  }
}

}  // namespace

SymplecticMatrix2::SymplecticMatrix2(const Mat2& value) : m(value) {
  const double det = value.determinant();
  if (!value.allFinite() || std::abs(det - 1.0) > 1e-10) {
    throw DomainError(errc::non_symplectic_path,
                      "matrix " + matrix_brief(value) +
                          " has determinant " + std::to_string(det) +
                          ", expected 1 within 1e-10");
  }
}

SymplecticPath::SymplecticPath(std::function<Mat2(double)> eval, int grid,
                               bool exact, bool validate)
    : eval_(std::move(eval)), grid_(grid), exact_(exact) {
  if (validate) check_start_and_determinant(eval_);
}

SymplecticPath SymplecticPath::rotation(double alpha_turns) {
  const double rate = kTau * alpha_turns;
  // More than ~64 grid intervals per full turn keeps lift steps small.
  const int grid = std::max(512, 128 * (1 + static_cast<int>(std::abs(alpha_turns))));
  return SymplecticPath([rate](double t) { return rot2(rate * t); }, grid,
                        true, false);
}

SymplecticPath SymplecticPath::shear(double a) {
  return SymplecticPath(
      [a](double t) {
        Mat2 m;
        m << 1.0, a * t, 0.0, 1.0;
        return m;
      },
      512, true, false);
}

SymplecticPath SymplecticPath::hyperbolic(double c) {
  return SymplecticPath(
      [c](double t) {
        Mat2 m;
        m << std::exp(c * t), 0.0, 0.0, std::exp(-c * t);
        return m;
      },
      512, true, false);
}

SymplecticPath SymplecticPath::from_evaluator(std::function<Mat2(double)> eval,
                                              int grid_hint) {
  return SymplecticPath(std::move(eval), std::max(grid_hint, 64), true, true);
}

SymplecticPath SymplecticPath::from_samples(std::vector<Mat2> samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 257) {
    throw DomainError(errc::non_symplectic_path,
                      "sampled paths need at least 257 uniform nodes (256 "
                      "grid intervals), got " +
                          std::to_string(n));
  }
  if ((samples.front() - Mat2::Identity()).norm() > 1e-10) {
    throw DomainError(errc::non_symplectic_path,
                      "sampled path must start at the identity");
  }
  for (int i = 0; i < n; ++i) {
    if (!samples[i].allFinite() ||
        std::abs(samples[i].determinant() - 1.0) > 1e-8) {
      throw DomainError(errc::non_symplectic_path,
                        "sample " + std::to_string(i) +
                            " is not symplectic within 1e-8");
    }
  }

  auto nodes = std::make_shared<std::vector<Mat2>>(std::move(samples));
  // Degree-5 Lagrange interpolation on the six nearest nodes (clamped at the
  // ends), then determinant renormalization. Uniform barycentric weights for
  // six nodes are binomial with alternating signs.
  auto eval = [nodes, n](double t) -> Mat2 {
    const double x = std::clamp(t, 0.0, 1.0) * (n - 1);
    int j0 = static_cast<int>(std::floor(x)) - 2;
    j0 = std::clamp(j0, 0, n - 6);
    static const double w[6] = {1.0, -5.0, 10.0, -10.0, 5.0, -1.0};
    double coeff[6];
    double denom = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double dx = x - (j0 + j);
      if (std::abs(dx) < 1e-12) return (*nodes)[j0 + j];
      coeff[j] = w[j] / dx;
      denom += coeff[j];
    }
    Mat2 acc = Mat2::Zero();
    for (int j = 0; j < 6; ++j) acc += (coeff[j] / denom) * (*nodes)[j0 + j];
    return unit_det(acc);
  };
  return SymplecticPath(std::move(eval), n - 1, false, false);
}

Mat2 SymplecticPath::operator()(double t) const { return eval_(t); }

SymplecticPath path_product(const SymplecticPath& a, const SymplecticPath& b) {
  auto ea = a.eval_;
  auto eb = b.eval_;
  return SymplecticPath([ea, eb](double t) { return ea(t) * eb(t); },
                        std::max(a.grid_, b.grid_), a.exact_ && b.exact_,
                        false);
}

SymplecticPath path_inverse(const SymplecticPath& a) {
  auto ea = a.eval_;
  return SymplecticPath(
      [ea](double t) { return sp_inverse(unit_det(ea(t))); }, a.grid_,
      a.exact_, false);
}

SymplecticPath path_concat(const SymplecticPath& a, const SymplecticPath& b) {
  auto ea = a.eval_;
  auto eb = b.eval_;
  const Mat2 a_end = a.end();
  return SymplecticPath(
      [ea, eb, a_end](double t) -> Mat2 {
        if (t <= 0.5) return ea(2.0 * t);
        return eb(2.0 * t - 1.0) * a_end;
      },
      2 * std::max(a.grid_, b.grid_), a.exact_ && b.exact_, false);
}

LiftResult angle_lift(const SymplecticPath& path, double s) {
  const Vec2 start(std::cos(s), std::sin(s));
  double theta = s;
  Vec2 prev = start;  // φ(0) = I
  double t = 0.0;
  const double h0 = 1.0 / std::max(64, std::min(path.grid_size(), 4096));
  double h = h0;
  while (t < 1.0 - 1e-15) {
    double step = std::min(h, 1.0 - t);
    int depth = 0;
    for (;;) {
      const Vec2 next = path(t + step) * start;
      const double nn = next.norm();
      if (nn < 1e-12) {
        throw DomainError(errc::lift_resolution_failure,
                          "trajectory collapses to the origin at t = " +
                              std::to_string(t + step));
      }
      const double inc = turn_between(prev, next);
      if (std::abs(inc) < kPi / 4.0) {
        theta += inc;
        prev = next;
        t += step;
        // Rebuild the step budget: grow when the turn was comfortably small.
        h = (std::abs(inc) < kPi / 16.0) ? std::min(2.0 * step, h0)
                                         : step;
        break;
      }
      step *= 0.5;
      if (++depth > 20) {
        throw DomainError(errc::lift_resolution_failure,
                          "bisection depth exceeded 20 near t = " +
                              std::to_string(t));
      }
    }
  }
  return LiftResult{theta, prev.norm()};
}

int maslov_index(const SymplecticPath& loop) {
  const Mat2 end = loop.end();
  if ((end - Mat2::Identity()).norm() >= 1e-8) {
    throw DomainError(errc::not_a_loop,
                      "endpoint " + matrix_brief(end) +
                          " differs from the identity beyond 1e-8");
  }
  std::optional<long> common;
  for (int i = 0; i < 16; ++i) {
    const double s = kPi * static_cast<double>(i) / 16.0;
    const double delta = (angle_lift(loop, s).theta1 - s) / kTau;
    const long k = std::lround(delta);
    if (std::abs(delta - static_cast<double>(k)) > 1e-6) {
      throw DomainError(errc::inconsistent_winding,
                        "winding " + std::to_string(delta) +
                            " at s = " + std::to_string(s) +
                            " is not an integer");
    }
    if (common && *common != k) {
      throw DomainError(errc::inconsistent_winding,
                        "winding depends on the start direction: " +
                            std::to_string(*common) + " vs " +
                            std::to_string(k));
    }
    common = k;
  }
  return static_cast<int>(*common);
}

PlaneSectionLoop::PlaneSectionLoop(std::vector<Vec2> samples)
    : samples_(std::move(samples)) {
  if (samples_.size() < 4) {
    throw DomainError(errc::degenerate_section,
                      "a plane loop needs at least 4 samples");
  }
  for (size_t i = 0; i < samples_.size(); ++i) {
    if (!samples_[i].allFinite() || samples_[i].norm() <= 1e-10) {
      throw DomainError(errc::degenerate_section,
                        "sample " + std::to_string(i) +
                            " has norm below 1e-10");
    }
  }
}

int loop_degree(const std::vector<Vec2>& samples) {
  const size_t n = samples.size();
  if (n < 4) {
    throw DomainError(errc::degenerate_section,
                      "a plane loop needs at least 4 samples");
  }
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = samples[i];
    const Vec2& b = samples[(i + 1) % n];
    if (a.norm() <= 1e-12 || b.norm() <= 1e-12) {
      throw DomainError(errc::degenerate_section,
                        "vanishing sample in loop-degree computation");
    }
    const double inc = turn_between(a, b);
    if (std::abs(inc) >= kPi / 2.0) {
      throw DomainError(errc::degenerate_section,
                        "loop turns by " + std::to_string(inc) +
                            " between consecutive samples (undersampled)");
    }
    total += inc;
  }
  const double turns = total / kTau;
  const long k = std::lround(turns);
  if (std::abs(turns - static_cast<double>(k)) > 1e-6) {
    throw DomainError(errc::inconsistent_winding,
                      "total turning " + std::to_string(turns) +
                          " is not an integer number of revolutions");
  }
  return static_cast<int>(k);
}

int wind_rel(const PlaneSectionLoop& w, const PlaneSectionLoop& z) {
  if (w.size() != z.size()) {
    throw DomainError(errc::grid_mismatch,
                      "loop grids differ: " + std::to_string(w.size()) +
                          " vs " + std::to_string(z.size()));
  }
  const Mat2 j = J0();
  std::vector<Vec2> rel;
  rel.reserve(w.samples().size());
  for (int i = 0; i < w.size(); ++i) {
    const Vec2& zw = z.samples()[i];
    const Vec2& ww = w.samples()[i];
    const double n2 = zw.squaredNorm();
    rel.emplace_back(ww.dot(zw) / n2, ww.dot(j * zw) / n2);
  }
  return loop_degree(rel);
}

}  // namespace reebdyn
