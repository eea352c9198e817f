#include "reebdyn/sections.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <random>

#include "reebdyn/errors.hpp"

namespace reebdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CrossingEvent {
  Vec4 point;
  double time = 0.0;
};

/// First transversal crossing of the open page when marching from `start`
/// in direction dir = ±1, or nullopt if none occurs within the horizon.
/// Crossings are bracketed by sign changes of the crossing functional at
/// macro steps, refined by regula falsi with bisection fallback, and kept
/// only when the side condition holds and the functional increases along R.
std::optional<CrossingEvent> first_crossing(const StarShapedLevel& level,
                                            const DiskSection& sec,
                                            const Vec4& start, double horizon,
                                            int dir, double cross_tol,
                                            double flow_tol) {
  // macro step: a small fraction of the fastest phase revolution, so at
  // most one zero of the crossing functional fits between samples
  const double dt =
      kPi * std::min(level.r1() * level.r1(), level.r2() * level.r2()) / 64.0;

  Vec4 x = start;
  double t = 0.0;
  double c_prev = sec.crossing(x);
  while (t < horizon) {
    const Vec4 x_next = flow(level, x, dir * dt, flow_tol);
    const double c_next = sec.crossing(x_next);
    const bool bracketed = dir > 0 ? (c_prev < 0.0 && c_next >= 0.0)
                                   : (c_prev > 0.0 && c_next <= 0.0);
    if (bracketed) {
      double s_lo = 0.0, s_hi = dt;
      double f_lo = c_prev, f_hi = c_next;
      Vec4 best = x_next;
      double s_best = s_hi, f_best = f_hi;
      for (int it = 0; it < 80 && std::abs(f_best) > cross_tol &&
                       s_hi - s_lo > 1e-14;
           ++it) {
        double s_mid;
        if (it % 2 == 0 && std::abs(f_hi - f_lo) > 1e-300) {
          s_mid = s_lo - f_lo * (s_hi - s_lo) / (f_hi - f_lo);
          s_mid = std::clamp(s_mid, s_lo + 0.05 * (s_hi - s_lo),
                             s_hi - 0.05 * (s_hi - s_lo));
        } else {
          s_mid = 0.5 * (s_lo + s_hi);
        }
        const Vec4 x_mid = flow(level, x, dir * s_mid, flow_tol);
        const double f_mid = sec.crossing(x_mid);
        best = x_mid;
        s_best = s_mid;
        f_best = f_mid;
        if ((f_mid > 0.0) == (f_hi > 0.0)) {
          s_hi = s_mid;
          f_hi = f_mid;
        } else {
          s_lo = s_mid;
          f_lo = f_mid;
        }
      }
      // keep only genuine page passages: side condition and the crossing
      // functional increasing along the Reeb direction
      const Vec4 r = reeb_at(level, best);
      const double h = 1e-6;
      const double deriv =
          (sec.crossing(Vec4((best + h * r).normalized())) -
           sec.crossing(best)) /
          h;
      const double t_star = t + s_best;
      if (sec.side_condition(best) && deriv > 0.0 && t_star <= horizon) {
        return CrossingEvent{best, t_star};
      }
    }
    x = x_next;
    c_prev = c_next;
    t += dt;
  }
  return std::nullopt;
}

/// Deterministic interior sample points for area checks: the center first,
/// then a low-discrepancy spiral with radii in [0.2, 0.7].
std::vector<std::complex<double>> interior_samples(int count) {
  std::vector<std::complex<double>> pts;
  pts.reserve(count);
  for (int j = 0; j < count; ++j) {
    if (j == 0) {
      pts.emplace_back(0.0, 0.0);
      continue;
    }
    const double r =
        0.2 + 0.5 * static_cast<double>(j - 1) / std::max(1, count - 2);
    const double theta = 2.0 * kPi * std::fmod(0.6180339887498949 * j, 1.0);
    pts.emplace_back(r * std::cos(theta), r * std::sin(theta));
  }
  return pts;
}

/// dλ-density of the page in the disk chart at z (area form = rho·dx∧dy).
double page_density(const StarShapedLevel& level, const DiskSection& sec,
                    std::complex<double> z) {
  const double g = 1e-6;
  const Vec4 p = sec.param(z);
  const Vec4 ex = (sec.param(z + std::complex<double>(g, 0.0)) -
                   sec.param(z - std::complex<double>(g, 0.0))) /
                  (2.0 * g);
  const Vec4 ey = (sec.param(z + std::complex<double>(0.0, g)) -
                   sec.param(z - std::complex<double>(0.0, g))) /
                  (2.0 * g);
  return level.dlambda(p, ex, ey);
}

}  // namespace

DiskSection ellipsoid_section(const StarShapedLevel& level, int which) {
  if (which != 0 && which != 1) {
    throw DomainError(errc::bad_input, "page selector must be 0 or 1");
  }
  if (level.kind() == StarShapedLevel::Kind::custom) {
    throw DomainError(errc::bad_input,
                      "pages are defined for ellipsoid-based levels only");
  }

  // phase pair: the complex coordinate that is real positive on the page;
  // disk pair: the complex coordinate serving as the chart
  const int pidx = which == 0 ? 2 : 0;
  const int didx = which == 0 ? 0 : 2;
  const double r_bound = which == 0 ? level.r1() : level.r2();
  const double r_phase = which == 0 ? level.r2() : level.r1();

  DiskSection sec;
  sec.param = [pidx, didx](std::complex<double> z) {
    const double rr = std::norm(z);
    if (rr > 1.0 + 1e-12) {
      throw DomainError(errc::bad_input,
                        "disk coordinate outside the closed unit disk");
    }
    Vec4 x = Vec4::Zero();
    x[didx] = z.real();
    x[didx + 1] = z.imag();
    x[pidx] = std::sqrt(std::max(0.0, 1.0 - rr));
    return x;
  };
  sec.crossing = [pidx](const Vec4& x) { return x[pidx + 1]; };
  sec.side_condition = [pidx](const Vec4& x) { return x[pidx] > 0.0; };
  sec.phase_rate = [level, pidx](const Vec4& x) {
    const Vec4 r = reeb_at(level, x);
    const double a = x[pidx];
    const double b = x[pidx + 1];
    return (a * r[pidx + 1] - b * r[pidx]) / (a * a + b * b);
  };
  sec.chart = [didx](const Vec4& x) {
    return std::complex<double>(x[didx], x[didx + 1]);
  };

  const double period = kPi * r_bound * r_bound;
  if (level.kind() == StarShapedLevel::Kind::ellipsoid) {
    PeriodicOrbit orbit;
    const int n = 512;
    orbit.samples.resize(n);
    for (int i = 0; i < n; ++i) {
      const double ang = 2.0 * kPi * i / n;
      Vec4 x = Vec4::Zero();
      x[didx] = std::cos(ang);
      x[didx + 1] = std::sin(ang);
      orbit.samples[i] = x;
    }
    orbit.period = period;
    orbit.minimal = true;
    orbit.residual = 0.0;
    sec.boundary = orbit;
    sec.boundary_defect = 0.0;
  } else {
    Vec4 seed = Vec4::Zero();
    seed[didx] = 1.0;
    sec.boundary = find_orbit(level, seed, period);
    double defect = 0.0;
    for (const Vec4& s : sec.boundary.samples) {
      const double radial = std::hypot(s[didx], s[didx + 1]) - 1.0;
      defect = std::max(
          defect, std::sqrt(radial * radial + s[pidx] * s[pidx] +
                            s[pidx + 1] * s[pidx + 1]));
    }
    sec.boundary_defect = defect;

    // interior transversality must survive the perturbation
    const double reference = 2.0 / (r_phase * r_phase);
    for (double rad : {0.0, 0.3, 0.6, 0.85}) {
      for (int a = 0; a < 8; ++a) {
        const double ang = 2.0 * kPi * a / 8.0;
        const std::complex<double> z(rad * std::cos(ang),
                                     rad * std::sin(ang));
        if (sec.phase_rate(sec.param(z)) < 0.5 * reference) {
          throw DomainError(errc::not_transverse,
                            "perturbation destroys page transversality");
        }
      }
    }
  }
  return sec;
}

ReturnResult return_map(const StarShapedLevel& level, const DiskSection& sec,
                        const Vec4& p, double tol) {
  if (std::abs(sec.crossing(p)) > 1e-9 || !sec.side_condition(p)) {
    throw DomainError(errc::bad_input, "start point is not on the open page");
  }
  const double horizon = 10.0 * sec.boundary.period;
  const double flow_tol = std::min(tol, 1e-12);
  const std::optional<CrossingEvent> ev =
      first_crossing(level, sec, p, horizon, +1, tol, flow_tol);
  if (!ev) {
    throw DomainError(errc::no_return_within_horizon,
                      "no page crossing within 10 boundary periods");
  }
  return ReturnResult{ev->point, ev->time};
}

PeriodicOrbit fixed_point(const StarShapedLevel& level,
                          const DiskSection& sec) {
  const auto chart_return =
      [&level, &sec](std::complex<double> z) -> std::complex<double> {
    return sec.chart(return_map(level, sec, sec.param(z)).point);
  };

  std::vector<std::complex<double>> starts;
  starts.emplace_back(0.0, 0.0);
  for (double rad : {0.3, 0.6}) {
    for (int a = 0; a < 4; ++a) {
      const double ang = 0.5 * kPi * a;
      starts.emplace_back(rad * std::cos(ang), rad * std::sin(ang));
    }
  }

  for (const std::complex<double>& start : starts) {
    std::complex<double> z = start;
    try {
      for (int iter = 0; iter < 30; ++iter) {
        const std::complex<double> gval = chart_return(z) - z;
        if (std::abs(gval) < 1e-10) {
          const double t_ret = return_map(level, sec, sec.param(z)).time;
          return find_orbit(level, sec.param(z), t_ret);
        }
        const double h = 1e-6;
        const std::complex<double> dx =
            chart_return(z + h) - chart_return(z - h);
        const std::complex<double> dy =
            chart_return(z + std::complex<double>(0.0, h)) -
            chart_return(z - std::complex<double>(0.0, h));
        Mat2 jac;
        jac << dx.real() / (2.0 * h) - 1.0, dy.real() / (2.0 * h),
            dx.imag() / (2.0 * h), dy.imag() / (2.0 * h) - 1.0;
        const Vec2 rhs(-gval.real(), -gval.imag());
        Vec2 delta = jac.fullPivLu().solve(rhs);
        if (!delta.allFinite()) break;
        if (delta.norm() > 0.3) delta *= 0.3 / delta.norm();
        z += std::complex<double>(delta[0], delta[1]);
        if (std::abs(z) > 0.9) z *= 0.9 / std::abs(z);
      }
    } catch (const DomainError&) {
      // this start wandered out of the page; try the next one
    }
  }
  throw DomainError(errc::no_fixed_point_found,
                    "return-map Newton failed from all starts");
}

double area_preservation_check(const StarShapedLevel& level,
                               const DiskSection& sec, int sample_count) {
  if (sample_count < 1) {
    throw DomainError(errc::bad_input, "need at least one sample");
  }
  const auto image = [&level, &sec](std::complex<double> z) {
    return sec.chart(return_map(level, sec, sec.param(z), 1e-12).point);
  };

  const double h = 1e-4;  // differencing step; integration noise ~1e-13
  double worst = 0.0;
  for (const std::complex<double>& z : interior_samples(sample_count)) {
    const std::complex<double> w = image(z);
    const std::complex<double> dx = image(z + h) - image(z - h);
    const std::complex<double> dy = image(z + std::complex<double>(0.0, h)) -
                                    image(z - std::complex<double>(0.0, h));
    const double det = (dx.real() * dy.imag() - dx.imag() * dy.real()) /
                       (4.0 * h * h);
    const double ratio = page_density(level, sec, w) / page_density(level, sec, z);
    worst = std::max(worst, std::abs(det * ratio - 1.0));
  }
  return worst;
}

AuditReport global_section_audit(const StarShapedLevel& level,
                                 const DiskSection& sec, int n_starts,
                                 double horizon, unsigned seed) {
  if (n_starts < 1 || horizon <= 0.0) {
    throw DomainError(errc::bad_input, "audit needs starts and a horizon");
  }
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  AuditReport report;
  report.entries.reserve(n_starts);
  for (int i = 0; i < n_starts; ++i) {
    Vec4 start;
    do {
      for (int c = 0; c < 4; ++c) start[c] = gauss(rng);
    } while (start.norm() < 1e-6);
    start.normalize();

    AuditEntry entry;
    entry.start = start;
    const std::optional<CrossingEvent> fwd =
        first_crossing(level, sec, start, horizon, +1, 1e-9, 1e-10);
    const std::optional<CrossingEvent> bwd =
        first_crossing(level, sec, start, horizon, -1, 1e-9, 1e-10);
    if (fwd) {
      entry.forward_crossed = true;
      entry.forward_time = fwd->time;
      ++report.forward_crossings;
    }
    if (bwd) {
      entry.backward_crossed = true;
      entry.backward_time = bwd->time;
      ++report.backward_crossings;
    }
    report.entries.push_back(entry);
  }
  report.total = n_starts;
  return report;
}

}  // namespace reebdyn
