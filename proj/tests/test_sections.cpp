#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "reebdyn/link_knot.hpp"
#include "reebdyn/sections.hpp"
#include "test_support.hpp"

using namespace reebdyn;
using testsupport::kGolden;
using testsupport::kPi;
using testsupport::thrown_code;

namespace {

StarShapedLevel golden() {
  return StarShapedLevel::ellipsoid(1.0, std::sqrt(kGolden));
}

StarShapedLevel golden_perturbed(double eps) {
  return StarShapedLevel::perturbed_ellipsoid(
      1.0, std::sqrt(kGolden), {0.5, 0.0, -0.3, 0.0, 0.2, 0.0, 0.0, 0.1},
      eps);
}

}  // namespace

TEST_CASE("ellipsoid pages: parametrization, boundary, transversality") {
  const StarShapedLevel lvl = golden();
  const DiskSection sec = ellipsoid_section(lvl, 0);

  // boundary of the page {arg x2 = 0} is the x1-circle, period pi*r1^2
  CHECK(sec.boundary.period == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(sec.boundary.minimal);
  CHECK(sec.boundary.residual < 1e-10);
  for (const Vec4& q : sec.boundary.samples) {
    CHECK(std::hypot(q[2], q[3]) < 1e-12);
  }
  CHECK(sec.boundary_defect == 0.0);

  // param/chart round trip on the open page
  const std::complex<double> z(0.4, -0.25);
  const Vec4 p = sec.param(z);
  CHECK(std::abs(p.norm() - 1.0) < 1e-14);
  CHECK(std::abs(sec.crossing(p)) < 1e-14);
  CHECK(sec.side_condition(p));
  CHECK(std::abs(sec.chart(p) - z) < 1e-14);
  // |z| = 1 lands on the boundary circle
  const Vec4 edge = sec.param(std::complex<double>(1.0, 0.0));
  CHECK(std::hypot(edge[2], edge[3]) < 1e-12);

  // interior transversality margin is exactly 2/r2^2 on the round ellipsoid
  CHECK(sec.phase_rate(p) == doctest::Approx(2.0 / kGolden).epsilon(1e-12));
  CHECK(sec.phase_rate(sec.param({-0.3, 0.55})) ==
        doctest::Approx(2.0 / kGolden).epsilon(1e-12));

  // dual page: boundary is the x2-circle with period pi*r2^2
  const DiskSection dual = ellipsoid_section(lvl, 1);
  CHECK(dual.boundary.period == doctest::Approx(kPi * kGolden).epsilon(1e-12));
  for (const Vec4& q : dual.boundary.samples) {
    CHECK(std::hypot(q[0], q[1]) < 1e-12);
  }
  CHECK(dual.phase_rate(dual.param({0.2, 0.1})) ==
        doctest::Approx(2.0).epsilon(1e-12));

  CHECK(thrown_code([&] { ellipsoid_section(lvl, 2); }) == errc::bad_input);
  const StarShapedLevel cust = StarShapedLevel::custom(
      [](const Vec4&) { return 1.0; }, [](const Vec4&) { return Vec4::Zero(); });
  CHECK(thrown_code([&] { ellipsoid_section(cust, 0); }) == errc::bad_input);
}

TEST_CASE("return map of the golden page is the closed-form rotation") {
  const StarShapedLevel lvl = golden();
  const DiskSection sec = ellipsoid_section(lvl, 0);

  const std::complex<double> z(0.35, 0.1);
  const ReturnResult rr = return_map(lvl, sec, sec.param(z));
  CHECK(rr.time == doctest::Approx(kPi * kGolden).epsilon(1e-6));

  // x1 rotates by 2*pi*r2^2/r1^2 over one return
  const std::complex<double> rot =
      std::exp(std::complex<double>(0.0, 2.0 * kPi * kGolden));
  CHECK(std::abs(sec.chart(rr.point) - z * rot) < 1e-6);
  CHECK(std::abs(sec.crossing(rr.point)) < 1e-9);
  CHECK(sec.side_condition(rr.point));

  // the center is a fixed point
  const Vec4 center = sec.param(std::complex<double>(0.0, 0.0));
  const ReturnResult rc = return_map(lvl, sec, center);
  CHECK((rc.point - center).norm() < 1e-9);
  CHECK(rc.time == doctest::Approx(kPi * kGolden).epsilon(1e-6));

  // composition: the two-fold return is the squared rotation, times add
  const ReturnResult rr2 = return_map(lvl, sec, rr.point);
  CHECK(std::abs(sec.chart(rr2.point) - z * rot * rot) < 1e-6);
  CHECK(rr.time + rr2.time == doctest::Approx(2.0 * kPi * kGolden).epsilon(1e-6));

  // dual page returns after pi*r1^2
  const DiskSection dual = ellipsoid_section(lvl, 1);
  const ReturnResult rd = return_map(lvl, dual, dual.param({0.3, 0.0}));
  CHECK(rd.time == doctest::Approx(kPi).epsilon(1e-6));

  // a start off the page is rejected
  const Vec4 off = flow(lvl, sec.param(z), 0.3);
  CHECK(thrown_code([&] { return_map(lvl, sec, off); }) == errc::bad_input);

  // an unreachable page (side condition met nowhere else) times out
  DiskSection blocked = ellipsoid_section(lvl, 0);
  const Vec4 blocked_start = sec.param(z);
  blocked.side_condition = [blocked_start](const Vec4& x) {
    return (x - blocked_start).norm() < 1e-6;
  };
  CHECK(thrown_code([&] {
          return_map(lvl, blocked, blocked_start);
        }) == errc::no_return_within_horizon);
}

TEST_CASE("fixed point of the page return map is the dual binding orbit") {
  const StarShapedLevel lvl = golden();
  const DiskSection sec = ellipsoid_section(lvl, 0);

  const PeriodicOrbit fp = fixed_point(lvl, sec);
  CHECK(fp.period == doctest::Approx(kPi * kGolden).epsilon(1e-9));
  CHECK(fp.minimal);
  CHECK(fp.residual < 1e-10);
  for (const Vec4& q : fp.samples) {
    CHECK(std::hypot(q[0], q[1]) < 1e-8);
  }

  // the fixed-point orbit links the page boundary once and has sl = -1
  const ClosedCurve core = ClosedCurve::from_orbit(fp);
  const ClosedCurve boundary = ClosedCurve::from_orbit(sec.boundary);
  CHECK(gauss_linking(core, boundary) == 1);
  CHECK(self_linking(core, quaternionic_frame(lvl)) == -1);

  // dual page: fixed point is the x1-circle
  const PeriodicOrbit fpd = fixed_point(lvl, ellipsoid_section(lvl, 1));
  CHECK(fpd.period == doctest::Approx(kPi).epsilon(1e-9));
  for (const Vec4& q : fpd.samples) {
    CHECK(std::hypot(q[2], q[3]) < 1e-8);
  }
}

TEST_CASE("return map preserves the dlambda-area") {
  const StarShapedLevel lvl = golden();
  const DiskSection sec = ellipsoid_section(lvl, 0);
  CHECK(area_preservation_check(lvl, sec, 9) < 1e-6);
  CHECK(area_preservation_check(lvl, sec, 1) < 1e-8);  // center sample only

  const StarShapedLevel pert = golden_perturbed(1e-3);
  const DiskSection psec = ellipsoid_section(pert, 0);
  CHECK(psec.boundary.period == doctest::Approx(kPi).epsilon(0.05));
  CHECK(psec.boundary_defect < 0.01);
  CHECK(psec.boundary.residual < 1e-10);
  CHECK(area_preservation_check(pert, psec, 5) < 1e-4);
}

TEST_CASE("global section audit: every trajectory hits both pages") {
  const StarShapedLevel lvl = golden();
  const double horizon = 4.0 * kPi * kGolden;
  for (int which : {0, 1}) {
    const DiskSection sec = ellipsoid_section(lvl, which);
    const AuditReport rep = global_section_audit(lvl, sec, 100, horizon);
    CHECK(rep.total == 100);
    CHECK(rep.forward_crossings == 100);
    CHECK(rep.backward_crossings == 100);
    CHECK(rep.entries.size() == 100);
    for (const AuditEntry& e : rep.entries) {
      CHECK(e.forward_crossed);
      CHECK(e.backward_crossed);
      CHECK(e.forward_time > 0.0);
      CHECK(e.forward_time <= horizon);
      CHECK(e.backward_time > 0.0);
      CHECK(e.backward_time <= horizon);
    }
  }
}
