#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "reebdyn/link_knot.hpp"
#include "test_support.hpp"

using namespace reebdyn;
using testsupport::kGolden;
using testsupport::kPi;
using testsupport::thrown_code;

namespace {

/// Torus curve wrapping the two complex phases (m, n) at radius split s.
ClosedCurve torus_curve(int m, int n, double s, int samples = 512,
                        double phase1 = 0.0, double phase2 = 0.0) {
  const double c = std::sqrt(1.0 - s * s);
  std::vector<Vec4> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double u = 2.0 * kPi * static_cast<double>(i) / samples;
    pts.emplace_back(c * std::cos(m * u + phase1), c * std::sin(m * u + phase1),
                     s * std::cos(n * u + phase2), s * std::sin(n * u + phase2));
  }
  return ClosedCurve(std::move(pts));
}

ClosedCurve hopf1(int samples = 512) { return torus_curve(1, 0, 0.0, samples); }
ClosedCurve hopf2(int samples = 512) { return torus_curve(0, 1, 1.0, samples); }

}  // namespace

TEST_CASE("closed curve validation") {
  CHECK_NOTHROW(hopf1());

  // an open arc is rejected: the wrap-around chord is macroscopic
  std::vector<Vec4> arc;
  for (int i = 0; i < 256; ++i) {
    const double u = kPi * static_cast<double>(i) / 256.0;  // half turn only
    arc.emplace_back(std::cos(u), std::sin(u), 0.0, 0.0);
  }
  CHECK(thrown_code([&] { ClosedCurve c(std::move(arc)); }) ==
        errc::bad_input);

  // undersampled curve: consecutive chords too long
  std::vector<Vec4> coarse;
  for (int i = 0; i < 8; ++i) {
    const double u = 2.0 * kPi * static_cast<double>(i) / 8.0;
    coarse.emplace_back(std::cos(u), std::sin(u), 0.0, 0.0);
  }
  CHECK(thrown_code([&] { ClosedCurve c(std::move(coarse)); }) ==
        errc::bad_input);

  const ClosedCurve fine = hopf1().resampled(1024);
  CHECK(fine.size() == 1024);
  for (const Vec4& p : fine.samples()) {
    CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Hopf fibers link once") {
  const LinkingResult lk = gauss_linking_detail(hopf1(), hopf2());
  CHECK(lk.value == 1);
  CHECK(lk.residual < 1e-2);

  // symmetry and orientation reversal
  CHECK(gauss_linking(hopf2(), hopf1()) == 1);
  CHECK(gauss_linking(hopf1(), hopf2().reversed()) == -1);
  CHECK(gauss_linking(hopf1().reversed(), hopf2().reversed()) == 1);

  // resolution invariance
  CHECK(gauss_linking(hopf1(256), hopf2(256)) == 1);
  CHECK(gauss_linking(hopf1(1024), hopf2(1024)) == 1);
}

TEST_CASE("torus curves against the coordinate circles") {
  // (1,0)-curve at split 0.3: x₂ stays in a fixed phase; it does not link
  // the x₁-circle but links the x₂-circle once
  const ClosedCurve c = torus_curve(1, 0, 0.3);
  CHECK(gauss_linking(c, hopf1()) == 0);
  CHECK(gauss_linking(c, hopf2()) == 1);

  // (1,2)-torus curve: lk with the cores picks up the complementary phase
  const ClosedCurve t12 = torus_curve(1, 2, 0.55, 1024);
  CHECK(gauss_linking(t12, hopf1()) == 2);
  CHECK(gauss_linking(t12, hopf2()) == 1);
}

TEST_CASE("stereographic projection and pole handling") {
  const std::vector<ClosedCurve> curves = {hopf1(), hopf2()};
  const StereographicResult sr = stereographic_project(curves);
  CHECK(sr.pole_clearance > 0.2);
  CHECK(std::abs(sr.pole.norm() - 1.0) < 1e-12);
  REQUIRE(sr.curves.size() == 2);
  CHECK(sr.curves[0].size() == static_cast<size_t>(curves[0].size()));

  // an explicit pole sitting on the first curve is rejected
  CHECK(thrown_code([&] {
          stereographic_project_from(curves, Vec4(1.0, 0.0, 0.0, 0.0));
        }) == errc::pole_too_close);

  // a legal explicit pole reproduces the linking number
  const StereographicResult sr2 = stereographic_project_from(
      curves, Vec4(0.5, -0.5, 0.5, 0.5));
  CHECK(sr2.pole_clearance > 0.1);
}

TEST_CASE("coincident or near-coincident curves are rejected") {
  CHECK(thrown_code([&] { gauss_linking(hopf1(), hopf1()); }) ==
        errc::not_disjoint);
  // same circle, parameter nudged by 1e−8: too close to integrate reliably
  const ClosedCurve nudged = torus_curve(1, 0, 0.0, 512, 1e-8, 0.0);
  CHECK(thrown_code([&] { gauss_linking(hopf1(), nudged); }) ==
        errc::curves_too_close);
}

TEST_CASE("pushoff and self-linking on the round sphere") {
  const StarShapedLevel round = StarShapedLevel::ellipsoid(1.0, 1.0);
  const GlobalXiFrame frame = quaternionic_frame(round);

  const ClosedCurve push = pushoff(hopf1(), frame, 1e-2);
  // pushoff stays on S³ at geodesic distance ≈ eps·|Z1| from the base
  for (int i = 0; i < push.size(); ++i) {
    CHECK(push.samples()[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const double d0 = (push.samples()[0] - hopf1().samples()[0]).norm();
  CHECK(d0 > 1e-3);
  CHECK(d0 < 2e-2);

  const SelfLinkingResult sl1 = self_linking_detail(hopf1(), frame);
  CHECK(sl1.value == -1);
  CHECK(sl1.eps_used <= 1e-2);
  CHECK(sl1.residual < 1e-2);
  CHECK(self_linking(hopf2(), frame) == -1);
}

TEST_CASE("self-linking of Reeb orbits on the golden ellipsoid") {
  const StarShapedLevel lvl =
      StarShapedLevel::ellipsoid(1.0, std::sqrt(kGolden));
  const GlobalXiFrame frame = quaternionic_frame(lvl);

  const PeriodicOrbit g1 = find_orbit(lvl, Vec4(1.0, 0.0, 0.0, 0.0), kPi);
  const PeriodicOrbit g2 =
      find_orbit(lvl, Vec4(0.0, 0.0, 1.0, 0.0), kPi * kGolden);
  const ClosedCurve c1 = ClosedCurve::from_orbit(g1);
  const ClosedCurve c2 = ClosedCurve::from_orbit(g2);

  CHECK(gauss_linking(c1, c2) == 1);
  CHECK(self_linking(c1, frame) == -1);
  CHECK(self_linking(c2, frame) == -1);
}
