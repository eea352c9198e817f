#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reebdyn/crosscheck.hpp"
#include "reebdyn/cz_geometric.hpp"
#include "reebdyn/cz_spectral.hpp"
#include "test_support.hpp"

using namespace reebdyn;
using testsupport::kPi;
using testsupport::thrown_code;

namespace {

bool has_line(const SpectrumSlice& s, double value, int winding,
              int multiplicity, double tol) {
  for (const SpectralLine& l : s.lines) {
    if (std::abs(l.value - value) < tol && l.winding == winding &&
        l.multiplicity == multiplicity) {
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("path_from_potential reproduces closed forms") {
  const SymmetricPotential zero = SymmetricPotential::constant(Mat2::Zero());
  const SymplecticPath id_path = path_from_potential(zero);
  for (double t : {0.0, 0.3, 1.0}) {
    CHECK((id_path(t) - Mat2::Identity()).norm() < 1e-12);
  }

  const SymmetricPotential pi_pot =
      SymmetricPotential::constant(kPi * Mat2::Identity());
  const SymplecticPath rot = path_from_potential(pi_pot);
  for (double t : {0.25, 0.5, 1.0}) {
    CHECK((rot(t) - rot2(kPi * t)).norm() < 1e-10);
  }
}

TEST_CASE("potential_from_path closed forms and round trip") {
  const SymplecticPath rot = SymplecticPath::rotation(0.5);  // e^{iπt}
  const SymmetricPotential s = potential_from_path(rot);
  for (double t : {0.0, 0.4, 0.9}) {
    CHECK((s(t) - kPi * Mat2::Identity()).norm() < 1e-8);
  }

  const SymmetricPotential s_id =
      potential_from_path(SymplecticPath::rotation(0.0));
  CHECK(s_id(0.5).norm() < 1e-9);

  // hyperbolic path: constant S = [[0, −c], [−c, 0]]
  const double c = 0.8;
  const SymmetricPotential s_hyp =
      potential_from_path(SymplecticPath::hyperbolic(c));
  Mat2 expect;
  expect << 0.0, -c, -c, 0.0;
  CHECK((s_hyp(0.3) - expect).norm() < 1e-8);
  CHECK(s_hyp.symmetry_defect() < 1e-10);

  // round trip through a genuinely t-dependent potential
  Mat2 a0, c1, d1;
  a0 << 1.0, 0.3, 0.3, -0.6;
  c1 << 0.5, -0.2, -0.2, 0.1;
  d1 << -0.4, 0.6, 0.6, 0.2;
  const SymmetricPotential s_in = SymmetricPotential::trig(a0, {c1}, {d1});
  const SymmetricPotential s_back =
      potential_from_path(path_from_potential(s_in));
  for (double t : {0.05, 0.37, 0.81}) {
    CHECK((s_back(t) - s_in(t)).norm() < 1e-6);
  }

  // a path whose potential is not 1-periodic is rejected for spectral work
  const SymplecticPath accel = SymplecticPath::from_evaluator(
      [](double t) { return rot2(kPi * t * t); });
  CHECK(thrown_code([&] { potential_from_path(accel); }) ==
        errc::non_periodic_potential);
}

TEST_CASE("free-operator spectrum") {
  const SymmetricPotential zero = SymmetricPotential::constant(Mat2::Zero());
  const SpectrumSlice s = spectrum(zero, 64, -7.0, 7.0);
  REQUIRE(s.lines.size() == 3);
  CHECK(has_line(s, -2.0 * kPi, -1, 2, 1e-9));
  CHECK(has_line(s, 0.0, 0, 2, 1e-9));
  CHECK(has_line(s, 2.0 * kPi, 1, 2, 1e-9));
}

TEST_CASE("constant-shift spectra") {
  const SymmetricPotential one =
      SymmetricPotential::constant(Mat2::Identity());
  const SpectrumSlice s = spectrum(one, 64, -8.0, 7.0);
  CHECK(has_line(s, -2.0 * kPi - 1.0, -1, 2, 1e-8));
  CHECK(has_line(s, -1.0, 0, 2, 1e-8));
  CHECK(has_line(s, 2.0 * kPi - 1.0, 1, 2, 1e-8));

  const SymmetricPotential two_pi =
      SymmetricPotential::constant(2.0 * kPi * Mat2::Identity());
  const SpectrumSlice s2 = spectrum(two_pi, 64, -1.0, 1.0);
  CHECK(has_line(s2, 0.0, 1, 2, 1e-8));
}

TEST_CASE("structure of a random certified window") {
  const SymmetricPotential s = random_potential(42);
  const SpectrumSlice slice = spectrum(s, 64, -30.0, 30.0);
  REQUIRE(slice.lines.size() > 4);
  int prev_wind = slice.lines.front().winding;
  double prev_val = slice.lines.front().value;
  for (const SpectralLine& l : slice.lines) {
    CHECK(l.value >= prev_val - 1e-12);   // sorted
    CHECK(l.winding >= prev_wind);        // winding monotone
    CHECK((l.multiplicity == 1 || l.multiplicity == 2));
    prev_wind = l.winding;
    prev_val = l.value;
  }
  // interior windings appear with total multiplicity exactly 2
  const int w_lo = slice.lines.front().winding;
  const int w_hi = slice.lines.back().winding;
  for (int w = w_lo + 1; w < w_hi; ++w) {
    int count = 0;
    for (const SpectralLine& l : slice.lines) {
      if (l.winding == w) count += l.multiplicity;
    }
    CHECK(count == 2);
  }
}

TEST_CASE("eigenvalue continuity under small perturbations") {
  const SymmetricPotential s = random_potential(99);
  const double eps = 1e-4;
  Mat2 bump;
  bump << eps, 0.3 * eps, 0.3 * eps, -eps;
  const SymmetricPotential s_pert = SymmetricPotential::from_evaluator(
      [s, bump](double t) { return Mat2(s(t) + std::cos(2.0 * kPi * t) * bump); });
  const SpectrumSlice a = spectrum(s, 64, -10.0, 10.0);
  const SpectrumSlice b = spectrum(s_pert, 64, -10.0, 10.0);
  // expand multiplicities and pair in order
  std::vector<double> va, vb;
  for (const auto& l : a.lines) va.insert(va.end(), l.multiplicity, l.value);
  for (const auto& l : b.lines) vb.insert(vb.end(), l.multiplicity, l.value);
  REQUIRE(va.size() == vb.size());
  for (size_t i = 0; i < va.size(); ++i) {
    CHECK(std::abs(va[i] - vb[i]) <= 10.0 * eps);
  }
}

TEST_CASE("cz_spectral catalog values") {
  CHECK(cz_spectral(SymmetricPotential::constant(Mat2::Zero())) == -1);
  CHECK(cz_spectral(SymmetricPotential::constant(Mat2::Identity())) == 1);
  CHECK(cz_spectral(SymmetricPotential::constant(kPi * Mat2::Identity())) == 1);
  CHECK(cz_spectral(
            SymmetricPotential::constant(2.0 * kPi * Mat2::Identity())) == 1);
  CHECK(cz_spectral(SymmetricPotential::constant(-Mat2::Identity())) == -1);

  const CzSpectralDetail d =
      cz_spectral_detail(SymmetricPotential::constant(Mat2::Zero()));
  CHECK(d.lambda_minus == doctest::Approx(-2.0 * kPi).epsilon(1e-9));
  CHECK(std::abs(d.lambda_plus) < 1e-9);
  CHECK(d.wind_minus == -1);
  CHECK(d.wind_plus == 0);
}

TEST_CASE("two-route index agreement on a seeded mini batch") {
  const CrosscheckReport report = crosscheck_batch(12, 2026, 2);
  CHECK(report.agree == 12);
  CHECK(report.disagree == 0);
  CHECK(report.degenerate_count >= 2);
}
