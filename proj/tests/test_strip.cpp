#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "reebdyn/cz_geometric.hpp"
#include "reebdyn/strip.hpp"
#include "test_support.hpp"

using namespace reebdyn;
using testsupport::kPi;
using testsupport::thrown_code;

namespace {

Mat2 diag2(double x, double y) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

Mat2 shear2(double c) {
  Mat2 m = Mat2::Identity();
  m(0, 1) = c;
  return m;
}

/// Reconstruction defect ‖m − T⁻¹(±e^Y)T‖ per the classified case.
double reconstruction_error(const Mat2& m, const EndMatrixClass& cls) {
  const Mat2 expY = [&cls] {
    switch (cls.tag) {
      case EndMatrixClass::Tag::a:
        return Mat2(diag2(std::exp(cls.Y(0, 0)), std::exp(cls.Y(1, 1))));
      case EndMatrixClass::Tag::b:
        return Mat2(Mat2::Identity() + cls.Y);
      case EndMatrixClass::Tag::c:
        return rot2(cls.param);
      case EndMatrixClass::Tag::d:
      default:
        return Mat2(-diag2(std::exp(cls.Y(0, 0)), std::exp(cls.Y(1, 1))));
    }
  }();
  const Mat2 t = cls.T_conj;
  return (m - sp_inverse(t) * expY * t).norm();
}

}  // namespace

TEST_CASE("classification of the four normal-form cases") {
  const EndMatrixClass ca = classify_end_matrix(SymplecticMatrix2(diag2(2.0, 0.5)));
  CHECK(ca.tag == EndMatrixClass::Tag::a);
  CHECK(ca.param == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ca.Y(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(ca.Y(1, 1) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK((ca.T_conj - Mat2::Identity()).norm() < 1e-9);
  CHECK(reconstruction_error(diag2(2.0, 0.5), ca) < 1e-10);

  const EndMatrixClass cc = classify_end_matrix(SymplecticMatrix2(rot2(kPi / 3.0)));
  CHECK(cc.tag == EndMatrixClass::Tag::c);
  CHECK(cc.param == doctest::Approx(kPi / 3.0).epsilon(1e-12));
  CHECK(reconstruction_error(rot2(kPi / 3.0), cc) < 1e-10);

  // the conjugacy class remembers the rotation direction
  const EndMatrixClass cneg = classify_end_matrix(SymplecticMatrix2(rot2(-kPi / 3.0)));
  CHECK(cneg.tag == EndMatrixClass::Tag::c);
  CHECK(cneg.param == doctest::Approx(2.0 * kPi - kPi / 3.0).epsilon(1e-12));

  const EndMatrixClass cd = classify_end_matrix(SymplecticMatrix2(diag2(-2.0, -0.5)));
  CHECK(cd.tag == EndMatrixClass::Tag::d);
  CHECK(cd.param == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(reconstruction_error(diag2(-2.0, -0.5), cd) < 1e-10);

  const EndMatrixClass cb = classify_end_matrix(SymplecticMatrix2(shear2(1.0)));
  CHECK(cb.tag == EndMatrixClass::Tag::b);
  CHECK(cb.param == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reconstruction_error(shear2(1.0), cb) < 1e-10);

  Mat2 lower = Mat2::Identity();
  lower(1, 0) = 1.0;
  const EndMatrixClass cbl = classify_end_matrix(SymplecticMatrix2(lower));
  CHECK(cbl.tag == EndMatrixClass::Tag::b);
  CHECK(cbl.param == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(reconstruction_error(lower, cbl) < 1e-10);
}

TEST_CASE("classification is a conjugation invariant") {
  std::mt19937_64 rng(420);
  const Mat2 reps[4] = {diag2(3.0, 1.0 / 3.0), shear2(-2.0), rot2(2.5),
                        diag2(-1.7, -1.0 / 1.7)};
  const EndMatrixClass::Tag tags[4] = {
      EndMatrixClass::Tag::a, EndMatrixClass::Tag::b, EndMatrixClass::Tag::c,
      EndMatrixClass::Tag::d};
  for (int i = 0; i < 4; ++i) {
    for (int rep = 0; rep < 5; ++rep) {
      const Mat2 s = testsupport::random_symplectic(rng);
      const Mat2 m = sp_inverse(s) * reps[i] * s;
      const EndMatrixClass cls = classify_end_matrix(SymplecticMatrix2(m));
      CHECK(cls.tag == tags[i]);
      CHECK(reconstruction_error(m, cls) < 1e-8);
      CHECK(std::abs(cls.T_conj.determinant() - 1.0) < 1e-10);
    }
  }
  // invariant parameters
  std::mt19937_64 rng2(421);
  const Mat2 s = testsupport::random_symplectic(rng2);
  const EndMatrixClass conj =
      classify_end_matrix(SymplecticMatrix2(Mat2(sp_inverse(s) * rot2(2.5) * s)));
  CHECK(conj.param == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("boundary cases are rejected") {
  CHECK(thrown_code([] {
          classify_end_matrix(SymplecticMatrix2(Mat2::Identity()));
        }) == errc::boundary_case);
  CHECK(thrown_code([] {
          classify_end_matrix(SymplecticMatrix2(Mat2(-Mat2::Identity())));
        }) == errc::boundary_case);
  // barely-hyperbolic: trace within 1e-8 of 2 but not honestly parabolic
  const double a = 1.0 + 1e-5;
  CHECK(thrown_code([a] {
          classify_end_matrix(SymplecticMatrix2(diag2(a, 1.0 / a)));
        }) == errc::boundary_case);
  // near-identity elliptic: angle below resolution
  CHECK(thrown_code([] {
          classify_end_matrix(SymplecticMatrix2(rot2(3e-5)));
        }) == errc::boundary_case);
  // negative-parabolic (both eigenvalues -1) sits between cases c and d
  CHECK(thrown_code([] {
          classify_end_matrix(SymplecticMatrix2(Mat2(-shear2(1.0))));
        }) == errc::boundary_case);
}

TEST_CASE("model paths realize the winding catalog") {
  // case a: interval straddles 0, index 0
  const EndMatrixClass ca = classify_end_matrix(SymplecticMatrix2(diag2(2.0, 0.5)));
  const SymplecticPath ka = build_model_path(ca);
  CHECK((ka(1.0) - ca.T_conj * diag2(2.0, 0.5) * sp_inverse(ca.T_conj)).norm() <
        1e-8);
  const CzResult cza = cz_geometric(ka);
  CHECK(cza.index == 0);
  CHECK(cza.interval.lo < -1e-3);
  CHECK(cza.interval.hi > 1e-3);

  // case b, positive shear: interval [lo, 0], index -1, degenerate end
  const EndMatrixClass cbp = classify_end_matrix(SymplecticMatrix2(shear2(1.0)));
  const CzResult czbp = cz_geometric(build_model_path(cbp));
  CHECK(czbp.index == -1);
  CHECK(czbp.interval.lo < -1e-3);
  CHECK(std::abs(czbp.interval.hi) < 1e-9);
  CHECK(czbp.degenerate);

  // case b, negative shear: interval [0, hi], index 0
  Mat2 lower = Mat2::Identity();
  lower(1, 0) = 1.0;
  const EndMatrixClass cbn = classify_end_matrix(SymplecticMatrix2(lower));
  const CzResult czbn = cz_geometric(build_model_path(cbn));
  CHECK(czbn.index == 0);
  CHECK(std::abs(czbn.interval.lo) < 1e-9);
  CHECK(czbn.interval.hi > 1e-3);
  CHECK(czbn.degenerate);

  // case c: interval is the point gamma/2pi, index 1
  const EndMatrixClass cc = classify_end_matrix(SymplecticMatrix2(rot2(kPi / 3.0)));
  const CzResult czc = cz_geometric(build_model_path(cc));
  CHECK(czc.index == 1);
  CHECK(czc.interval.lo == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(czc.interval.hi == doctest::Approx(1.0 / 6.0).epsilon(1e-9));

  // case d: interval contains 1/2 strictly, index 1
  const EndMatrixClass cd = classify_end_matrix(SymplecticMatrix2(diag2(-2.0, -0.5)));
  const CzResult czd = cz_geometric(build_model_path(cd));
  CHECK(czd.index == 1);
  CHECK(czd.interval.lo < 0.5 - 1e-3);
  CHECK(czd.interval.hi > 0.5 + 1e-3);
}

TEST_CASE("comparison loops and the Maslov relation") {
  // phi = K itself gives the constant loop
  const EndMatrixClass ca = classify_end_matrix(SymplecticMatrix2(diag2(2.0, 0.5)));
  const SymplecticPath ka = build_model_path(ca);
  CHECK(comparison_loop(ka, ca).maslov == 0);

  // manufactured path with mu = mu(K) + 2j: Maslov(M) = -j (cases a, c, d)
  for (int j = 1; j <= 2; ++j) {
    const SymplecticPath phi = path_product(
        SymplecticPath::from_evaluator(
            [j](double t) { return rot2(2.0 * kPi * j * t); }, 512),
        ka);
    CHECK(comparison_loop(phi, ca).maslov == -j);
  }
  const EndMatrixClass cc = classify_end_matrix(SymplecticMatrix2(rot2(kPi / 3.0)));
  const SymplecticPath phic = SymplecticPath::from_evaluator(
      [](double t) { return rot2((2.0 * kPi + kPi / 3.0) * t); }, 512);
  CHECK(comparison_loop(phic, cc).maslov == -1);

  const EndMatrixClass cd = classify_end_matrix(SymplecticMatrix2(diag2(-2.0, -0.5)));
  const SymplecticPath kd = build_model_path(cd);
  const SymplecticPath phid = path_product(
      SymplecticPath::from_evaluator(
          [](double t) { return rot2(2.0 * kPi * t); }, 512),
      kd);
  CHECK(comparison_loop(phid, cd).maslov == -1);

  // case b with positive shear: the loop carries the extra full rotation
  const EndMatrixClass cb = classify_end_matrix(SymplecticMatrix2(shear2(1.0)));
  const SymplecticPath kb = build_model_path(cb);
  const SymplecticPath phib = path_product(
      SymplecticPath::from_evaluator(
          [](double t) { return rot2(2.0 * kPi * t); }, 512),
      kb);
  CHECK(comparison_loop(phib, cb).maslov == 0);  // mu(phi) = 1 = 2*0 + 1
  CHECK(comparison_loop(kb, cb).maslov == 1);    // mu(phi) = -1 = 2*(-1) + 1

  // a path whose end does not match the class is not a loop
  const SymplecticPath wrong = SymplecticPath::rotation(0.3);
  CHECK(thrown_code([&] { comparison_loop(wrong, ca); }) == errc::not_a_loop);
}

TEST_CASE("twist functions satisfy boundary and slope requirements") {
  // case c: exactly linear
  const EndMatrixClass cc = classify_end_matrix(SymplecticMatrix2(rot2(kPi / 3.0)));
  const TwistFunction tc = build_twist(cc, 2);
  REQUIRE(tc.b.size() == 1025);
  REQUIRE(tc.db.size() == 1025);
  for (size_t i = 0; i < tc.b.size(); ++i) {
    const double t = static_cast<double>(i) / 1024.0;
    CHECK(std::abs(tc.b[i] - (-4.0 * kPi * t)) < 1e-12);
    CHECK(std::abs(tc.db[i] + 4.0 * kPi) < 1e-12);
  }
  CHECK(tc.b.back() - tc.b.front() == doctest::Approx(-4.0 * kPi).epsilon(1e-12));

  // case a: boundary drop and strict inequality via the determinant check
  const EndMatrixClass ca = classify_end_matrix(SymplecticMatrix2(diag2(2.0, 0.5)));
  const TwistFunction ta = build_twist(ca, 1);
  CHECK(std::abs(ta.b.back() - ta.b.front() + 2.0 * kPi) < 1e-9);
  const DeterminantCheck da = strip_determinant_check(ca, ta);
  CHECK(da.sign == -1);
  CHECK(da.min_abs > 1e-2);

  // a strongly hyperbolic end matrix still admits a twist
  const double big = std::exp(7.0);
  const EndMatrixClass cbig =
      classify_end_matrix(SymplecticMatrix2(diag2(big, 1.0 / big)));
  const DeterminantCheck dbig = strip_determinant_check(cbig, build_twist(cbig, 1));
  CHECK(dbig.sign == -1);
  CHECK(dbig.min_abs > 0.0);

  // case b both shear signs
  const EndMatrixClass cbp = classify_end_matrix(SymplecticMatrix2(shear2(1.0)));
  const DeterminantCheck dbp = strip_determinant_check(cbp, build_twist(cbp, 0));
  CHECK(dbp.sign == -1);
  CHECK(dbp.min_abs > 1.0);
  Mat2 lower = Mat2::Identity();
  lower(1, 0) = 1.0;
  const EndMatrixClass cbn = classify_end_matrix(SymplecticMatrix2(lower));
  const DeterminantCheck dbn = strip_determinant_check(cbn, build_twist(cbn, 1));
  CHECK(dbn.sign == -1);
  CHECK(dbn.min_abs > 1.0);

  // case d with k = 0 and k = 2
  const EndMatrixClass cd = classify_end_matrix(SymplecticMatrix2(diag2(-2.0, -0.5)));
  for (int k : {0, 2}) {
    const TwistFunction td = build_twist(cd, k);
    CHECK(std::abs(td.b.back() - td.b.front() + 2.0 * kPi * k) < 1e-9);
    const DeterminantCheck dd = strip_determinant_check(cd, td);
    CHECK(dd.sign == -1);
    CHECK(dd.min_abs > 0.0);
  }

  // winding validation per case
  CHECK(thrown_code([&] { build_twist(ca, 0); }) == errc::bad_input);
  CHECK(thrown_code([&] { build_twist(cbn, 0); }) == errc::bad_input);
  CHECK(thrown_code([&] { build_twist(cc, -1); }) == errc::bad_input);
}

TEST_CASE("determinant check closed form and sign-change rejection") {
  const EndMatrixClass cc = classify_end_matrix(SymplecticMatrix2(rot2(kPi / 3.0)));
  const TwistFunction tc = build_twist(cc, 1);
  const DeterminantCheck dc = strip_determinant_check(cc, tc);
  CHECK(dc.sign == -1);
  CHECK(dc.min_abs == doctest::Approx(2.0 * kPi + kPi / 3.0).epsilon(1e-9));

  // tampering with the slope flips the sign somewhere -> rejected
  TwistFunction bad = build_twist(cc, 1);
  bad.db[512] = 10.0;
  CHECK(thrown_code([&] { strip_determinant_check(cc, bad); }) ==
        errc::sign_change);

  // mismatched case tags are rejected
  const EndMatrixClass ca = classify_end_matrix(SymplecticMatrix2(diag2(2.0, 0.5)));
  CHECK(thrown_code([&] { strip_determinant_check(ca, tc); }) ==
        errc::bad_input);
}

TEST_CASE("randomized draws: classify, rebuild, twist, check") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int draw = 0; draw < 20; ++draw) {
    const int which = draw % 4;
    Mat2 rep;
    switch (which) {
      case 0:
        rep = diag2(1.5 + 3.0 * uni(rng), 0.0);
        rep(1, 1) = 1.0 / rep(0, 0);
        break;
      case 1:
        rep = shear2(uni(rng) < 0.5 ? 1.0 : -1.0);
        break;
      case 2:
        rep = rot2(0.3 + 5.5 * uni(rng));
        break;
      default: {
        const double a = -(1.5 + 3.0 * uni(rng));
        rep = diag2(a, 1.0 / a);
        break;
      }
    }
    const Mat2 s = testsupport::random_symplectic(rng);
    const Mat2 m = sp_inverse(s) * rep * s;
    const EndMatrixClass cls = classify_end_matrix(SymplecticMatrix2(m));
    CHECK(reconstruction_error(m, cls) < 1e-8);

    const SymplecticPath model = build_model_path(cls);
    CHECK((model(1.0) - cls.T_conj * m * sp_inverse(cls.T_conj)).norm() < 1e-8);

    const int k =
        (cls.tag == EndMatrixClass::Tag::a ||
         (cls.tag == EndMatrixClass::Tag::b && cls.param < 0.0))
            ? 1 + (draw % 2)
            : draw % 3;
    const TwistFunction tw = build_twist(cls, k);
    CHECK(std::abs(tw.b.back() - tw.b.front() + 2.0 * kPi * k) < 1e-9);
    const DeterminantCheck check = strip_determinant_check(cls, tw);
    CHECK(check.sign == -1);
    CHECK(check.min_abs > 0.0);
  }
}
