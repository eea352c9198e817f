#include "reebdyn/crosscheck.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "reebdyn/cz_geometric.hpp"

namespace reebdyn {

namespace {

struct TrigCoeffs {
  Mat2 a0 = Mat2::Zero();
  std::vector<Mat2> cosc;
  std::vector<Mat2> sinc;
};

Mat2 random_sym(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  Mat2 m;
  m << a, b, b, c;
  return m;
}

/// Deterministic coefficient draw: constant term, then cosine and sine
/// matrices per degree, then an amplitude factor in [0.3, 1]·max_entry.
TrigCoeffs draw_coeffs(std::uint64_t seed, int max_degree, double max_entry) {
  std::mt19937_64 rng(seed);
  TrigCoeffs tc;
  tc.a0 = random_sym(rng);
  for (int d = 0; d < max_degree; ++d) tc.cosc.push_back(random_sym(rng));
  for (int d = 0; d < max_degree; ++d) tc.sinc.push_back(random_sym(rng));
  std::uniform_real_distribution<double> amp(0.3, 1.0);
  const double target = max_entry * amp(rng);

  double peak = 0.0;
  for (int i = 0; i < 512; ++i) {
    const double t = static_cast<double>(i) / 512.0;
    Mat2 acc = tc.a0;
    for (size_t d = 0; d < tc.cosc.size(); ++d) {
      acc += std::cos(2.0 * 3.14159265358979323846 * (d + 1) * t) * tc.cosc[d];
    }
    for (size_t d = 0; d < tc.sinc.size(); ++d) {
      acc += std::sin(2.0 * 3.14159265358979323846 * (d + 1) * t) * tc.sinc[d];
    }
    peak = std::max(peak, max_abs(acc));
  }
  const double scale = (peak > 0.0) ? target / peak : 1.0;
  tc.a0 *= scale;
  for (Mat2& m : tc.cosc) m *= scale;
  for (Mat2& m : tc.sinc) m *= scale;
  return tc;
}

SymmetricPotential build(const TrigCoeffs& tc) {
  return SymmetricPotential::trig(tc.a0, tc.cosc, tc.sinc);
}

SymmetricPotential build_shifted(const TrigCoeffs& tc, double theta) {
  TrigCoeffs shifted = tc;
  shifted.a0 += theta * Mat2::Identity();
  return build(shifted);
}

/// det(φ_θ(1) − I) for the path of the shifted potential; vanishes exactly
/// when 1 is an eigenvalue of the end matrix.
double end_degeneracy(const TrigCoeffs& tc, double theta) {
  const SymplecticPath path = path_from_potential(build_shifted(tc, theta),
                                                  2048);
  return (path.end() - Mat2::Identity()).determinant();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SymmetricPotential random_potential(std::uint64_t seed, int max_degree,
                                    double max_entry) {
  if (max_degree < 0 || max_degree > 64 || max_entry <= 0.0) {
    throw DomainError(errc::bad_input, "invalid random-potential parameters");
  }
  return build(draw_coeffs(seed, max_degree, max_entry));
}

SymmetricPotential engineered_degenerate_potential(std::uint64_t seed) {
  std::uint64_t attempt_seed = seed;
  for (int attempt = 0; attempt < 8; ++attempt) {
    // Milder amplitude than the generic draw keeps the θ-sweep tame.
    const TrigCoeffs tc = draw_coeffs(splitmix64(attempt_seed), 4, 3.0);

    // Scan θ for a sign change of det(φ_θ(1) − I). Shifting by θ·I adds θ
    // of rotation across the path, so a degeneracy occurs within any θ-range
    // longer than 2π; scan both directions to catch it transversally.
    const int grid = 160;
    const double span = 7.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool found = false;
    for (int sign = 0; sign < 2 && !found; ++sign) {
      const double dir = (sign == 0) ? 1.0 : -1.0;
      double prev_theta = 0.0;
      double prev_val = end_degeneracy(tc, 0.0);
      for (int i = 1; i <= grid; ++i) {
        const double theta = dir * span * static_cast<double>(i) / grid;
        const double val = end_degeneracy(tc, theta);
        if ((prev_val < 0.0) != (val < 0.0)) {
          bracket_lo = std::min(prev_theta, theta);
          bracket_hi = std::max(prev_theta, theta);
          found = true;
          break;
        }
        prev_theta = theta;
        prev_val = val;
      }
    }
    if (!found) {
      attempt_seed = splitmix64(attempt_seed ^ 0xabcdef1234567890ULL);
      continue;
    }

    double lo = bracket_lo, hi = bracket_hi;
    double f_lo = end_degeneracy(tc, lo);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = end_degeneracy(tc, mid);
      if (std::abs(f_mid) < 1e-13) {
        return build_shifted(tc, mid);
      }
      if ((f_lo < 0.0) == (f_mid < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-15) break;
    }
    const double theta = 0.5 * (lo + hi);
    if (std::abs(end_degeneracy(tc, theta)) < 1e-11) {
      return build_shifted(tc, theta);
    }
    attempt_seed = splitmix64(attempt_seed ^ 0x5555aaaa5555aaaaULL);
  }
  throw DomainError(errc::no_convergence,
                    "could not engineer a degenerate potential from seed " +
                        std::to_string(seed));
}

CrosscheckReport crosscheck_batch(int n, std::uint64_t seed, int n_degenerate,
                                  int jobs) {
  if (n < 0 || n_degenerate < 0 || n_degenerate > n) {
    throw DomainError(errc::bad_input, "invalid crosscheck batch sizes");
  }
  CrosscheckReport report;
  report.items.assign(n, CrosscheckItem{});

  auto run_item = [&](int i) {
    CrosscheckItem item;
    item.seed = splitmix64(seed + static_cast<std::uint64_t>(i));
    item.engineered_degenerate = i < n_degenerate;
    const SymmetricPotential s =
        item.engineered_degenerate
            ? engineered_degenerate_potential(item.seed)
            : random_potential(item.seed);
    const CzResult geo = cz_geometric(path_from_potential(s));
    const CzSpectralDetail spec = cz_spectral_detail(s);
    const bool spec_degenerate = std::abs(spec.lambda_plus) < 1e-9;
    item.geometric = geo.index;
    item.spectral = spec.index;
    item.degenerate = geo.degenerate;
    item.agree =
        (geo.index == spec.index) && (geo.degenerate == spec_degenerate);
    report.items[i] = item;
  };

  const int workers = std::max(1, std::min(jobs, n > 0 ? n : 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) run_item(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < n; i += workers) run_item(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const CrosscheckItem& item : report.items) {
    if (item.agree) {
      ++report.agree;
    } else {
      ++report.disagree;
    }
    if (item.degenerate) ++report.degenerate_count;
  }
  return report;
}

}  // namespace reebdyn
