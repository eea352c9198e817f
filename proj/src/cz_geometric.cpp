#include "reebdyn/cz_geometric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

namespace reebdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTau = 2.0 * kPi;

/// Memoized path evaluation on the dyadic grid t = j/2^26. The winding
/// interval evaluates thousands of lifts of the same path; consecutive lifts
/// revisit almost identical t-grids, so caching makes the sweep linear in the
/// number of distinct t values instead of lifts × steps.
class CachedPath {
public:
  explicit CachedPath(const SymplecticPath& p) : path_(p) {}

  static constexpr long long kDen = 1LL << 26;

  const Mat2& at(long long num) {
    auto it = memo_.find(num);
    if (it != memo_.end()) return it->second;
    const double t = static_cast<double>(num) / static_cast<double>(kDen);
    return memo_.emplace(num, path_(t)).first->second;
  }

private:
  const SymplecticPath& path_;
  std::unordered_map<long long, Mat2> memo_;
};

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Δ(s) = (θ(1,s) − s)/2π via a lift walked on dyadic steps (start 1/64,
/// bisected while a substep would turn by π/4 or more; floor 2^-26).
double lift_delta(CachedPath& cp, double s) {
  const Vec2 start(std::cos(s), std::sin(s));
  Vec2 prev = start;
  double theta = 0.0;  // accumulated increment; Δ needs only θ(1,s) − s
  long long pos = 0;
  long long step = CachedPath::kDen / 64;
  while (pos < CachedPath::kDen) {
    long long h = std::min(step, CachedPath::kDen - pos);
    for (;;) {
      const Vec2 next = cp.at(pos + h) * start;
      if (next.norm() < 1e-12) {
        throw DomainError(errc::lift_resolution_failure,
                          "trajectory collapses to the origin");
      }
      const double inc = std::atan2(cross2(prev, next), prev.dot(next));
      if (std::abs(inc) < kPi / 4.0) {
        theta += inc;
        prev = next;
        pos += h;
        step = (std::abs(inc) < kPi / 16.0)
                   ? std::min(2 * h, CachedPath::kDen / 64)
                   : h;
        break;
      }
      if (h == 1) {
        throw DomainError(errc::lift_resolution_failure,
                          "winding-interval lift cannot resolve the path at "
                          "dyadic resolution 2^-26");
      }
      h /= 2;
    }
  }
  return theta / kTau;
}

}  // namespace

WindingInterval winding_interval(const SymplecticPath& path) {
  CachedPath cp(path);
  std::map<double, double> pts;  // s → Δ(s), s ∈ [0, π)
  for (int i = 0; i < 64; ++i) {
    const double s = kPi * static_cast<double>(i) / 64.0;
    pts.emplace(s, lift_delta(cp, s));
  }

  double prev_lo = 0.0, prev_hi = 0.0;
  int stable_rounds = 0;
  for (int round = 0; round < 60; ++round) {
    double lo = pts.begin()->second, hi = lo;
    for (const auto& [s, d] : pts) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (round > 0 && std::abs(lo - prev_lo) < 3e-10 &&
        std::abs(hi - prev_hi) < 3e-10) {
      ++stable_rounds;
    } else {
      stable_rounds = 0;
    }
    prev_lo = lo;
    prev_hi = hi;
    if (round >= 6 && stable_rounds >= 3) break;

    // Refine: split intervals with large variation anywhere, and keep
    // splitting intervals near the current extrema until they are flat.
    std::vector<double> inserts;
    auto consider = [&](double s0, double d0, double s1_wrapped, double d1,
                        double gap) {
      const double span = std::abs(d1 - d0);
      const bool near_extreme = std::min(d0, d1) <= lo + 1e-4 ||
                                std::max(d0, d1) >= hi - 1e-4;
      if (span > 1e-4 || (near_extreme && span > 1e-10)) {
        double mid = s0 + 0.5 * gap;
        if (mid >= kPi) mid -= kPi;
        inserts.push_back(mid);
      }
      (void)s1_wrapped;
    };
    auto it = pts.begin();
    auto next = std::next(it);
    for (; next != pts.end(); ++it, ++next) {
      consider(it->first, it->second, next->first, next->second,
               next->first - it->first);
    }
    // circular wrap: last point to first point + π (Δ is π-periodic in s)
    consider(it->first, it->second, pts.begin()->first + kPi,
             pts.begin()->second, pts.begin()->first + kPi - it->first);

    if (inserts.empty()) break;
    for (double s : inserts) {
      if (!pts.count(s)) pts.emplace(s, lift_delta(cp, s));
    }
    if (pts.size() > 120000) {
      throw DomainError(errc::lift_resolution_failure,
                        "winding-interval refinement did not converge "
                        "(extrema still moving after 120000 samples)");
    }
  }

  const WindingInterval iv{prev_lo, prev_hi};
  if (iv.length() >= 0.5) {
    throw DomainError(errc::interval_too_long,
                      "winding interval has length " +
                          std::to_string(iv.length()) +
                          " >= 1/2; the input is not a continuous "
                          "symplectic path");
  }
  return iv;
}

int mu_hat(const WindingInterval& iv) {
  auto snap = [](double x) {
    const double r = std::round(x);
    return (std::abs(x - r) < 1e-6) ? r : x;
  };
  const double lo = snap(iv.lo);
  const double hi = snap(iv.hi);
  const double k0 = std::ceil(lo);
  if (k0 < hi) return 2 * static_cast<int>(std::llround(k0));
  return 2 * static_cast<int>(std::llround(std::ceil(lo))) - 1;
}

CzResult cz_geometric(const SymplecticPath& path) {
  const WindingInterval iv = winding_interval(path);
  const double gap_lo = std::abs(iv.lo - std::round(iv.lo));
  const double gap_hi = std::abs(iv.hi - std::round(iv.hi));
  const double endpoint_gap = std::min(gap_lo, gap_hi);
  const bool interval_degenerate = endpoint_gap < 1e-6;

  const Mat2 end_gap = path.end() - Mat2::Identity();
  const double det_gap = std::abs(end_gap.determinant());
  const bool det_degenerate = det_gap < 1e-8;

  if (interval_degenerate != det_degenerate) {
    throw DomainError(
        errc::degeneracy_mismatch,
        "degeneracy tests disagree: endpoint gap " +
            std::to_string(endpoint_gap) + " turns (threshold 1e-6) vs "
            "|det(end - I)| = " +
            std::to_string(det_gap) + " (threshold 1e-8)");
  }

  return CzResult{mu_hat(iv), interval_degenerate, iv, endpoint_gap};
}

int framing_shift(int index, int sl) { return index + 2 * sl; }

}  // namespace reebdyn
