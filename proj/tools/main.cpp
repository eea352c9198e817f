// reebdyn — command-line front end for the Reeb-dynamics / Conley–Zehnder
// library. Subcommands mirror the library modules; all structured output is
// single-line JSON with doubles at 17 significant digits so seeded runs are
// byte-identical. Exit codes: 0 success, 1 domain error (JSON error object),
// 2 usage error (schema help on stderr).

#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "reebdyn/crosscheck.hpp"
#include "reebdyn/cz_geometric.hpp"
#include "reebdyn/cz_spectral.hpp"
#include "reebdyn/errors.hpp"
#include "reebdyn/json_io.hpp"
#include "reebdyn/link_knot.hpp"
#include "reebdyn/reeb_flow.hpp"
#include "reebdyn/sections.hpp"
#include "reebdyn/sp_path.hpp"
#include "reebdyn/strip.hpp"

namespace {

using reebdyn::DomainError;
using reebdyn::Mat2;
using reebdyn::Vec4;
using reebdyn::io::json;
using reebdyn::io::ojson;
namespace errc = reebdyn::errc;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_json(const ojson& j) { std::cout << reebdyn::io::dump17(j) << "\n"; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DomainError(errc::bad_input, "cannot open file '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(errc::bad_input,
                      "failed to parse '" + path + "': " + e.what());
  }
}

Vec4 vec4_from(const std::vector<double>& v) {
  return Vec4(v[0], v[1], v[2], v[3]);
}

/// Config files are JSON objects mirroring the flag names, with subcommand
/// scopes as nested objects, e.g. {"jobs": 4, "cz": {"geometric":
/// {"builder": "rotation", "alpha": 0.5}}}. Explicit flags always win
/// because CLI11 applies config values only to options not seen on the
/// command line.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::exception& e) {
      throw CLI::FileError(std::string("config is not valid JSON: ") +
                           e.what());
    }
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

private:
  static std::string scalar(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  static void walk(const json& j, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object()) {
      throw CLI::FileError("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto deeper = parents;
        deeper.push_back(key);
        walk(value, deeper, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const json& el : value) item.inputs.push_back(scalar(el));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(item);
    }
  }
};

// --- shared option groups ---------------------------------------------------

struct LevelOpts {
  std::string kind = "ellipsoid";
  double r1 = 1.0;
  double r2 = 1.0;
  std::vector<double> coeffs;
  double eps = 1.0;
  std::string file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--level", kind, "level kind")
        ->check(CLI::IsMember({"ellipsoid", "perturbed_ellipsoid"}))
        ->capture_default_str();
    cmd->add_option("--r1", r1, "first semiaxis")->capture_default_str();
    cmd->add_option("--r2", r2, "second semiaxis")->capture_default_str();
    cmd->add_option("--coeffs", coeffs,
                    "perturbation coefficients (up to 10, comma separated)")
        ->delimiter(',');
    cmd->add_option("--eps", eps, "perturbation amplitude")
        ->capture_default_str();
    cmd->add_option("--level-file", file,
                    "JSON level spec (overrides the flags above)");
  }

  reebdyn::StarShapedLevel build() const {
    if (!file.empty()) return reebdyn::io::level_from_json(read_json_file(file));
    json spec;
    spec["kind"] = kind;
    spec["r1"] = r1;
    spec["r2"] = r2;
    if (kind == "perturbed_ellipsoid") {
      spec["coeffs"] = coeffs;
      spec["eps"] = eps;
    }
    return reebdyn::io::level_from_json(spec);
  }
};

struct PathOpts {
  std::string builder;
  double alpha = 0.5;
  double a = 1.0;
  double c = 1.0;
  std::uint64_t seed = 1;
  bool degenerate = false;
  int steps = 4096;
  int degree = 4;
  double max_entry = 6.0;
  std::string file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--builder", builder,
                    "path builder: rotation | shear | hyperbolic | potential")
        ->check(CLI::IsMember(
            {"rotation", "shear", "hyperbolic", "potential", "samples"}));
    cmd->add_option("--alpha", alpha, "rotation amount in turns")
        ->capture_default_str();
    cmd->add_option("--a", a, "shear coefficient")->capture_default_str();
    cmd->add_option("--c", c, "hyperbolic coefficient")->capture_default_str();
    cmd->add_option("--seed", seed, "potential seed")->capture_default_str();
    cmd->add_flag("--degenerate", degenerate,
                  "use the engineered degenerate potential for this seed");
    cmd->add_option("--steps", steps, "potential path integration steps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--degree", degree, "random potential trig degree")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-entry", max_entry, "random potential entry bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--path-file", file,
                    "JSON path spec (overrides the flags above)");
  }

  json spec() const {
    if (!file.empty()) return read_json_file(file);
    if (builder.empty()) {
      throw CLI::RequiredError("--builder (or --path-file)");
    }
    json params;
    if (builder == "rotation") {
      params["alpha"] = alpha;
    } else if (builder == "shear") {
      params["a"] = a;
    } else if (builder == "hyperbolic") {
      params["c"] = c;
    } else if (builder == "potential") {
      params["seed"] = seed;
      params["degenerate"] = degenerate;
      params["steps"] = steps;
      params["degree"] = degree;
      params["max_entry"] = max_entry;
    } else {
      throw DomainError(errc::bad_input,
                        "builder 'samples' requires --path-file");
    }
    json spec;
    spec["builder"] = builder;
    spec["params"] = params;
    return spec;
  }
};

ojson orbit_summary(const reebdyn::StarShapedLevel& level,
                    const reebdyn::PeriodicOrbit& orbit, bool with_samples,
                    bool with_index) {
  ojson j = reebdyn::io::orbit_to_json(orbit, with_samples);
  if (with_index) {
    const reebdyn::CzResult cz = reebdyn::orbit_cz(level, orbit);
    j["index"] = cz.index;
    j["interval"] = reebdyn::io::interval_to_json(cz.interval);
    j["degenerate"] = cz.degenerate;
  }
  return j;
}

std::pair<Vec4, double> orbit_seed(const reebdyn::StarShapedLevel& level,
                                   const std::string& which) {
  const double pi = 3.14159265358979323846;
  if (which == "short") {
    const double r = std::min(level.r1(), level.r2());
    return {level.r1() <= level.r2() ? Vec4(1, 0, 0, 0) : Vec4(0, 0, 1, 0),
            pi * r * r};
  }
  const double r = std::max(level.r1(), level.r2());
  return {level.r1() <= level.r2() ? Vec4(0, 0, 1, 0) : Vec4(1, 0, 0, 0),
          pi * r * r};
}

reebdyn::ClosedCurve circle_curve(int plane, double height, double radius,
                                  int n) {
  // circle of given radius in the plane pair `plane` (0: x1x2, 1: x3x4),
  // offset to `height` in the first coordinate of the other pair, then
  // normalized back to S^3 (height 0, radius 1 gives a great circle).
  std::vector<Vec4> pts;
  pts.reserve(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * pi * i / n;
    Vec4 p;
    if (plane == 0) {
      p = Vec4(radius * std::cos(th), radius * std::sin(th), height, 0.0);
    } else {
      p = Vec4(height, 0.0, radius * std::cos(th), radius * std::sin(th));
    }
    pts.push_back(p.normalized());
  }
  return reebdyn::ClosedCurve(std::move(pts));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "reebdyn: Conley-Zehnder indices of symplectic paths and Reeb dynamics "
      "on star-shaped levels in S^3"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "reebdyn 0.1.0");
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "",
                 "JSON config file mirroring the flags; explicit flags win");

  int jobs = 1;
  app.add_option("--jobs", jobs, "worker thread cap for batch subcommands")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // --- cz -------------------------------------------------------------------
  auto* cz = app.add_subcommand(
      "cz", "Conley-Zehnder index of a symplectic path on [0,1]");
  cz->require_subcommand(1);

  auto* czg = cz->add_subcommand(
      "geometric", "winding-interval route: index, interval, degeneracy");
  auto czg_path = std::make_shared<PathOpts>();
  czg_path->attach(czg);
  czg->callback([czg_path] {
    const reebdyn::SymplecticPath path =
        reebdyn::io::path_from_json(czg_path->spec());
    print_json(reebdyn::io::cz_to_json(reebdyn::cz_geometric(path)));
  });

  auto* czs = cz->add_subcommand(
      "spectral", "asymptotic-operator route: index from eigenvalue windings");
  auto czs_path = std::make_shared<PathOpts>();
  czs_path->attach(czs);
  auto czs_trunc = std::make_shared<int>(64);
  czs->add_option("--truncation", *czs_trunc, "Fourier truncation order")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  czs->callback([czs_path, czs_trunc] {
    const reebdyn::SymmetricPotential pot =
        reebdyn::io::potential_from_json(czs_path->spec());
    print_json(reebdyn::io::spectral_detail_to_json(
        reebdyn::cz_spectral_detail(pot, *czs_trunc)));
  });

  // --- spectrum ---------------------------------------------------------------
  auto* spm = app.add_subcommand(
      "spectrum", "eigenvalues of the asymptotic operator in a window");
  auto spm_path = std::make_shared<PathOpts>();
  spm_path->attach(spm);
  auto spm_trunc = std::make_shared<int>(64);
  auto spm_window = std::make_shared<std::vector<double>>();
  auto spm_format = std::make_shared<std::string>("csv");
  spm->add_option("--truncation", *spm_trunc, "Fourier truncation order")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spm->add_option("--window", *spm_window, "eigenvalue window: LO HI")
      ->delimiter(',')
      ->expected(2);
  spm->add_option("--format", *spm_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  spm->callback([spm_path, spm_trunc, spm_window, spm_format] {
    double lo = -10.0, hi = 10.0;
    if (spm_window->size() == 2) {
      lo = (*spm_window)[0];
      hi = (*spm_window)[1];
    }
    const reebdyn::SymmetricPotential pot =
        reebdyn::io::potential_from_json(spm_path->spec());
    const reebdyn::SpectrumSlice slice =
        reebdyn::spectrum(pot, *spm_trunc, lo, hi);
    if (*spm_format == "json") {
      print_json(reebdyn::io::spectrum_to_json(slice));
      return;
    }
    std::cout << "value,winding,multiplicity\n";
    for (const reebdyn::SpectralLine& l : slice.lines) {
      std::cout << fmt17(l.value) << "," << l.winding << "," << l.multiplicity
                << "\n";
    }
  });

  // --- reeb -------------------------------------------------------------------
  auto* reeb = app.add_subcommand(
      "reeb", "evaluate the Reeb field and flow a point on a level");
  auto reeb_level = std::make_shared<LevelOpts>();
  reeb_level->attach(reeb);
  auto reeb_point = std::make_shared<std::vector<double>>();
  auto reeb_time = std::make_shared<double>(1.0);
  auto reeb_tol = std::make_shared<double>(1e-10);
  reeb->add_option("--point", *reeb_point,
                   "start point on S^3 as x1,x2,x3,x4 (normalized if needed)")
      ->delimiter(',')
      ->expected(4)
      ->required();
  reeb->add_option("--time", *reeb_time, "flow time")->capture_default_str();
  reeb->add_option("--tol", *reeb_tol, "integration tolerance")
      ->capture_default_str();
  reeb->callback([reeb_level, reeb_point, reeb_time, reeb_tol] {
    const reebdyn::StarShapedLevel level = reeb_level->build();
    Vec4 p = vec4_from(*reeb_point);
    if (p.norm() < 1e-12) {
      throw DomainError(errc::bad_input, "start point must be nonzero");
    }
    p.normalize();
    ojson j;
    j["point"] = reebdyn::io::vec4_to_json(p);
    j["f"] = level.f(p);
    j["reeb"] = reebdyn::io::vec4_to_json(reebdyn::reeb_at(level, p));
    j["time"] = *reeb_time;
    j["endpoint"] = reebdyn::io::vec4_to_json(
        reebdyn::flow(level, p, *reeb_time, *reeb_tol));
    print_json(j);
  });

  // --- orbit ------------------------------------------------------------------
  auto* orb = app.add_subcommand(
      "orbit", "refine a periodic Reeb orbit and report its index");
  auto orb_level = std::make_shared<LevelOpts>();
  orb_level->attach(orb);
  auto orb_which = std::make_shared<std::string>("short");
  auto orb_seed = std::make_shared<std::vector<double>>();
  auto orb_tguess = std::make_shared<double>(0.0);
  auto orb_samples = std::make_shared<int>(512);
  auto orb_emit = std::make_shared<bool>(false);
  auto orb_noindex = std::make_shared<bool>(false);
  auto orb_out = std::make_shared<std::string>();
  orb->add_option("--which", *orb_which,
                  "seed the short- or long-axis ellipsoid orbit")
      ->check(CLI::IsMember({"short", "long"}))
      ->capture_default_str();
  orb->add_option("--seed-point", *orb_seed,
                  "explicit seed point x1,x2,x3,x4 (overrides --which)")
      ->delimiter(',')
      ->expected(4);
  orb->add_option("--t-guess", *orb_tguess,
                  "period guess (required with --seed-point)");
  orb->add_option("--samples", *orb_samples, "orbit sample count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  orb->add_flag("--emit-samples", *orb_emit, "include samples in the output");
  orb->add_flag("--no-index", *orb_noindex, "skip the Conley-Zehnder data");
  orb->add_option("--out", *orb_out, "write full JSON (with samples) here");
  orb->callback([orb_level, orb_which, orb_seed, orb_tguess, orb_samples,
                 orb_emit, orb_noindex, orb_out] {
    const reebdyn::StarShapedLevel level = orb_level->build();
    Vec4 seed;
    double t_guess = 0.0;
    if (orb_seed->size() == 4) {
      seed = vec4_from(*orb_seed);
      if (seed.norm() < 1e-12) {
        throw DomainError(errc::bad_input, "seed point must be nonzero");
      }
      seed.normalize();
      t_guess = *orb_tguess;
      if (t_guess <= 0.0) {
        throw DomainError(errc::bad_input,
                          "--seed-point requires a positive --t-guess");
      }
    } else {
      std::tie(seed, t_guess) = orbit_seed(level, *orb_which);
    }
    const reebdyn::PeriodicOrbit orbit =
        reebdyn::find_orbit(level, seed, t_guess, *orb_samples);
    if (!orb_out->empty()) {
      std::ofstream out(*orb_out);
      if (!out) {
        throw DomainError(errc::bad_input,
                          "cannot open output file '" + *orb_out + "'");
      }
      out << reebdyn::io::dump17(
                 orbit_summary(level, orbit, true, !*orb_noindex))
          << "\n";
    }
    print_json(orbit_summary(level, orbit, *orb_emit, !*orb_noindex));
  });

  // --- scan -------------------------------------------------------------------
  auto* scan = app.add_subcommand(
      "scan", "enumerate periodic orbits below an action cutoff");
  auto scan_level = std::make_shared<LevelOpts>();
  scan_level->attach(scan);
  auto scan_cutoff = std::make_shared<double>(0.0);
  auto scan_res = std::make_shared<int>(2);
  auto scan_emit = std::make_shared<bool>(false);
  scan->add_option("--cutoff", *scan_cutoff, "action cutoff")
      ->required()
      ->check(CLI::PositiveNumber);
  scan->add_option("--seed-resolution", *scan_res,
                   "seed grid refinement level")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scan->add_flag("--emit-samples", *scan_emit,
                 "include orbit samples in the output");
  scan->callback([scan_level, scan_cutoff, scan_res, scan_emit] {
    const reebdyn::StarShapedLevel level = scan_level->build();
    print_json(reebdyn::io::scan_to_json(
        reebdyn::convexity_scan(level, *scan_cutoff, *scan_res), *scan_emit));
  });

  // --- link -------------------------------------------------------------------
  auto* link = app.add_subcommand(
      "link", "Gauss linking number of two closed curves in S^3");
  auto link_demo = std::make_shared<std::string>();
  auto link_files = std::make_shared<std::vector<std::string>>();
  link->add_option("--demo", *link_demo, "built-in pair")
      ->check(CLI::IsMember({"hopf", "unlinked"}));
  link->add_option("--curve-file", *link_files,
                   "JSON curve file (give exactly twice)")
      ->expected(1)
      ->allow_extra_args(false);
  link->callback([link_demo, link_files] {
    std::vector<reebdyn::ClosedCurve> curves;
    if (!link_demo->empty()) {
      if (*link_demo == "hopf") {
        curves.push_back(circle_curve(0, 0.0, 1.0, 512));
        curves.push_back(circle_curve(1, 0.0, 1.0, 512));
      } else {
        curves.push_back(circle_curve(0, 0.6, 0.8, 512));
        curves.push_back(circle_curve(0, -0.6, 0.8, 512));
      }
    } else {
      if (link_files->size() != 2) {
        throw CLI::RequiredError("--demo or two --curve-file inputs");
      }
      for (const std::string& f : *link_files) {
        curves.push_back(reebdyn::io::curve_from_json(read_json_file(f)));
      }
    }
    print_json(reebdyn::io::linking_to_json(
        reebdyn::gauss_linking_detail(curves[0], curves[1])));
  });

  // --- selflink ---------------------------------------------------------------
  auto* slk = app.add_subcommand(
      "selflink",
      "self-linking number of a closed orbit in the global frame");
  auto slk_level = std::make_shared<LevelOpts>();
  slk_level->attach(slk);
  auto slk_which = std::make_shared<std::string>("short");
  auto slk_file = std::make_shared<std::string>();
  slk->add_option("--which", *slk_which,
                  "short- or long-axis ellipsoid orbit")
      ->check(CLI::IsMember({"short", "long"}))
      ->capture_default_str();
  slk->add_option("--curve-file", *slk_file,
                  "JSON curve file (overrides --which)");
  slk->callback([slk_level, slk_which, slk_file] {
    const reebdyn::StarShapedLevel level = slk_level->build();
    const reebdyn::GlobalXiFrame frame = reebdyn::quaternionic_frame(level);
    std::unique_ptr<reebdyn::ClosedCurve> knot;
    if (!slk_file->empty()) {
      knot = std::make_unique<reebdyn::ClosedCurve>(
          reebdyn::io::curve_from_json(read_json_file(*slk_file)));
    } else {
      auto [seed, t_guess] = orbit_seed(level, *slk_which);
      knot = std::make_unique<reebdyn::ClosedCurve>(
          reebdyn::ClosedCurve::from_orbit(
              reebdyn::find_orbit(level, seed, t_guess)));
    }
    print_json(reebdyn::io::self_linking_to_json(
        reebdyn::self_linking_detail(*knot, frame)));
  });

  // --- strip ------------------------------------------------------------------
  auto* strip = app.add_subcommand(
      "strip", "end-matrix normal form, twist profile, and pinched-strip "
               "determinant check");
  auto strip_matrix = std::make_shared<std::vector<double>>();
  auto strip_trace = std::make_shared<double>(0.0);
  auto* strip_trace_opt =
      strip->add_option("--trace", *strip_trace,
                        "build a representative end matrix with this trace");
  strip->add_option("--matrix", *strip_matrix,
                    "end matrix as m00,m01,m10,m11 (row-major)")
      ->delimiter(',')
      ->expected(4);
  auto strip_file = std::make_shared<std::string>();
  strip->add_option("--matrix-file", *strip_file,
                    "JSON 2x2 row-major end matrix");
  auto strip_k = std::make_shared<int>(1);
  strip->add_option("--k", *strip_k, "twist parameter")->capture_default_str();
  auto strip_path = std::make_shared<std::string>();
  strip->add_option("--path-file", *strip_path,
                    "JSON path spec for the comparison loop (default: the "
                    "model path)");
  strip->callback([strip_matrix, strip_trace, strip_trace_opt, strip_file,
                   strip_k, strip_path] {
    Mat2 m;
    if (!strip_file->empty()) {
      m = reebdyn::io::mat2_from_json(read_json_file(*strip_file));
    } else if (strip_matrix->size() == 4) {
      m << (*strip_matrix)[0], (*strip_matrix)[1], (*strip_matrix)[2],
          (*strip_matrix)[3];
    } else if (strip_trace_opt->count() > 0) {
      const double tr = *strip_trace;
      if (std::abs(tr) < 2.0) {
        const double g = std::acos(tr / 2.0);
        m << std::cos(g), -std::sin(g), std::sin(g), std::cos(g);
      } else {
        const double lam =
            (tr + (tr > 0 ? 1.0 : -1.0) * std::sqrt(tr * tr - 4.0)) / 2.0;
        m << lam, 0.0, 0.0, 1.0 / lam;
      }
    } else {
      throw CLI::RequiredError("--matrix, --trace, or --matrix-file");
    }
    const reebdyn::EndMatrixClass cls =
        reebdyn::classify_end_matrix(reebdyn::SymplecticMatrix2(m));
    const reebdyn::SymplecticPath path =
        strip_path->empty()
            ? reebdyn::build_model_path(cls)
            : reebdyn::io::path_from_json(read_json_file(*strip_path));
    const reebdyn::ComparisonLoop loop = reebdyn::comparison_loop(path, cls);
    const reebdyn::TwistFunction twist = reebdyn::build_twist(cls, *strip_k);
    const reebdyn::DeterminantCheck check =
        reebdyn::strip_determinant_check(cls, twist);
    ojson j = reebdyn::io::end_class_to_json(cls);
    j["k"] = *strip_k;
    j["maslov_M"] = loop.maslov;
    j["min_abs_drd"] = check.min_abs;
    j["sign"] = check.sign;
    print_json(j);
  });

  // --- section ----------------------------------------------------------------
  auto* sec = app.add_subcommand(
      "section", "disk-like surfaces of section of the ellipsoid open book");
  sec->require_subcommand(1);

  auto sec_level = std::make_shared<LevelOpts>();
  auto sec_which = std::make_shared<int>(0);
  auto attach_section_opts = [&](CLI::App* cmd) {
    sec_level->attach(cmd);
    cmd->add_option("--page", *sec_which, "page of the open book (0 or 1)")
        ->check(CLI::Range(0, 1))
        ->capture_default_str();
  };

  auto* secrm = sec->add_subcommand(
      "return-map", "first-return map at interior chart points");
  attach_section_opts(secrm);
  auto rm_zs = std::make_shared<std::vector<double>>();
  auto rm_tol = std::make_shared<double>(1e-12);
  auto rm_csv = std::make_shared<std::string>();
  secrm->add_option("--z", *rm_zs, "chart point re,im (repeatable)")
      ->delimiter(',')
      ->required();
  secrm->add_option("--tol", *rm_tol, "crossing refinement tolerance")
      ->capture_default_str();
  secrm->add_option("--csv", *rm_csv,
                    "also write point,image,time rows to this CSV file");
  secrm->callback([sec_level, sec_which, rm_zs, rm_tol, rm_csv] {
    if (rm_zs->size() % 2 != 0 || rm_zs->empty()) {
      throw DomainError(errc::bad_input,
                        "--z expects re,im pairs (got an odd count)");
    }
    const reebdyn::StarShapedLevel level = sec_level->build();
    const reebdyn::DiskSection section =
        reebdyn::ellipsoid_section(level, *sec_which);
    ojson j;
    j["page"] = *sec_which;
    j["boundary_period"] = section.boundary.period;
    j["boundary_defect"] = section.boundary_defect;
    ojson samples = ojson::array();
    std::ostringstream csv;
    csv << "z_re,z_im,image_re,image_im,time\n";
    for (std::size_t i = 0; i + 1 < rm_zs->size(); i += 2) {
      const std::complex<double> z((*rm_zs)[i], (*rm_zs)[i + 1]);
      const reebdyn::ReturnResult rr =
          reebdyn::return_map(level, section, section.param(z), *rm_tol);
      const std::complex<double> w = section.chart(rr.point);
      ojson js;
      js["z"] = ojson::array({z.real(), z.imag()});
      js["image"] = ojson::array({w.real(), w.imag()});
      js["time"] = rr.time;
      js["point"] = reebdyn::io::vec4_to_json(rr.point);
      samples.push_back(js);
      csv << fmt17(z.real()) << "," << fmt17(z.imag()) << ","
          << fmt17(w.real()) << "," << fmt17(w.imag()) << "," << fmt17(rr.time)
          << "\n";
    }
    j["samples"] = samples;
    if (!rm_csv->empty()) {
      std::ofstream out(*rm_csv);
      if (!out) {
        throw DomainError(errc::bad_input,
                          "cannot open output file '" + *rm_csv + "'");
      }
      out << csv.str();
    }
    print_json(j);
  });

  auto* secfp = sec->add_subcommand(
      "fixed-point", "periodic orbit through the return-map fixed point");
  attach_section_opts(secfp);
  auto fp_emit = std::make_shared<bool>(false);
  secfp->add_flag("--emit-samples", *fp_emit,
                  "include orbit samples in the output");
  secfp->callback([sec_level, sec_which, fp_emit] {
    const reebdyn::StarShapedLevel level = sec_level->build();
    const reebdyn::DiskSection section =
        reebdyn::ellipsoid_section(level, *sec_which);
    const reebdyn::PeriodicOrbit orbit = reebdyn::fixed_point(level, section);
    ojson j = orbit_summary(level, orbit, *fp_emit, true);
    const std::complex<double> z = section.chart(orbit.samples.front());
    j["page"] = *sec_which;
    j["chart"] = ojson::array({z.real(), z.imag()});
    print_json(j);
  });

  auto* secau = sec->add_subcommand(
      "audit", "forward/backward crossing audit from random starts");
  attach_section_opts(secau);
  auto au_n = std::make_shared<int>(100);
  auto au_horizon = std::make_shared<double>(0.0);
  auto au_seed = std::make_shared<unsigned>(1234);
  auto au_entries = std::make_shared<bool>(false);
  secau->add_option("--n", *au_n, "number of random starts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  secau->add_option("--horizon", *au_horizon,
                    "flow-time horizon (default: 4*pi*max(r1^2, r2^2))");
  secau->add_option("--audit-seed", *au_seed, "random start seed")
      ->capture_default_str();
  secau->add_flag("--entries", *au_entries, "include per-start entries");
  secau->callback([sec_level, sec_which, au_n, au_horizon, au_seed,
                   au_entries] {
    const reebdyn::StarShapedLevel level = sec_level->build();
    const reebdyn::DiskSection section =
        reebdyn::ellipsoid_section(level, *sec_which);
    const double pi = 3.14159265358979323846;
    const double rmax = std::max(level.r1(), level.r2());
    const double horizon =
        *au_horizon > 0.0 ? *au_horizon : 4.0 * pi * rmax * rmax;
    ojson j = reebdyn::io::audit_to_json(
        reebdyn::global_section_audit(level, section, *au_n, horizon,
                                      *au_seed),
        *au_entries);
    j["page"] = *sec_which;
    j["horizon"] = horizon;
    print_json(j);
  });

  auto* secar = sec->add_subcommand(
      "area", "dlambda-area preservation defect of the return map");
  attach_section_opts(secar);
  auto ar_samples = std::make_shared<int>(9);
  secar->add_option("--samples", *ar_samples, "interior sample count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  secar->callback([sec_level, sec_which, ar_samples] {
    const reebdyn::StarShapedLevel level = sec_level->build();
    const reebdyn::DiskSection section =
        reebdyn::ellipsoid_section(level, *sec_which);
    ojson j;
    j["page"] = *sec_which;
    j["samples_checked"] = *ar_samples;
    j["area_defect"] =
        reebdyn::area_preservation_check(level, section, *ar_samples);
    print_json(j);
  });

  // --- crosscheck ---------------------------------------------------------------
  auto* cc = app.add_subcommand(
      "crosscheck",
      "geometric vs spectral index agreement over seeded random potentials");
  auto cc_n = std::make_shared<int>(50);
  auto cc_seed = std::make_shared<std::uint64_t>(1);
  auto cc_deg = std::make_shared<int>(0);
  auto cc_items = std::make_shared<bool>(false);
  cc->add_option("--n", *cc_n, "number of potentials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cc->add_option("--seed", *cc_seed, "base seed")->capture_default_str();
  cc->add_option("--degenerate", *cc_deg,
                 "number of engineered degenerate potentials mixed in")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cc->add_flag("--items", *cc_items, "include per-potential items");
  cc->callback([cc_n, cc_seed, cc_deg, cc_items, &jobs] {
    print_json(reebdyn::io::crosscheck_to_json(
        reebdyn::crosscheck_batch(*cc_n, *cc_seed, *cc_deg, jobs),
        *cc_items));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n"
              << app.help("", CLI::AppFormatMode::All) << std::flush;
    return 2;
  } catch (const DomainError& e) {
    ojson j;
    j["error"] = e.code();
    j["detail"] = e.what();
    print_json(j);
    return 1;
  } catch (const json::exception& e) {
    ojson j;
    j["error"] = errc::bad_input;
    j["detail"] = e.what();
    print_json(j);
    return 1;
  }
  return 0;
}
