#include "reebdyn/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "reebdyn/errors.hpp"

namespace reebdyn::io {

namespace {

void emit(const ojson& j, std::string& out) {
  switch (j.type()) {
    case ojson::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ojson(it.key()).dump();
        out += ':';
        emit(it.value(), out);
      }
      out += '}';
      break;
    }
    case ojson::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ',';
        first = false;
        emit(el, out);
      }
      out += ']';
      break;
    }
    case ojson::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      // keep the token a float so round trips preserve the type
      if (out.find_first_of(".eE", out.size() - std::strlen(buf)) ==
          std::string::npos) {
        out += ".0";
      }
      break;
    }
    case ojson::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case ojson::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case ojson::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case ojson::value_t::string:
      out += j.dump();
      break;
    default:
      out += "null";
      break;
  }
}

const json& need(const json& spec, const char* key) {
  const auto it = spec.find(key);
  if (it == spec.end()) {
    throw DomainError(errc::bad_input,
                      std::string("missing required field '") + key + "'");
  }
  return *it;
}

double need_number(const json& spec, const char* key) {
  const json& v = need(spec, key);
  if (!v.is_number()) {
    throw DomainError(errc::bad_input,
                      std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

}  // namespace

std::string dump17(const ojson& j) {
  std::string out;
  emit(j, out);
  return out;
}

SymplecticPath path_from_json(const json& spec) {
  if (!spec.is_object()) {
    throw DomainError(errc::bad_input, "path spec must be a JSON object");
  }
  const std::string builder = need(spec, "builder").get<std::string>();
  const json params = spec.value("params", json::object());
  if (builder == "rotation") {
    return SymplecticPath::rotation(need_number(params, "alpha"));
  }
  if (builder == "shear") {
    return SymplecticPath::shear(need_number(params, "a"));
  }
  if (builder == "hyperbolic") {
    return SymplecticPath::hyperbolic(need_number(params, "c"));
  }
  if (builder == "potential") {
    const int steps = params.value("steps", 4096);
    return path_from_potential(potential_from_json(spec), steps);
  }
  if (builder == "samples") {
    const json& mats = need(params, "matrices");
    if (!mats.is_array()) {
      throw DomainError(errc::bad_input, "'matrices' must be an array");
    }
    std::vector<Mat2> samples;
    samples.reserve(mats.size());
    for (const json& m : mats) samples.push_back(mat2_from_json(m));
    return SymplecticPath::from_samples(std::move(samples));
  }
  throw DomainError(errc::bad_input, "unknown path builder '" + builder + "'");
}

SymmetricPotential potential_from_json(const json& spec) {
  if (!spec.is_object()) {
    throw DomainError(errc::bad_input, "path spec must be a JSON object");
  }
  const std::string builder = need(spec, "builder").get<std::string>();
  const json params = spec.value("params", json::object());
  if (builder == "potential") {
    const auto seed = static_cast<std::uint64_t>(need_number(params, "seed"));
    if (params.value("degenerate", false)) {
      return engineered_degenerate_potential(seed);
    }
    return random_potential(seed, params.value("degree", 4),
                            params.value("max_entry", 6.0));
  }
  return potential_from_path(path_from_json(spec));
}

StarShapedLevel level_from_json(const json& spec) {
  if (!spec.is_object()) {
    throw DomainError(errc::bad_input, "level spec must be a JSON object");
  }
  const std::string kind = need(spec, "kind").get<std::string>();
  const double r1 = need_number(spec, "r1");
  const double r2 = need_number(spec, "r2");
  if (kind == "ellipsoid") {
    return StarShapedLevel::ellipsoid(r1, r2);
  }
  if (kind == "perturbed_ellipsoid") {
    const json& coeffs = need(spec, "coeffs");
    if (!coeffs.is_array()) {
      throw DomainError(errc::bad_input, "'coeffs' must be an array");
    }
    std::vector<double> c;
    for (const json& v : coeffs) c.push_back(v.get<double>());
    return StarShapedLevel::perturbed_ellipsoid(r1, r2, std::move(c),
                                                spec.value("eps", 1.0));
  }
  throw DomainError(errc::bad_input, "unknown level kind '" + kind + "'");
}

ClosedCurve curve_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("samples")) {
    throw DomainError(errc::bad_input,
                      "curve spec needs a 'samples' array of 4-vectors");
  }
  const json& samples = spec["samples"];
  if (!samples.is_array()) {
    throw DomainError(errc::bad_input, "'samples' must be an array");
  }
  std::vector<Vec4> pts;
  pts.reserve(samples.size());
  for (const json& s : samples) {
    if (!s.is_array() || s.size() != 4) {
      throw DomainError(errc::bad_input, "curve samples must be 4-vectors");
    }
    pts.emplace_back(s[0].get<double>(), s[1].get<double>(),
                     s[2].get<double>(), s[3].get<double>());
  }
  if (spec.contains("period")) {
    PeriodicOrbit orbit;
    orbit.samples = std::move(pts);
    orbit.period = spec["period"].get<double>();
    orbit.minimal = spec.value("minimal", true);
    orbit.residual = spec.value("residual", 0.0);
    return ClosedCurve::from_orbit(orbit);
  }
  return ClosedCurve(std::move(pts));
}

Mat2 mat2_from_json(const json& spec) {
  if (!spec.is_array() || spec.size() != 2 || !spec[0].is_array() ||
      spec[0].size() != 2 || !spec[1].is_array() || spec[1].size() != 2) {
    throw DomainError(errc::bad_input,
                      "matrix must be a 2x2 row-major JSON array");
  }
  Mat2 m;
  m << spec[0][0].get<double>(), spec[0][1].get<double>(),
      spec[1][0].get<double>(), spec[1][1].get<double>();
  return m;
}

ojson vec4_to_json(const Vec4& v) {
  return ojson::array({v[0], v[1], v[2], v[3]});
}

ojson mat2_to_json(const Mat2& m) {
  return ojson::array({ojson::array({m(0, 0), m(0, 1)}),
                       ojson::array({m(1, 0), m(1, 1)})});
}

ojson interval_to_json(const WindingInterval& iv) {
  return ojson::array({iv.lo, iv.hi});
}

ojson cz_to_json(const CzResult& r) {
  ojson j;
  j["index"] = r.index;
  j["interval"] = interval_to_json(r.interval);
  j["degenerate"] = r.degenerate;
  j["endpoint_gap"] = r.endpoint_gap;
  return j;
}

ojson spectral_detail_to_json(const CzSpectralDetail& d) {
  ojson j;
  j["index"] = d.index;
  j["lambda_minus"] = d.lambda_minus;
  j["lambda_plus"] = d.lambda_plus;
  j["wind_minus"] = d.wind_minus;
  j["wind_plus"] = d.wind_plus;
  return j;
}

ojson spectrum_to_json(const SpectrumSlice& s) {
  ojson j;
  j["truncation"] = s.truncation;
  j["window"] = ojson::array({s.window_lo, s.window_hi});
  ojson lines = ojson::array();
  for (const SpectralLine& l : s.lines) {
    ojson line;
    line["value"] = l.value;
    line["winding"] = l.winding;
    line["multiplicity"] = l.multiplicity;
    lines.push_back(line);
  }
  j["lines"] = lines;
  return j;
}

ojson orbit_to_json(const PeriodicOrbit& orbit, bool with_samples) {
  ojson j;
  j["period"] = orbit.period;
  j["minimal"] = orbit.minimal;
  j["residual"] = orbit.residual;
  if (with_samples) {
    ojson samples = ojson::array();
    for (const Vec4& s : orbit.samples) samples.push_back(vec4_to_json(s));
    j["samples"] = samples;
  }
  return j;
}

ojson scan_to_json(const ScanReport& rep, bool with_samples) {
  ojson j;
  j["action_cutoff"] = rep.action_cutoff;
  if (rep.min_index.has_value()) {
    j["min_index"] = *rep.min_index;
  } else {
    j["min_index"] = nullptr;
  }
  j["dynamically_convex_up_to_cutoff"] = rep.dynamically_convex_up_to_cutoff;
  ojson orbits = ojson::array();
  for (const ScanOrbit& o : rep.orbits) {
    ojson jo;
    jo["period"] = o.orbit.period;
    jo["multiplicity"] = o.multiplicity;
    jo["minimal_period"] = o.minimal_period;
    jo["index"] = o.index;
    jo["interval"] = interval_to_json(o.interval);
    jo["residual"] = o.orbit.residual;
    if (with_samples) {
      ojson samples = ojson::array();
      for (const Vec4& s : o.orbit.samples) samples.push_back(vec4_to_json(s));
      jo["samples"] = samples;
    }
    orbits.push_back(jo);
  }
  j["orbits"] = orbits;
  ojson seeds = ojson::array();
  for (const Vec4& s : rep.unconverged_seeds) seeds.push_back(vec4_to_json(s));
  j["unconverged_seeds"] = seeds;
  return j;
}

ojson linking_to_json(const LinkingResult& r) {
  ojson j;
  j["value"] = r.value;
  j["linking"] = static_cast<int>(std::lround(r.value));
  j["residual"] = r.residual;
  j["samples_used"] = r.samples_used;
  j["pole"] = vec4_to_json(r.pole);
  return j;
}

ojson self_linking_to_json(const SelfLinkingResult& r) {
  ojson j;
  j["self_linking"] = r.value;
  j["eps_used"] = r.eps_used;
  j["residual"] = r.residual;
  return j;
}

ojson end_class_to_json(const EndMatrixClass& cls) {
  ojson j;
  switch (cls.tag) {
    case EndMatrixClass::Tag::a:
      j["case"] = "a";
      break;
    case EndMatrixClass::Tag::b:
      j["case"] = "b";
      break;
    case EndMatrixClass::Tag::c:
      j["case"] = "c";
      break;
    case EndMatrixClass::Tag::d:
      j["case"] = "d";
      break;
  }
  j["param"] = cls.param;
  j["Y"] = mat2_to_json(cls.Y);
  j["T"] = mat2_to_json(cls.T_conj);
  return j;
}

ojson determinant_check_to_json(const DeterminantCheck& c) {
  ojson j;
  j["min_abs_drd"] = c.min_abs;
  j["sign"] = c.sign;
  return j;
}

ojson audit_to_json(const AuditReport& rep, bool with_entries) {
  ojson j;
  j["total"] = rep.total;
  j["forward_crossings"] = rep.forward_crossings;
  j["backward_crossings"] = rep.backward_crossings;
  if (with_entries) {
    ojson entries = ojson::array();
    for (const AuditEntry& e : rep.entries) {
      ojson je;
      je["start"] = vec4_to_json(e.start);
      je["forward_crossed"] = e.forward_crossed;
      je["forward_time"] = e.forward_time;
      je["backward_crossed"] = e.backward_crossed;
      je["backward_time"] = e.backward_time;
      entries.push_back(je);
    }
    j["entries"] = entries;
  }
  return j;
}

ojson crosscheck_to_json(const CrosscheckReport& rep, bool with_items) {
  ojson j;
  j["agree"] = rep.agree;
  j["disagree"] = rep.disagree;
  j["degenerate_count"] = rep.degenerate_count;
  if (with_items) {
    ojson items = ojson::array();
    for (const CrosscheckItem& it : rep.items) {
      ojson ji;
      ji["seed"] = it.seed;
      ji["engineered_degenerate"] = it.engineered_degenerate;
      ji["geometric"] = it.geometric;
      ji["spectral"] = it.spectral;
      ji["degenerate"] = it.degenerate;
      ji["agree"] = it.agree;
      items.push_back(ji);
    }
    j["items"] = items;
  }
  return j;
}

}  // namespace reebdyn::io
