#pragma once

#include <json.hpp>
#include <string>

#include "reebdyn/crosscheck.hpp"
#include "reebdyn/cz_geometric.hpp"
#include "reebdyn/cz_spectral.hpp"
#include "reebdyn/link_knot.hpp"
#include "reebdyn/reeb_flow.hpp"
#include "reebdyn/sections.hpp"
#include "reebdyn/sp_path.hpp"
#include "reebdyn/strip.hpp"

namespace reebdyn::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

/// Deterministic single-line dump with doubles at 17 significant digits and
/// integers kept as integers (golden-file friendly).
std::string dump17(const ojson& j);

/// {"builder": "rotation"|"shear"|"hyperbolic"|"potential"|"samples",
///  "params": {...}}. Parameters per builder: rotation: alpha (turns);
/// shear: a; hyperbolic: c; potential: seed, optional degenerate (bool),
/// optional steps; samples: matrices = array of 2×2 row-major arrays.
SymplecticPath path_from_json(const json& spec);

/// The potential behind a path spec: direct for builder "potential",
/// recovered via potential_from_path otherwise.
SymmetricPotential potential_from_json(const json& spec);

/// {"kind": "ellipsoid"|"perturbed_ellipsoid", "r1": ..., "r2": ...,
///  "coeffs": [...], "eps": ...} (the last two for perturbed levels only).
StarShapedLevel level_from_json(const json& spec);

/// Either {"samples": [[x,y,z,w], ...]} or a serialized orbit
/// ({"period", "residual", "minimal", "samples"}); orbit input goes through
/// the orbit-to-curve validation path.
ClosedCurve curve_from_json(const json& spec);

Mat2 mat2_from_json(const json& spec);

ojson vec4_to_json(const Vec4& v);
ojson mat2_to_json(const Mat2& m);
ojson interval_to_json(const WindingInterval& iv);
ojson cz_to_json(const CzResult& r);
ojson spectral_detail_to_json(const CzSpectralDetail& d);
ojson spectrum_to_json(const SpectrumSlice& s);
ojson orbit_to_json(const PeriodicOrbit& orbit, bool with_samples);
ojson scan_to_json(const ScanReport& rep, bool with_samples);
ojson linking_to_json(const LinkingResult& r);
ojson self_linking_to_json(const SelfLinkingResult& r);
ojson end_class_to_json(const EndMatrixClass& cls);
ojson determinant_check_to_json(const DeterminantCheck& c);
ojson audit_to_json(const AuditReport& rep, bool with_entries);
ojson crosscheck_to_json(const CrosscheckReport& rep, bool with_items);

}  // namespace reebdyn::io
