#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace reebdyn {

/// Error thrown by library operations when an input leaves the supported
/// domain or a numerical guard fires. `code()` is a stable machine-readable
/// identifier (surfaced verbatim by the CLI), `what()` carries detail.
class DomainError : public std::runtime_error {
public:
  DomainError(std::string code, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

namespace errc {
// sp-path
inline constexpr const char* non_symplectic_path = "non_symplectic_path";
inline constexpr const char* lift_resolution_failure = "lift_resolution_failure";
inline constexpr const char* not_a_loop = "not_a_loop";
inline constexpr const char* inconsistent_winding = "inconsistent_winding";
inline constexpr const char* degenerate_section = "degenerate_section";
inline constexpr const char* grid_mismatch = "grid_mismatch";
// cz-geometric
inline constexpr const char* interval_too_long = "interval_too_long";
inline constexpr const char* degeneracy_mismatch = "degeneracy_mismatch";
// cz-spectral
inline constexpr const char* integration_divergence = "integration_divergence";
inline constexpr const char* non_periodic_potential = "non_periodic_potential";
inline constexpr const char* truncation_not_converged = "truncation_not_converged";
inline constexpr const char* winding_ambiguous = "winding_ambiguous";
inline constexpr const char* zero_eigenvalue_ambiguity = "zero_eigenvalue_ambiguity";
// reeb-flow
inline constexpr const char* singular_system = "singular_system";
inline constexpr const char* step_size_underflow = "step_size_underflow";
inline constexpr const char* frame_degenerate = "frame_degenerate";
inline constexpr const char* no_convergence = "no_convergence";
// link-knot
inline constexpr const char* pole_too_close = "pole_too_close";
inline constexpr const char* residual_too_large = "residual_too_large";
inline constexpr const char* curves_too_close = "curves_too_close";
inline constexpr const char* not_disjoint = "not_disjoint";
inline constexpr const char* not_transverse = "not_transverse";
inline constexpr const char* unstable_eps = "unstable_eps";
// transverse-strip
inline constexpr const char* boundary_case = "boundary_case";
inline constexpr const char* reconstruction_failure = "reconstruction_failure";
inline constexpr const char* inequality_violated = "inequality_violated";
inline constexpr const char* sign_change = "sign_change";
// sections
inline constexpr const char* no_return_within_horizon = "no_return_within_horizon";
inline constexpr const char* no_fixed_point_found = "no_fixed_point_found";
// cli / input parsing
inline constexpr const char* bad_input = "bad_input";
}  // namespace errc

}  // namespace reebdyn
