#pragma once

#include <array>
#include <string_view>

// Names of the validation rules. Every numeric constraint on model and
// scenario data maps to exactly one of these; ValidationError::rule()
// carries the name.
namespace nlspec::rules {

inline constexpr std::string_view kDeltaPositive = "delta_positive";
inline constexpr std::string_view kUMinusPositive = "u_minus_positive";
inline constexpr std::string_view kUMinusBelowUPlus = "u_minus_below_u_plus";
inline constexpr std::string_view kUPlusBelowOne = "u_plus_below_one";
inline constexpr std::string_view kRhoTildePositive = "rho_tilde_positive";
inline constexpr std::string_view kKappaUnitInterval = "kappa_in_unit_interval";
inline constexpr std::string_view kEtaNonnegative = "eta_nonnegative";
inline constexpr std::string_view kOmegaNonnegative = "omega_nonnegative";
inline constexpr std::string_view kGammaNonnegative = "gamma_nonnegative";
inline constexpr std::string_view kTauNonnegative = "tau_nonnegative";
inline constexpr std::string_view kTauRowsNormalizable = "tau_rows_normalizable";
inline constexpr std::string_view kRho0Positive = "rho0_positive";
inline constexpr std::string_view kGuardRadius = "guard_radius_exceeds_initial_norm";

inline constexpr std::array<std::string_view, 13> kAll = {
    kDeltaPositive,      kUMinusPositive,   kUMinusBelowUPlus, kUPlusBelowOne,
    kRhoTildePositive,   kKappaUnitInterval, kEtaNonnegative,   kOmegaNonnegative,
    kGammaNonnegative,   kTauNonnegative,   kTauRowsNormalizable, kRho0Positive,
    kGuardRadius,
};

}  // namespace nlspec::rules
