#pragma once

// Single source of truth for physical constants and unit conversions.
// Internal unit system: energies/frequencies in eV (hbar = 1), lengths in nm.
// SI appears only at module boundaries (pressures in Pa, forces in N,
// electrostatics in volts/meters).

namespace casimir::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double hbar_c_eV_nm = 197.3269804;       // hbar*c
inline constexpr double k_B_eV_per_K = 8.617333262e-5;    // Boltzmann constant
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double epsilon0_F_per_m = 8.8541878128e-12;

// Riemann zeta(3), used by the classical-limit closed forms.
inline constexpr double zeta3 = 1.2020569031595943;

// 1 eV/nm^3 in pascals, 1 eV/nm^2 in J/m^2, 1 eV/nm in newtons.
inline constexpr double eV_per_nm3_in_Pa = 1.602176634e8;
inline constexpr double eV_per_nm2_in_J_per_m2 = 0.1602176634;
inline constexpr double eV_per_nm_in_N = 1.602176634e-10;

// Stamped into output files so results can be traced to a constants table.
inline constexpr const char* table_version = "1";

}  // namespace casimir::constants
