// units.hpp: Unit conventions shared by every module.
//
// Energies are carried in eV, times in fs, rates in 1/fs. Equations of motion
// are written with hbar = 1 internally; the conversion below is the only place
// where eV and fs meet.

#pragma once

namespace qtrack {

/// Reduced Planck constant in eV·fs.
inline constexpr double kHbar = 0.6582119569;

}  // namespace qtrack
