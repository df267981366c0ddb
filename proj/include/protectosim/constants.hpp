#pragma once

#include <numbers>

namespace protectosim {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// SI values. k_B is exact by definition since the 2019 redefinition.
inline constexpr double k_boltzmann = 1.380649e-23; // J/K
inline constexpr double hbar = 1.054571817e-34;     // J s

} // namespace protectosim
