#pragma once

namespace rdsv {

// Tolerance used when deciding whether two time points (seconds) coincide.
inline constexpr double kTimeEps = 1e-9;

}  // namespace rdsv
