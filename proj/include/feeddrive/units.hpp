#pragma once

#include <numbers>

namespace feeddrive {

/// Catalog inertias are given in kg·cm²; all internal dynamics run in kg·m².
inline constexpr double kKgcm2ToKgm2 = 1e-4;

/// Table displacement per radian of screw rotation for a 10 mm lead screw.
inline constexpr double kDefaultDriveCoeffMmPerRad = 10.0 / (2.0 * std::numbers::pi);

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace feeddrive
