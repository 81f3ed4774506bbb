#pragma once

namespace ladderlab {

inline constexpr double kPi = 3.14159265358979323846264338328;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Euler's constant.
inline constexpr double kEulerGamma = 0.577215664901532860606512090082;

inline constexpr long double kPiL = 3.14159265358979323846264338328L;
inline constexpr long double kTwoPiL = 2.0L * kPiL;

}  // namespace ladderlab
