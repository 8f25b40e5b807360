#pragma once

#include <cmath>
#include <numbers>

namespace riscf {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = std::numbers::pi;

/// x dBm -> W.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Normalized sinc, sin(pi y) / (pi y) with sinc(0) = 1.
inline double sinc(double y)
{
    if (std::abs(y) < 1e-12)
        return 1.0;
    const double arg = kPi * y;
    return std::sin(arg) / arg;
}

} // namespace riscf
