#pragma once

#include <cmath>

namespace cropspray {

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double angle_rad) {
    double w = std::remainder(angle_rad, 2.0 * kPi);
    if (w <= -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

/// Shortest signed arc from `from` to `to`, in (-pi, pi].
inline double angle_diff(double to_rad, double from_rad) {
    return wrap_pi(to_rad - from_rad);
}

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

}  // namespace cropspray
