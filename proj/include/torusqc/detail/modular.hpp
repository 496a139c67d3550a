// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>

namespace torusqc::detail {

/// Reduce x into the fundamental domain [0, period).
///
/// Uses the floor-based remainder so the result is correct for negative x.
/// A value that lands exactly on `period` through rounding is wrapped to 0,
/// keeping the half-open interval contract airtight.
inline double wrap(double x, double period) noexcept {
    double y = x - period * std::floor(x / period);
    if (y >= period) y -= period;
    if (y < 0.0) y += period;
    return y;
}

/// Reduce x into [0, 1).
inline double wrap_unit(double x) noexcept { return wrap(x, 1.0); }

/// Euclidean remainder of i mod n, always in [0, n).
inline long mod_index(long i, long n) noexcept {
    long r = i % n;
    return r < 0 ? r + n : r;
}

} // namespace torusqc::detail
