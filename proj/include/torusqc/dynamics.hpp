// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "torusqc/detail/modular.hpp"
#include "torusqc/detail/parallel.hpp"
#include "torusqc/detail/rng.hpp"

namespace torusqc {

/// A phase-space point on the torus [0,1) x [0,L).
struct TorusPoint {
    double q = 0.0; ///< position, in [0,1)
    double p = 0.0; ///< momentum, in [0,L)
};

enum class MapKind { Sawtooth, PerturbedCat };

/// Parameters of a classical symplectic torus map.
///
/// Sawtooth:       p' = p + K*q          (mod L),  q' = q + p'  (mod 1)
/// Perturbed cat:  p' = q + p + f(q)     (mod L),  q' = q + p'  (mod 1)
/// with the smooth kick f(q) = -(mu/2*pi) * sin(2*pi*q), whose quantum
/// counterpart is the cos(2*pi*n/N) position phase used by the propagator.
/// At mu = 0 the perturbed cat reduces to the linear hyperbolic cat map
/// (q,p) -> (2q+p, q+p).
struct ClassicalMapSpec {
    MapKind kind = MapKind::Sawtooth;
    double K = 0.0;  ///< Sawtooth kick strength
    double mu = 0.0; ///< perturbed-cat kick strength
    int L = 1;       ///< momentum period (positive integer)

    static ClassicalMapSpec sawtooth(double K, int L) {
        if (L < 1) throw std::invalid_argument("ClassicalMapSpec: L must be >= 1");
        ClassicalMapSpec s;
        s.kind = MapKind::Sawtooth;
        s.K = K;
        s.L = L;
        return s;
    }

    static ClassicalMapSpec perturbed_cat(double mu, int L) {
        if (L < 1) throw std::invalid_argument("ClassicalMapSpec: L must be >= 1");
        ClassicalMapSpec s;
        s.kind = MapKind::PerturbedCat;
        s.mu = mu;
        s.L = L;
        return s;
    }
};

/// 2x2 real matrix [[a, b], [c, d]] acting on tangent vectors (dq, dp).
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    double det() const noexcept { return a * d - b * c; }
};

namespace detail_dyn {

/// Smooth kick of the perturbed cat map, f(q) = -(mu/2*pi) sin(2*pi*q).
inline double cat_kick(double mu, double q) noexcept {
    return -(mu / (2.0 * std::numbers::pi)) * std::sin(2.0 * std::numbers::pi * q);
}

/// df/dq = -mu * cos(2*pi*q).
inline double cat_kick_prime(double mu, double q) noexcept {
    return -mu * std::cos(2.0 * std::numbers::pi * q);
}

} // namespace detail_dyn

/// One forward step of the map; the result is reduced to [0,1) x [0,L).
inline TorusPoint map_forward(TorusPoint x, const ClassicalMapSpec& spec) {
    const double Ld = static_cast<double>(spec.L);
    double p_next, q_next;
    if (spec.kind == MapKind::Sawtooth) {
        p_next = detail::wrap(x.p + spec.K * x.q, Ld);
    } else {
        p_next = detail::wrap(x.q + x.p + detail_dyn::cat_kick(spec.mu, x.q), Ld);
    }
    q_next = detail::wrap_unit(x.q + p_next);
    return {q_next, p_next};
}

/// One inverse step; map_forward(map_inverse(x)) == x up to modular
/// reduction and floating-point roundoff.
inline TorusPoint map_inverse(TorusPoint x, const ClassicalMapSpec& spec) {
    const double Ld = static_cast<double>(spec.L);
    const double q_prev = detail::wrap_unit(x.q - x.p);
    double p_prev;
    if (spec.kind == MapKind::Sawtooth) {
        p_prev = detail::wrap(x.p - spec.K * q_prev, Ld);
    } else {
        p_prev = detail::wrap(x.p - q_prev - detail_dyn::cat_kick(spec.mu, q_prev), Ld);
    }
    return {q_prev, p_prev};
}

/// Jacobian of map_forward at x, in (dq, dp) ordering.
///
/// Both maps share the structure [[1+c, 1], [c, 1]] with det = 1:
/// c = K for the Sawtooth (constant), c = 1 - mu*cos(2*pi*q) for the
/// perturbed cat.
inline Mat2 tangent_matrix(TorusPoint x, const ClassicalMapSpec& spec) {
    double c;
    if (spec.kind == MapKind::Sawtooth) {
        c = spec.K;
    } else {
        c = 1.0 + detail_dyn::cat_kick_prime(spec.mu, x.q);
    }
    return {1.0 + c, 1.0, c, 1.0};
}

/// Closed-form maximal Lyapunov exponent of the Sawtooth map,
/// lambda = log[(K + 2 + sqrt(K*(K+4))) / 2].  Valid for K > 0.
inline double lyapunov_sawtooth_exact(double K) {
    if (!(K > 0.0))
        throw std::domain_error("lyapunov_sawtooth_exact: requires K > 0");
    return std::log((K + 2.0 + std::sqrt(K * (K + 4.0))) / 2.0);
}

/// Monte-Carlo Lyapunov estimate: ensemble mean and standard error.
struct LyapunovEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Maximal Lyapunov exponent from tangent-vector growth along random
/// trajectories.
///
/// Each trajectory draws its start point and tangent direction from a
/// substream keyed by (seed, trajectory index), runs a short warm-up so the
/// tangent vector aligns with the unstable direction before accumulation
/// starts, then accumulates log growth factors with per-step renormalization
/// (per-step growth can reach e^lambda ~ 2.7, so longer renorm blocks would
/// overflow at traj_len = 1e6).  Trajectories are independent, so they run
/// concurrently; results are folded in index order for reproducibility.
inline LyapunovEstimate lyapunov_numerical(const ClassicalMapSpec& spec,
                                           int n_traj, long traj_len,
                                           std::uint64_t seed) {
    if (n_traj < 1)
        throw std::invalid_argument("lyapunov_numerical: n_traj must be >= 1");
    if (traj_len < 1000)
        throw std::invalid_argument("lyapunov_numerical: traj_len must be >= 1000");

    std::vector<double> lambda(static_cast<std::size_t>(n_traj), 0.0);

    detail::parallel_for(static_cast<std::size_t>(n_traj),
        [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                auto gen = detail::substream(seed, i);
                TorusPoint x{detail::uniform01(gen),
                             detail::uniform01(gen) * spec.L};
                const double theta =
                    2.0 * std::numbers::pi * detail::uniform01(gen);
                double vq = std::cos(theta), vp = std::sin(theta);

                const long warmup = 100;
                double acc = 0.0;
                for (long t = -warmup; t < traj_len; ++t) {
                    const Mat2 M = tangent_matrix(x, spec);
                    const double wq = M.a * vq + M.b * vp;
                    const double wp = M.c * vq + M.d * vp;
                    const double growth = std::hypot(wq, wp);
                    vq = wq / growth;
                    vp = wp / growth;
                    x = map_forward(x, spec);
                    if (t >= 0) acc += std::log(growth);
                }
                lambda[i] = acc / static_cast<double>(traj_len);
            }
        });

    double mean = 0.0;
    for (double v : lambda) mean += v;
    mean /= static_cast<double>(n_traj);

    double var = 0.0;
    for (double v : lambda) var += (v - mean) * (v - mean);
    double std_error = 0.0;
    if (n_traj > 1) {
        var /= static_cast<double>(n_traj - 1);
        std_error = std::sqrt(var / static_cast<double>(n_traj));
    }
    return {mean, std_error};
}

} // namespace torusqc
