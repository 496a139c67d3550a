// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "torusqc/detail/fft.hpp"
#include "torusqc/dynamics.hpp"
#include "torusqc/hilbert.hpp"

namespace torusqc {

/// One-step unitary propagator of a quantized torus map, applied as a
/// split-step product: a position-diagonal phase, the forward DFT, a
/// momentum-diagonal phase, and the inverse DFT.
///
/// Per step, with n the position index and m the momentum index (both the
/// literal integers 0..N-1, no recentering):
///   Sawtooth:      exp(+i pi K n^2 / (N L))
///   Perturbed cat: exp(+i pi n^2 / (N L) + i (N mu / (2 pi L)) cos(2 pi n / N))
/// followed in the momentum basis by exp(-i pi L m^2 / N).
///
/// The momentum phase is only well defined on the periodic lattice
/// (m and m+N must give the same factor) when N*L is even, so construction
/// rejects odd N*L.  Phase tables are precomputed here and shared by all
/// propagate calls; the object is immutable afterwards.
class QuantumMapSpec {
public:
    QuantumMapSpec(ClassicalMapSpec classical, HilbertSpec hilbert)
        : classical_(classical), hilbert_(hilbert) {
        if (classical_.L != hilbert_.L)
            throw std::invalid_argument(
                "QuantumMapSpec: classical and Hilbert momentum periods differ");
        const long long NL =
            static_cast<long long>(hilbert_.N) * static_cast<long long>(hilbert_.L);
        if (NL % 2 != 0)
            throw std::invalid_argument(
                "QuantumMapSpec: momentum phase is not lattice-periodic "
                "unless N*L is even");
        build_phase_tables();
    }

    const ClassicalMapSpec& classical() const noexcept { return classical_; }
    const HilbertSpec& hilbert() const noexcept { return hilbert_; }

    const std::vector<std::complex<double>>& position_phase() const noexcept {
        return pos_phase_;
    }
    /// Momentum-basis factor with the DFT round-trip normalization 1/N
    /// folded in.
    const std::vector<std::complex<double>>& momentum_phase_over_n() const noexcept {
        return mom_phase_;
    }

private:
    void build_phase_tables() {
        const int N = hilbert_.N;
        const int L = hilbert_.L;
        const double NL = static_cast<double>(N) * static_cast<double>(L);
        const double pi = std::numbers::pi;

        pos_phase_.resize(static_cast<std::size_t>(N));
        for (int n = 0; n < N; ++n) {
            const double n2 = static_cast<double>(n) * static_cast<double>(n);
            double angle;
            if (classical_.kind == MapKind::Sawtooth) {
                // angle = pi K n^2/(N L); reduce the turn count before
                // multiplying by pi so large n^2 does not eat mantissa bits
                angle = pi * std::fmod(classical_.K * n2, 2.0 * NL) / NL;
            } else {
                angle = pi * std::fmod(n2, 2.0 * NL) / NL +
                        (static_cast<double>(N) * classical_.mu / (2.0 * pi * L)) *
                            std::cos(2.0 * pi * static_cast<double>(n) /
                                     static_cast<double>(N));
            }
            pos_phase_[static_cast<std::size_t>(n)] = std::polar(1.0, angle);
        }

        mom_phase_.resize(static_cast<std::size_t>(N));
        const double inv_n = 1.0 / static_cast<double>(N);
        for (int m = 0; m < N; ++m) {
            // L m^2 is an exact integer in double, so the fmod reduction
            // is exact and the angle carries no large-argument error
            const double lm2 = static_cast<double>(L) * static_cast<double>(m) *
                               static_cast<double>(m);
            const double angle =
                -pi * std::fmod(lm2, 2.0 * static_cast<double>(N)) /
                static_cast<double>(N);
            mom_phase_[static_cast<std::size_t>(m)] = std::polar(inv_n, angle);
        }
    }

    ClassicalMapSpec classical_;
    HilbertSpec hilbert_;
    std::vector<std::complex<double>> pos_phase_;
    std::vector<std::complex<double>> mom_phase_;
};

namespace detail_prop {

/// One split-step application, in place, on raw amplitudes.  The 1/N
/// round-trip factor of the unnormalized transforms lives in mom_phase.
inline void step_in_place(std::vector<std::complex<double>>& a,
                          const QuantumMapSpec& spec) {
    const auto& pos = spec.position_phase();
    const auto& mom = spec.momentum_phase_over_n();
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) a[i] *= pos[i];
    detail::fft_forward(a);
    for (std::size_t i = 0; i < n; ++i) a[i] *= mom[i];
    detail::fft_backward(a);
}

} // namespace detail_prop

/// Applies the one-step unitary `steps` times.  steps = 0 returns the
/// input unchanged; norm is preserved to well below 1e-12 per step.
inline QuantumState propagate(const QuantumState& state,
                              const QuantumMapSpec& spec, int steps) {
    if (state.spec() != spec.hilbert())
        throw std::invalid_argument(
            "propagate: state and map live in different spaces");
    if (steps < 0)
        throw std::invalid_argument("propagate: steps must be >= 0");
    if (steps == 0) return state;
    std::vector<std::complex<double>> a = state.amplitudes();
    for (int t = 0; t < steps; ++t) detail_prop::step_in_place(a, spec);
    return QuantumState(spec.hilbert(), std::move(a));
}

/// Dense N x N propagator matrix, row-major, built column by column from
/// basis vectors.  Intended as a test oracle; refuses N > 512.
inline std::vector<std::complex<double>> propagator_matrix(const QuantumMapSpec& spec) {
    const int N = spec.hilbert().N;
    if (N > 512)
        throw std::invalid_argument(
            "propagator_matrix: dense construction is capped at N = 512");
    std::vector<std::complex<double>> U(
        static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
    std::vector<std::complex<double>> col(static_cast<std::size_t>(N));
    for (int c = 0; c < N; ++c) {
        std::fill(col.begin(), col.end(), std::complex<double>{0.0, 0.0});
        col[static_cast<std::size_t>(c)] = {1.0, 0.0};
        detail_prop::step_in_place(col, spec);
        for (int r = 0; r < N; ++r)
            U[static_cast<std::size_t>(r) * static_cast<std::size_t>(N) +
              static_cast<std::size_t>(c)] = col[static_cast<std::size_t>(r)];
    }
    return U;
}

} // namespace torusqc
