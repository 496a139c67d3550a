// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "torusqc/detail/fft.hpp"

namespace torusqc {

/// Finite-dimensional Hilbert space of a quantized torus [0,1) x [0,L).
///
/// The dimension N fixes the lattice: position eigenvalues q_n = n/N and
/// momentum eigenvalues p_m = m*L/N, n, m in {0, ..., N-1}.  Periodicity of
/// the free propagation in the momentum direction requires N*L even, i.e.
/// an odd dimension is only admissible over an even momentum period.
struct HilbertSpec {
    int N = 1; ///< Hilbert-space dimension
    int L = 1; ///< momentum period (positive integer)

    HilbertSpec(int N_, int L_) : N(N_), L(L_) {
        if (N < 1) throw std::invalid_argument("HilbertSpec: N must be >= 1");
        if (L < 1) throw std::invalid_argument("HilbertSpec: L must be >= 1");
        if (N % 2 == 1 && L % 2 == 1)
            throw std::invalid_argument(
                "HilbertSpec: odd N requires even L (N*L must be even)");
    }

    friend bool operator==(const HilbertSpec& a, const HilbertSpec& b) {
        return a.N == b.N && a.L == b.L;
    }
    friend bool operator!=(const HilbertSpec& a, const HilbertSpec& b) {
        return !(a == b);
    }
};

/// A pure state in the position representation, kept at unit norm.
class QuantumState {
public:
    /// Wraps amplitudes that are already normalized; throws if the vector
    /// length does not match spec.N or the norm deviates from 1 by more
    /// than 1e-12.
    QuantumState(HilbertSpec spec, std::vector<std::complex<double>> amplitudes)
        : spec_(spec), amp_(std::move(amplitudes)) {
        if (amp_.size() != static_cast<std::size_t>(spec_.N))
            throw std::invalid_argument(
                "QuantumState: amplitude count must equal spec.N");
        double s = 0.0;
        for (const auto& a : amp_) s += std::norm(a);
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument(
                "QuantumState: amplitudes must have unit norm");
    }

    /// Rescales arbitrary amplitudes to unit norm; throws on an (almost)
    /// zero vector.
    static QuantumState normalized(HilbertSpec spec,
                                   std::vector<std::complex<double>> amplitudes) {
        if (amplitudes.size() != static_cast<std::size_t>(spec.N))
            throw std::invalid_argument(
                "QuantumState: amplitude count must equal spec.N");
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        if (!(s > 1e-300))
            throw std::invalid_argument("QuantumState: cannot normalize zero vector");
        const double inv = 1.0 / std::sqrt(s);
        for (auto& a : amplitudes) a *= inv;
        return QuantumState(spec, std::move(amplitudes), unchecked_tag{});
    }

    const HilbertSpec& spec() const noexcept { return spec_; }
    int dim() const noexcept { return spec_.N; }
    const std::vector<std::complex<double>>& amplitudes() const noexcept {
        return amp_;
    }
    std::complex<double> operator[](int n) const { return amp_[static_cast<std::size_t>(n)]; }

private:
    struct unchecked_tag {};
    QuantumState(HilbertSpec spec, std::vector<std::complex<double>> amplitudes,
                 unchecked_tag)
        : spec_(spec), amp_(std::move(amplitudes)) {}

    HilbertSpec spec_;
    std::vector<std::complex<double>> amp_;
};

enum class FourierDirection { Forward, Inverse };

/// Unitary discrete Fourier transform between the position and momentum
/// representations: Forward maps (psi_n) to
///     (F psi)_m = (1/sqrt(N)) * sum_n psi_n * e^{-i 2 pi m n / N},
/// and Inverse is its adjoint.
inline QuantumState dft(const QuantumState& state, FourierDirection direction) {
    std::vector<std::complex<double>> a = state.amplitudes();
    if (direction == FourierDirection::Forward)
        detail::fft_forward(a);
    else
        detail::fft_backward(a);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(state.dim()));
    for (auto& v : a) v *= inv_sqrt_n;
    return QuantumState(state.spec(), std::move(a));
}

/// Center and squeezing of a torus coherent state.
///
/// p0 enters the amplitude formula verbatim as the plane-wave slope, so it
/// is expressed in units where one full momentum cell spans [0,1): a state
/// centered on the momentum lattice point p_m = m*L/N takes p0 = m/N.
struct CoherentParams {
    double q0 = 0.0;    ///< position center in [0,1)
    double p0 = 0.0;    ///< momentum center (see note above)
    double sigma = 1.0; ///< squeezing; 1 is the symmetric wave packet

    CoherentParams(double q0_, double p0_, double sigma_)
        : q0(q0_), p0(p0_), sigma(sigma_) {
        if (!(sigma > 0.0))
            throw std::invalid_argument("CoherentParams: sigma must be > 0");
    }
};

/// Gaussian wave packet projected onto the torus: the plane Gaussian of
/// width set by sigma and the lattice constant, summed over its periodic
/// images,
///   psi_n ~ sum_nu exp(-(pi sigma/N)(n - q0 N + nu N)^2)
///                 * e^{i 2 pi n p0} * e^{i 2 pi N p0 nu},
/// then normalized numerically.  The image sum keeps every nu whose
/// Gaussian exponent is <= 45 (terms below ~3e-20, invisible in double
/// precision).
inline QuantumState coherent_state(const CoherentParams& params,
                                   const HilbertSpec& spec) {
    const int N = spec.N;
    const double Nd = static_cast<double>(N);
    const double alpha = std::numbers::pi * params.sigma / Nd;
    // |n - q0*N + nu*N| <= reach  <=>  exponent <= 45
    const double reach = std::sqrt(45.0 / alpha);
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<std::complex<double>> a(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        const double base = params.q0 * Nd - static_cast<double>(n);
        const long nu_lo = static_cast<long>(std::ceil((base - reach) / Nd));
        const long nu_hi = static_cast<long>(std::floor((base + reach) / Nd));
        std::complex<double> acc{0.0, 0.0};
        for (long nu = nu_lo; nu <= nu_hi; ++nu) {
            const double d = static_cast<double>(n) - params.q0 * Nd +
                             static_cast<double>(nu) * Nd;
            const double mag = std::exp(-alpha * d * d);
            // combined phase e^{i 2 pi p0 (n + nu N)}
            const double phase =
                two_pi * params.p0 *
                (static_cast<double>(n) + static_cast<double>(nu) * Nd);
            acc += mag * std::polar(1.0, phase);
        }
        a[static_cast<std::size_t>(n)] = acc;
    }
    return QuantumState::normalized(spec, std::move(a));
}

/// Inner product <a|b> = sum_j conj(a_j) * b_j.
inline std::complex<double> overlap(const QuantumState& a, const QuantumState& b) {
    if (a.spec() != b.spec())
        throw std::invalid_argument("overlap: states live in different spaces");
    std::complex<double> s{0.0, 0.0};
    for (int j = 0; j < a.dim(); ++j) s += std::conj(a[j]) * b[j];
    return s;
}

} // namespace torusqc
