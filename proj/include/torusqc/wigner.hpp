// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "torusqc/detail/fft.hpp"
#include "torusqc/detail/modular.hpp"
#include "torusqc/detail/parallel.hpp"
#include "torusqc/hilbert.hpp"

namespace torusqc {

enum class Formalism { ContinuousAB, DiscreteMiquel };

namespace detail_wig {

/// Periodic sinc kernel of the continuous formalism,
///   delta~(k) = (1/N) sin(pi k/2) / sin(pi k/(2N)),
/// with the removable singularity delta~(k) = 1 at k == 0 (mod 2N).  For
/// any other even k the numerator vanishes exactly.  The kernel has period
/// 2N (for odd N), not N, which is why callers must pass the true integer
/// argument rather than a mod-N reduction.
inline double delta_tilde(long k, int N) {
    const long period = 2L * static_cast<long>(N);
    long r = k % period;
    if (r < 0) r += period;
    if (r == 0) return 1.0;
    if (r % 2 == 0) return 0.0;
    const double sign = (r % 4 == 1) ? 1.0 : -1.0;
    const double denom =
        static_cast<double>(N) *
        std::sin(std::numbers::pi * static_cast<double>(r) /
                 static_cast<double>(period));
    return sign / denom;
}

} // namespace detail_wig

/// A real Wigner function sampled on its natural lattice: N x N for the
/// continuous (Agam–Brenner) formalism, 2N x 2N for the discrete (Miquel)
/// one.  The first index is position-like: summing over it yields the
/// momentum marginal.  Values are stored row-major and sum to 1 over the
/// lattice; both properties are validated at construction.
class WignerGrid {
public:
    WignerGrid(Formalism formalism, HilbertSpec spec, std::vector<double> values)
        : formalism_(formalism), spec_(spec), values_(std::move(values)) {
        if (formalism_ == Formalism::ContinuousAB && spec_.N % 2 == 0)
            throw std::invalid_argument(
                "WignerGrid: the continuous formalism requires odd N");
        side_ = (formalism_ == Formalism::ContinuousAB) ? spec_.N : 2 * spec_.N;
        const std::size_t expected =
            static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_);
        if (values_.size() != expected)
            throw std::invalid_argument("WignerGrid: value count must be side^2");
        double s = 0.0;
        for (double v : values_) s += v;
        if (std::abs(s - 1.0) > 1e-10)
            throw std::invalid_argument("WignerGrid: lattice sum must equal 1");
    }

    /// Wraps values derived from a Wigner function without requiring them
    /// to sum to 1 — e.g. a grid resampled along classical orbits, whose
    /// sum drifts once the map filaments below lattice resolution.  Shape
    /// and formalism checks still apply.
    static WignerGrid unnormalized(Formalism formalism, HilbertSpec spec,
                                   std::vector<double> values) {
        WignerGrid g(formalism, spec, uniform_tag{});
        const std::size_t expected = static_cast<std::size_t>(g.side_) *
                                     static_cast<std::size_t>(g.side_);
        if (values.size() != expected)
            throw std::invalid_argument("WignerGrid: value count must be side^2");
        g.values_ = std::move(values);
        return g;
    }

    Formalism formalism() const noexcept { return formalism_; }
    const HilbertSpec& spec() const noexcept { return spec_; }
    /// Lattice points per axis: N (continuous) or 2N (discrete).
    int side() const noexcept { return side_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// W at lattice point (position index n, momentum index m).
    double at(int n, int m) const {
        return values_[static_cast<std::size_t>(n) * static_cast<std::size_t>(side_) +
                       static_cast<std::size_t>(m)];
    }

    /// Piecewise-constant extension to the continuous torus: (q, p) in
    /// [0,1) x [0,L) snaps to the nearest lattice point.  The momentum
    /// axis is scaled by 1/L so the full period [0,L) maps onto the side_
    /// lattice rows regardless of L.
    double value_at(double q, double p) const {
        const double s = static_cast<double>(side_);
        const long n = std::lround(q * s);
        const long m = std::lround(p / static_cast<double>(spec_.L) * s);
        return at(static_cast<int>(detail::mod_index(n, side_)),
                  static_cast<int>(detail::mod_index(m, side_)));
    }

    double lattice_sum() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

    double sum_squares() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return s;
    }

private:
    struct uniform_tag {};
    WignerGrid(Formalism formalism, HilbertSpec spec, uniform_tag)
        : formalism_(formalism), spec_(spec) {
        if (formalism_ == Formalism::ContinuousAB && spec_.N % 2 == 0)
            throw std::invalid_argument(
                "WignerGrid: the continuous formalism requires odd N");
        side_ = (formalism_ == Formalism::ContinuousAB) ? spec_.N : 2 * spec_.N;
    }

    Formalism formalism_;
    HilbertSpec spec_;
    int side_;
    std::vector<double> values_;
};

namespace detail_wig {

/// Converts a complex-valued Wigner row buffer to real values, tracking
/// the largest imaginary residue for the caller's convention check.
inline double store_real_row(const std::complex<double>* src, double* dst,
                             int count, double scale) {
    double max_imag = 0.0;
    for (int i = 0; i < count; ++i) {
        const std::complex<double> v = src[i] * scale;
        if (std::abs(v.imag()) > max_imag) max_imag = std::abs(v.imag());
        dst[i] = v.real();
    }
    return max_imag;
}

/// One position row n (of 2N) of the discrete Wigner function:
///   W(n, m) = (e^{i pi n m/N} / 2N) sum_k conj(psi_{(n-k) mod N}) psi_k
///             e^{-i 2 pi k m/N},
/// for m = 0..2N-1.  The k-sum is N-periodic in m, so one length-N
/// transform serves all 2N columns.  Used by the full-grid builder and by
/// the fidelity engine's streaming accumulation.
inline void miquel_row(const std::vector<std::complex<double>>& psi, int N,
                       int n, std::vector<std::complex<double>>& out) {
    std::vector<std::complex<double>> h(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        const int idx = static_cast<int>(
            detail::mod_index(static_cast<long>(n) - static_cast<long>(k), N));
        h[static_cast<std::size_t>(k)] =
            std::conj(psi[static_cast<std::size_t>(idx)]) *
            psi[static_cast<std::size_t>(k)];
    }
    detail::fft_forward(h);

    out.resize(2 * static_cast<std::size_t>(N));
    const double inv_2n = 1.0 / (2.0 * static_cast<double>(N));
    for (int m = 0; m < 2 * N; ++m) {
        const long nm = static_cast<long>(n) * static_cast<long>(m);
        const double angle = std::numbers::pi *
                             static_cast<double>(nm % (2L * N)) /
                             static_cast<double>(N);
        out[static_cast<std::size_t>(m)] =
            std::polar(inv_2n, angle) * h[static_cast<std::size_t>(m % N)];
    }
}

} // namespace detail_wig

/// Continuous (Agam–Brenner) Wigner function on the N x N lattice:
///   W(n, m) = (1/N) sum_{n', l} e^{+i 2 pi n' m/N} delta~(2l - 2n + n')
///             conj(psi_{l+n'}) psi_l,
/// with n' in the symmetric window -(N-1)/2 .. (N-1)/2 and position
/// indices mod N.  Requires odd N.  The sign of the n'm phase is chosen so
/// the momentum marginal indexes the same way as the forward DFT
/// (sum_n W(n,m) = |<p_m|psi>|^2); the opposite sign would reflect the
/// momentum axis and decouple the grid from the classical (q,p) frame.
///
/// The evaluation is row-structured: for even n' the kernel collapses to a
/// single delta term; for odd n' the l-sum is a circular correlation done
/// with length-N transforms; a final transform over n' produces the m
/// axis.  Total cost O(N^2 log N).
inline WignerGrid wigner_continuous(const QuantumState& state) {
    const int N = state.dim();
    if (N % 2 == 0)
        throw std::invalid_argument(
            "wigner_continuous: the continuous formalism requires odd N");
    const int half = (N - 1) / 2;
    const auto& psi = state.amplitudes();
    const std::size_t Ns = static_cast<std::size_t>(N);

    // rows[n*N + j] accumulates C_{n'}(n) = sum_l delta~(2l-2n+n') g_l
    // with g_l = conj(psi_{l+n'}) psi_l, indexed by j = n' mod N so the
    // final transform over j is a standard DFT.
    std::vector<std::complex<double>> rows(Ns * Ns);

    detail::parallel_for(Ns, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::complex<double>> g(Ns), kernel(Ns);
        for (std::size_t j = lo; j < hi; ++j) {
            const int nprime =
                (static_cast<int>(j) <= half) ? static_cast<int>(j)
                                              : static_cast<int>(j) - N;
            if (nprime % 2 == 0) {
                // delta~ picks the single term l = n - n'/2:
                // C(n) = conj(psi_{n + n'/2}) psi_{n - n'/2}
                const int s = nprime / 2;
                for (int n = 0; n < N; ++n) {
                    const int a = static_cast<int>(detail::mod_index(n + s, N));
                    const int b = static_cast<int>(detail::mod_index(n - s, N));
                    rows[static_cast<std::size_t>(n) * Ns + j] =
                        std::conj(psi[static_cast<std::size_t>(a)]) *
                        psi[static_cast<std::size_t>(b)];
                }
            } else {
                for (int l = 0; l < N; ++l) {
                    const int lp = static_cast<int>(detail::mod_index(l + nprime, N));
                    g[static_cast<std::size_t>(l)] =
                        std::conj(psi[static_cast<std::size_t>(lp)]) *
                        psi[static_cast<std::size_t>(l)];
                }
                // C(n) = sum_l g_l K(l - n) with K(d) = delta~(2d + n') is
                // the circular convolution of g with the reversed kernel
                for (int d = 0; d < N; ++d) {
                    const int rev = static_cast<int>(detail::mod_index(-d, N));
                    kernel[static_cast<std::size_t>(d)] = {
                        detail_wig::delta_tilde(2L * rev + nprime, N), 0.0};
                }
                detail::fft_forward(g);
                detail::fft_forward(kernel);
                const double inv_n = 1.0 / static_cast<double>(N);
                for (std::size_t i = 0; i < Ns; ++i) g[i] *= kernel[i] * inv_n;
                detail::fft_backward(g);
                for (int n = 0; n < N; ++n)
                    rows[static_cast<std::size_t>(n) * Ns + j] =
                        g[static_cast<std::size_t>(n)];
            }
        }
    });

    // the phase e^{+i 2 pi n' m / N} is mod-N periodic in n', so the m
    // axis is one backward transform of each row over j
    std::vector<double> w(Ns * Ns);
    std::vector<double> row_imag(Ns, 0.0);
    detail::parallel_for(Ns, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::complex<double>> buf(Ns);
        for (std::size_t n = lo; n < hi; ++n) {
            std::copy(rows.begin() + static_cast<std::ptrdiff_t>(n * Ns),
                      rows.begin() + static_cast<std::ptrdiff_t>((n + 1) * Ns),
                      buf.begin());
            detail::fft_backward(buf);
            row_imag[n] = detail_wig::store_real_row(
                buf.data(), w.data() + n * Ns, N, 1.0 / static_cast<double>(N));
        }
    });

    double max_imag = 0.0;
    for (double v : row_imag) max_imag = std::max(max_imag, v);
    if (max_imag > 1e-10)
        throw std::runtime_error(
            "wigner_continuous: imaginary residue exceeds 1e-10");
    return WignerGrid(Formalism::ContinuousAB, state.spec(), std::move(w));
}

/// Discrete (Miquel) Wigner function on the 2N x 2N lattice; see
/// detail_wig::miquel_row for the per-row formula.  Cost O(N^2 log N).
inline WignerGrid wigner_discrete(const QuantumState& state) {
    const int N = state.dim();
    const int side = 2 * N;
    const std::size_t side_s = static_cast<std::size_t>(side);
    const auto& psi = state.amplitudes();

    std::vector<double> w(side_s * side_s);
    std::vector<double> row_imag(side_s, 0.0);
    detail::parallel_for(side_s, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::complex<double>> buf;
        for (std::size_t n = lo; n < hi; ++n) {
            detail_wig::miquel_row(psi, N, static_cast<int>(n), buf);
            row_imag[n] = detail_wig::store_real_row(buf.data(),
                                                     w.data() + n * side_s,
                                                     side, 1.0);
        }
    });

    double max_imag = 0.0;
    for (double v : row_imag) max_imag = std::max(max_imag, v);
    if (max_imag > 1e-10)
        throw std::runtime_error(
            "wigner_discrete: imaginary residue exceeds 1e-10");
    return WignerGrid(Formalism::DiscreteMiquel, state.spec(), std::move(w));
}

/// Dense matrix of the point operator A_{nm} in the position basis
/// (row-major, entry [r*N + c] = <q_r| A |q_c>).  Exposed as test plumbing:
/// Wigner values are traces against these operators, and the state can be
/// reconstructed as rho = N * sum_{n,m} W(n,m) A_{nm}.
inline std::vector<std::complex<double>>
point_operator_matrix(const HilbertSpec& spec, Formalism formalism, int n, int m) {
    const int N = spec.N;
    const std::size_t Ns = static_cast<std::size_t>(N);
    std::vector<std::complex<double>> A(Ns * Ns, std::complex<double>{0.0, 0.0});
    const double pi = std::numbers::pi;

    if (formalism == Formalism::ContinuousAB) {
        if (N % 2 == 0)
            throw std::invalid_argument(
                "point_operator_matrix: the continuous formalism requires odd N");
        if (n < 0 || n >= N || m < 0 || m >= N)
            throw std::invalid_argument(
                "point_operator_matrix: continuous indices must lie in [0, N)");
        const int half = (N - 1) / 2;
        for (int nprime = -half; nprime <= half; ++nprime) {
            // +n'm phase, matching the marginal orientation of the fast path
            const std::complex<double> phase = std::polar(
                1.0 / static_cast<double>(N),
                2.0 * pi * static_cast<double>(nprime) * static_cast<double>(m) /
                    static_cast<double>(N));
            for (int l = 0; l < N; ++l) {
                const double dt = detail_wig::delta_tilde(
                    2L * (static_cast<long>(l) - static_cast<long>(n)) + nprime, N);
                if (dt == 0.0) continue;
                // The shifted component indexes the row so the trace picks
                // up conj(psi_{l+n'}) psi_l, as in the defining sum.
                const int row = static_cast<int>(detail::mod_index(l + nprime, N));
                A[static_cast<std::size_t>(row) * Ns + static_cast<std::size_t>(l)] +=
                    phase * dt;
            }
        }
    } else {
        if (n < 0 || n >= 2 * N || m < 0 || m >= 2 * N)
            throw std::invalid_argument(
                "point_operator_matrix: discrete indices must lie in [0, 2N)");
        const long nm = static_cast<long>(n) * static_cast<long>(m);
        const std::complex<double> front =
            std::polar(1.0 / (2.0 * static_cast<double>(N)),
                       pi * static_cast<double>(nm % (2L * N)) /
                           static_cast<double>(N));
        for (int k = 0; k < N; ++k) {
            const int row = static_cast<int>(
                detail::mod_index(static_cast<long>(n) - static_cast<long>(k), N));
            A[static_cast<std::size_t>(row) * Ns + static_cast<std::size_t>(k)] +=
                front * std::polar(1.0, -2.0 * pi * static_cast<double>(k) *
                                            static_cast<double>(m) /
                                            static_cast<double>(N));
        }
    }
    return A;
}

/// Brute-force Wigner value W(n,m) = tr{A_{nm} |psi><psi|} = <psi|A|psi>,
/// the independent cross-check of the transform-accelerated builders.
/// Capped at N <= 64.
inline double point_operator_oracle(const QuantumState& state,
                                    Formalism formalism, int n, int m) {
    const int N = state.dim();
    if (N > 64)
        throw std::invalid_argument("point_operator_oracle: capped at N = 64");
    const auto A = point_operator_matrix(state.spec(), formalism, n, m);
    std::complex<double> acc{0.0, 0.0};
    for (int r = 0; r < N; ++r) {
        std::complex<double> rowdot{0.0, 0.0};
        for (int c = 0; c < N; ++c)
            rowdot += A[static_cast<std::size_t>(r) * static_cast<std::size_t>(N) +
                        static_cast<std::size_t>(c)] *
                      state[c];
        acc += std::conj(state[r]) * rowdot;
    }
    return acc.real();
}

/// Fraction of lattice points carrying a negative value, judged against
/// the grid's floating-point noise floor (1e-13 of the largest magnitude):
/// regions where the true Wigner function is exponentially small come out
/// of the transforms as roundoff residue of either sign, and counting
/// those signs would report ~0.4 "negativity" for a plain Gaussian state.
/// Any genuine negativity in the decay/plateau regimes sits many orders of
/// magnitude above this floor, so the cutoff only silences noise.
inline double negativity_fraction(const WignerGrid& w) {
    double peak = 0.0;
    for (double v : w.values()) peak = std::max(peak, std::abs(v));
    const double floor = -1e-13 * peak;
    long count = 0;
    for (double v : w.values())
        if (v < floor) ++count;
    return static_cast<double>(count) / static_cast<double>(w.values().size());
}

/// Random-wave prediction for the long-time negativity plateau,
///   P_- = 1/2 - (1/sqrt(2 pi)) * Int_0^r e^{-x^2/2} dx
///       = 1/2 - (1/2) erf(r / sqrt(2)),
/// with r = (N-1)^{-1/2} (continuous) or (4N-1)^{-1/2} (discrete): the
/// mean-to-sigma ratio of Wigner values over a random-wave ensemble.
inline double random_wave_plateau(Formalism formalism, int N) {
    if (N < 2)
        throw std::invalid_argument("random_wave_plateau: requires N >= 2");
    const double r = (formalism == Formalism::ContinuousAB)
                         ? 1.0 / std::sqrt(static_cast<double>(N) - 1.0)
                         : 1.0 / std::sqrt(4.0 * static_cast<double>(N) - 1.0);
    return 0.5 - 0.5 * std::erf(r / std::sqrt(2.0));
}

/// Lattice sum with the unit-rescaled cell measure attached: the integral
/// of the piecewise-constant extension over (q, p/L) in [0,1)^2.  Equals
/// 1/N^2 for the continuous formalism.
inline double wigner_integral(const WignerGrid& w) {
    const double cells = static_cast<double>(w.side()) * static_cast<double>(w.side());
    return w.lattice_sum() / cells;
}

/// Same measure applied to W^2; equals 1/N^3 for the continuous formalism.
inline double wigner_purity(const WignerGrid& w) {
    const double cells = static_cast<double>(w.side()) * static_cast<double>(w.side());
    return w.sum_squares() / cells;
}

/// Plain-text dump for plotting: header line `# formalism N L t`, then one
/// lattice row per line, 17 significant digits.
inline void write_grid(const WignerGrid& w, const std::string& path, int t) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_grid: cannot open " + path);
    const char* name =
        (w.formalism() == Formalism::ContinuousAB) ? "continuous" : "discrete";
    out << "# " << name << ' ' << w.spec().N << ' ' << w.spec().L << ' ' << t
        << '\n';
    char buf[32];
    const int side = w.side();
    for (int n = 0; n < side; ++n) {
        for (int m = 0; m < side; ++m) {
            std::snprintf(buf, sizeof(buf), "%.17g", w.at(n, m));
            out << buf << (m + 1 == side ? '\n' : ' ');
        }
    }
    if (!out)
        throw std::runtime_error("write_grid: write failed for " + path);
}

} // namespace torusqc
