// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "torusqc/density.hpp"
#include "torusqc/detail/parallel.hpp"
#include "torusqc/detail/rng.hpp"
#include "torusqc/dynamics.hpp"
#include "torusqc/hilbert.hpp"
#include "torusqc/propagator.hpp"
#include "torusqc/wigner.hpp"

namespace torusqc {

/// Time series of the quantum-classical fidelity F(t) = <W~^t, rho^t>, its
/// relative form G(t) = F(t)/F(0) (G(0) = 1 exactly), and the Wigner
/// negativity fraction P_minus(t).  stderr_G carries the per-t standard
/// error of G over the ensemble (zero for a single state).
struct FidelitySeries {
    Formalism formalism = Formalism::DiscreteMiquel;
    int ensemble_size = 1;
    std::vector<int> times;
    std::vector<double> F;
    std::vector<double> G;
    std::vector<double> P_minus;
    std::vector<double> stderr_G;
};

/// Exponential-decay fit of log<G(t)> = intercept - slope * t over the fit
/// window, with the derived crossing times T1 (fit line reaches G = 1) and
/// T2 (fit line reaches G = 1/N), so slope * (T2 - T1) = log N identically.
/// When a decay rate is imposed externally the constrained_* fields carry
/// the one-parameter fit with the slope pinned to it.
struct DecayFit {
    double slope = 0.0;     ///< fitted decay rate (positive for decay)
    double intercept = 0.0; ///< fitted log G at t = 0
    double T1 = 0.0;
    double T2 = 0.0;
    int window_lo = 0; ///< first timestep inside the fit window
    int window_hi = 0; ///< last timestep inside the fit window
    double residual = 0.0; ///< RMS residual of the free fit in the window

    bool has_constrained = false;
    double constrained_slope = 0.0;
    double constrained_intercept = 0.0;
    double constrained_T1 = 0.0;
    double constrained_T2 = 0.0;
};

namespace detail_qcf {

/// One inverse-map step applied to every stored preimage, row-parallel.
/// Advancing the same buffer one step per emitted timestep reproduces a
/// fresh t-fold iteration bit for bit, because it performs the identical
/// operation sequence on each point.
inline void advance_preimages(std::vector<TorusPoint>& pre,
                              const ClassicalMapSpec& map) {
    detail::parallel_for(pre.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) pre[i] = map_inverse(pre[i], map);
    });
}

inline void finalize_relative(FidelitySeries& s) {
    const double f0 = s.F.empty() ? 0.0 : s.F.front();
    s.G.resize(s.F.size());
    for (std::size_t i = 0; i < s.F.size(); ++i) s.G[i] = s.F[i] / f0;
    if (!s.G.empty()) s.G.front() = 1.0;
    s.stderr_G.assign(s.F.size(), 0.0);
}

inline void check_density_match(const GaussianDensity& d, const HilbertSpec& h,
                                const char* who) {
    if (d.N != h.N || d.L != h.L)
        throw std::invalid_argument(std::string(who) +
                                    ": density and Hilbert space disagree on N or L");
}

} // namespace detail_qcf

/// QCF series in the continuous formalism: at each t the state is advanced
/// one propagator step, the Wigner function is rebuilt on the N x N
/// lattice, and F(t) is the quadrature of its piecewise-constant extension
/// against the pulled-back density over a resolution x resolution node
/// grid (cell weight L/R^2).  The classical preimages of the nodes are
/// kept in a buffer and advanced one inverse step per t.
///
/// The density must be normalized on the same node grid
/// (make_density(..., resolution)) for F to be a unit-measure overlap.
inline FidelitySeries qcf_continuous(const QuantumState& state,
                                     const GaussianDensity& d,
                                     const QuantumMapSpec& spec, int t_max,
                                     int resolution) {
    const int N = spec.hilbert().N;
    if (N % 2 == 0)
        throw std::invalid_argument(
            "qcf_continuous: the continuous formalism requires odd N");
    if (state.spec() != spec.hilbert())
        throw std::invalid_argument(
            "qcf_continuous: state and map live in different spaces");
    detail_qcf::check_density_match(d, spec.hilbert(), "qcf_continuous");
    if (t_max < 0)
        throw std::invalid_argument("qcf_continuous: t_max must be >= 0");
    if (resolution < 2 * N + 1)
        throw std::invalid_argument(
            "qcf_continuous: resolution must be >= 2N+1");

    const std::size_t R = static_cast<std::size_t>(resolution);
    const double Rd = static_cast<double>(resolution);
    const double Ld = static_cast<double>(spec.hilbert().L);
    const double weight = Ld / (Rd * Rd);

    // node (i, j) = (i/R, j L/R) snaps to Wigner cell (idx[i], idx[j]):
    // both axes share the map because p/L * N = N j / R
    std::vector<int> idx(R);
    for (std::size_t i = 0; i < R; ++i)
        idx[i] = static_cast<int>(detail::mod_index(
            std::lround(static_cast<double>(N) * static_cast<double>(i) / Rd), N));

    std::vector<TorusPoint> pre(R * R);
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < R; ++j)
            pre[i * R + j] = {static_cast<double>(i) / Rd,
                              static_cast<double>(j) * Ld / Rd};

    FidelitySeries out;
    out.formalism = Formalism::ContinuousAB;
    QuantumState psi = state;
    std::vector<double> row_sum(R);

    for (int t = 0; t <= t_max; ++t) {
        if (t > 0) {
            psi = propagate(psi, spec, 1);
            detail_qcf::advance_preimages(pre, spec.classical());
        }
        const WignerGrid w = wigner_continuous(psi);

        detail::parallel_for(R, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double* wrow =
                    w.values().data() +
                    static_cast<std::size_t>(idx[i]) * static_cast<std::size_t>(N);
                double acc = 0.0;
                for (std::size_t j = 0; j < R; ++j)
                    acc += wrow[idx[j]] * density_eval(d, pre[i * R + j]);
                row_sum[i] = acc;
            }
        });
        double f = 0.0;
        for (double v : row_sum) f += v;

        out.times.push_back(t);
        out.F.push_back(f * weight);
        out.P_minus.push_back(negativity_fraction(w));
    }
    detail_qcf::finalize_relative(out);
    return out;
}

/// QCF series in the discrete formalism:
///   F(t) = sum_{n,m in Z_2N} W^t(n,m) * rho^t(n/2N, m L/2N),
/// a bare lattice sum.  Wigner rows are streamed one position index at a
/// time (never storing the 2N x 2N grid), folding each row into F and the
/// negativity count; the 2N-grid preimages advance one inverse step per t.
///
/// The density must be normalized on the 2N x 2N lattice
/// (make_density(..., 2N)).
inline FidelitySeries qcf_discrete(const QuantumState& state,
                                   const GaussianDensity& d,
                                   const QuantumMapSpec& spec, int t_max) {
    if (state.spec() != spec.hilbert())
        throw std::invalid_argument(
            "qcf_discrete: state and map live in different spaces");
    detail_qcf::check_density_match(d, spec.hilbert(), "qcf_discrete");
    if (t_max < 0)
        throw std::invalid_argument("qcf_discrete: t_max must be >= 0");

    const int N = spec.hilbert().N;
    const std::size_t side = 2 * static_cast<std::size_t>(N);
    const double side_d = static_cast<double>(side);
    const double Ld = static_cast<double>(spec.hilbert().L);

    std::vector<TorusPoint> pre(side * side);
    for (std::size_t n = 0; n < side; ++n)
        for (std::size_t m = 0; m < side; ++m)
            pre[n * side + m] = {static_cast<double>(n) / side_d,
                                 static_cast<double>(m) * Ld / side_d};

    FidelitySeries out;
    out.formalism = Formalism::DiscreteMiquel;
    QuantumState psi = state;
    std::vector<double> row_sum(side), row_imag(side);
    std::vector<long> row_neg(side);
    // noise floor for sign counting (see negativity_fraction); the grid is
    // streamed, so the universal bound max|W| <= 1/(2N) stands in for the
    // actual peak
    const double neg_floor = -1e-13 / side_d;

    for (int t = 0; t <= t_max; ++t) {
        if (t > 0) {
            psi = propagate(psi, spec, 1);
            detail_qcf::advance_preimages(pre, spec.classical());
        }

        detail::parallel_for(side, [&](std::size_t lo, std::size_t hi) {
            std::vector<std::complex<double>> buf;
            for (std::size_t n = lo; n < hi; ++n) {
                detail_wig::miquel_row(psi.amplitudes(), N, static_cast<int>(n),
                                       buf);
                double acc = 0.0, max_imag = 0.0;
                long neg = 0;
                for (std::size_t m = 0; m < side; ++m) {
                    const double wv = buf[m].real();
                    max_imag = std::max(max_imag, std::abs(buf[m].imag()));
                    if (wv < neg_floor) ++neg;
                    acc += wv * density_eval(d, pre[n * side + m]);
                }
                row_sum[n] = acc;
                row_imag[n] = max_imag;
                row_neg[n] = neg;
            }
        });

        double f = 0.0, max_imag = 0.0;
        long neg = 0;
        for (std::size_t n = 0; n < side; ++n) {
            f += row_sum[n];
            neg += row_neg[n];
            max_imag = std::max(max_imag, row_imag[n]);
        }
        if (max_imag > 1e-10)
            throw std::runtime_error(
                "qcf_discrete: Wigner imaginary residue exceeds 1e-10");

        out.times.push_back(t);
        out.F.push_back(f);
        out.P_minus.push_back(static_cast<double>(neg) /
                              (side_d * side_d));
    }
    detail_qcf::finalize_relative(out);
    return out;
}

/// Runs `run(member, q0, u)` for n_states members with centers drawn
/// uniformly on the unit square — q0 is the position center, u the
/// momentum center as a fraction of the period L — and averages F, G and
/// P_minus pointwise in t.  Each member draws from its own (seed, member)
/// substream and results are folded in member order, so the output is
/// identical under any degree of parallelism.  stderr_G is the per-t
/// standard error of the member G values.
inline FidelitySeries ensemble_average(
    const std::function<FidelitySeries(int, double, double)>& run, int n_states,
    std::uint64_t seed) {
    if (n_states < 1)
        throw std::invalid_argument("ensemble_average: n_states must be >= 1");

    FidelitySeries acc;
    std::vector<double> sum_g2;
    for (int member = 0; member < n_states; ++member) {
        auto gen = detail::substream(seed, static_cast<std::uint64_t>(member));
        const double q0 = detail::uniform01(gen);
        const double u = detail::uniform01(gen);
        FidelitySeries s = run(member, q0, u);
        if (member == 0) {
            acc = std::move(s);
            sum_g2.resize(acc.G.size());
            for (std::size_t i = 0; i < acc.G.size(); ++i)
                sum_g2[i] = acc.G[i] * acc.G[i];
        } else {
            if (s.times != acc.times)
                throw std::runtime_error(
                    "ensemble_average: members produced different time axes");
            for (std::size_t i = 0; i < acc.F.size(); ++i) {
                acc.F[i] += s.F[i];
                acc.G[i] += s.G[i];
                acc.P_minus[i] += s.P_minus[i];
                sum_g2[i] += s.G[i] * s.G[i];
            }
        }
    }

    const double n = static_cast<double>(n_states);
    acc.stderr_G.assign(acc.F.size(), 0.0);
    for (std::size_t i = 0; i < acc.F.size(); ++i) {
        acc.F[i] /= n;
        acc.G[i] /= n;
        acc.P_minus[i] /= n;
        if (n_states > 1) {
            const double var =
                std::max(0.0, (sum_g2[i] - n * acc.G[i] * acc.G[i]) / (n - 1.0));
            acc.stderr_G[i] = std::sqrt(var / n);
        }
    }
    if (!acc.G.empty()) acc.G.front() = 1.0;
    acc.ensemble_size = n_states;
    return acc;
}

/// Classically echoed Wigner function: the evolved state's continuous
/// Wigner extension W~^t resampled at the forward classical images of the
/// N x N lattice points, value(n,m) = W~^t(phi^t(n/N, m L/N)).  The result
/// is a derived grid (its lattice sum is not conserved once filamentation
/// outruns the lattice), hence the unnormalized wrapper.
inline WignerGrid echoed_wigner(const QuantumState& state,
                                const QuantumMapSpec& spec, int t) {
    const int N = spec.hilbert().N;
    if (N % 2 == 0)
        throw std::invalid_argument(
            "echoed_wigner: the continuous formalism requires odd N");
    if (state.spec() != spec.hilbert())
        throw std::invalid_argument(
            "echoed_wigner: state and map live in different spaces");
    if (t < 0) throw std::invalid_argument("echoed_wigner: t must be >= 0");

    const QuantumState psi = propagate(state, spec, t);
    const WignerGrid w = wigner_continuous(psi);

    const std::size_t Ns = static_cast<std::size_t>(N);
    const double Nd = static_cast<double>(N);
    const double Ld = static_cast<double>(spec.hilbert().L);
    std::vector<double> vals(Ns * Ns);
    detail::parallel_for(Ns, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t n = lo; n < hi; ++n) {
            for (std::size_t m = 0; m < Ns; ++m) {
                TorusPoint x{static_cast<double>(n) / Nd,
                             static_cast<double>(m) * Ld / Nd};
                for (int s = 0; s < t; ++s) x = map_forward(x, spec.classical());
                vals[n * Ns + m] = w.value_at(x.q, x.p);
            }
        }
    });
    return WignerGrid::unnormalized(Formalism::ContinuousAB, spec.hilbert(),
                                    std::move(vals));
}

/// Least-squares exponential fit of the series: a line through
/// (t, log<G(t)>) restricted to the window g_lo <= <G(t)> <= g_hi
/// (defaults 5/N and 1/2, cutting off the initial shoulder and the ergodic
/// plateau).  Throws if fewer than 3 points fall inside the window.  If
/// lambda_max is given, the constrained_* fields additionally carry the
/// one-parameter fit with the slope pinned to lambda_max.
inline DecayFit fit_decay(const FidelitySeries& series,
                          std::optional<double> lambda_max, int N,
                          std::optional<double> g_lo = std::nullopt,
                          std::optional<double> g_hi = std::nullopt) {
    if (N < 2) throw std::invalid_argument("fit_decay: N must be >= 2");
    const double lo = g_lo.value_or(5.0 / static_cast<double>(N));
    const double hi = g_hi.value_or(0.5);
    const double log_n = std::log(static_cast<double>(N));

    std::vector<double> ts, ys;
    int w_lo = 0, w_hi = 0;
    for (std::size_t i = 0; i < series.G.size(); ++i) {
        const double g = series.G[i];
        if (g >= lo && g <= hi) {
            if (ts.empty()) w_lo = series.times[i];
            w_hi = series.times[i];
            ts.push_back(static_cast<double>(series.times[i]));
            ys.push_back(std::log(g));
        }
    }
    if (ts.size() < 3)
        throw std::runtime_error(
            "fit_decay: fit unavailable, fewer than 3 series points inside "
            "the fit window");

    const double n = static_cast<double>(ts.size());
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        my += ys[i];
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        sty += (ts[i] - mt) * (ys[i] - my);
    }
    if (!(stt > 0.0))
        throw std::runtime_error(
            "fit_decay: fit unavailable, degenerate time window");

    const double line_slope = sty / stt; // of y = log G, negative for decay
    DecayFit fit;
    fit.slope = -line_slope;
    fit.intercept = my - line_slope * mt;
    fit.T1 = fit.intercept / fit.slope;
    fit.T2 = (fit.intercept + log_n) / fit.slope;
    fit.window_lo = w_lo;
    fit.window_hi = w_hi;
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (fit.intercept - fit.slope * ts[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);

    if (lambda_max) {
        const double lam = *lambda_max;
        if (!(lam > 0.0))
            throw std::invalid_argument("fit_decay: lambda_max must be > 0");
        double c = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) c += ys[i] + lam * ts[i];
        c /= n;
        fit.has_constrained = true;
        fit.constrained_slope = lam;
        fit.constrained_intercept = c;
        fit.constrained_T1 = c / lam;
        fit.constrained_T2 = (c + log_n) / lam;
    }
    return fit;
}

/// One timestep of the Loschmidt comparison: the classical and quantum
/// echo overlaps, the two QCFs, and both sides of the triangle-style
/// bound |sqrt(1-F_CLE) - sqrt(1-F_QLE)| <= sqrt(1-F_QCF_0) +
/// sqrt(1-F_QCF_eps).  The F_* values are overlaps of the four phase-space
/// functions rescaled to unit L2 norm on the quadrature grid (so each lies
/// in [-1,1] by Cauchy-Schwarz); raw_* are the same overlaps without the
/// rescaling.
struct EchoRecord {
    int t = 0;
    double F_CLE = 0.0;
    double F_QLE = 0.0;
    double F_QCF_0 = 0.0;
    double F_QCF_eps = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0; ///< rhs - lhs; nonnegative where the bound holds
    double raw_CLE = 0.0;
    double raw_QLE = 0.0;
    double raw_QCF_0 = 0.0;
    double raw_QCF_eps = 0.0;
};

/// Runs the unperturbed and perturbed evolutions side by side and emits
/// one EchoRecord per t in 0..t_max, using the continuous formalism and
/// the same node quadrature as qcf_continuous (resolution <= 0 selects the
/// 3N default).  Both maps must share the Hilbert space; the initial state
/// and density are common to both evolutions.
inline std::vector<EchoRecord> loschmidt_echoes(const QuantumState& state,
                                                const GaussianDensity& d,
                                                const QuantumMapSpec& spec,
                                                const QuantumMapSpec& perturbed_spec,
                                                int t_max, int resolution = 0) {
    const HilbertSpec h = spec.hilbert();
    if (h != perturbed_spec.hilbert())
        throw std::invalid_argument(
            "loschmidt_echoes: maps act on different Hilbert spaces");
    const int N = h.N;
    if (N % 2 == 0)
        throw std::invalid_argument(
            "loschmidt_echoes: the continuous formalism requires odd N");
    if (state.spec() != h)
        throw std::invalid_argument(
            "loschmidt_echoes: state and maps live in different spaces");
    detail_qcf::check_density_match(d, h, "loschmidt_echoes");
    if (t_max < 0)
        throw std::invalid_argument("loschmidt_echoes: t_max must be >= 0");
    if (resolution <= 0) resolution = 3 * N;
    if (resolution < 2 * N + 1)
        throw std::invalid_argument(
            "loschmidt_echoes: resolution must be >= 2N+1");

    const std::size_t R = static_cast<std::size_t>(resolution);
    const double Rd = static_cast<double>(resolution);
    const double Ld = static_cast<double>(h.L);
    const double weight = Ld / (Rd * Rd);

    std::vector<int> idx(R);
    for (std::size_t i = 0; i < R; ++i)
        idx[i] = static_cast<int>(detail::mod_index(
            std::lround(static_cast<double>(N) * static_cast<double>(i) / Rd), N));

    std::vector<TorusPoint> pre0(R * R), pre_eps(R * R);
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < R; ++j)
            pre0[i * R + j] = pre_eps[i * R + j] = {
                static_cast<double>(i) / Rd, static_cast<double>(j) * Ld / Rd};

    QuantumState psi0 = state, psi_eps = state;
    std::vector<EchoRecord> records;
    records.reserve(static_cast<std::size_t>(t_max) + 1);

    // per-row partials: products ab, ce, ac, be and squares a2, b2, c2, e2
    // with a = W~_0, b = W~_eps, c = rho_0, e = rho_eps at each node
    constexpr int kSums = 8;
    std::vector<double> partial(R * kSums);

    for (int t = 0; t <= t_max; ++t) {
        if (t > 0) {
            psi0 = propagate(psi0, spec, 1);
            psi_eps = propagate(psi_eps, perturbed_spec, 1);
            detail_qcf::advance_preimages(pre0, spec.classical());
            detail_qcf::advance_preimages(pre_eps, perturbed_spec.classical());
        }
        const WignerGrid w0 = wigner_continuous(psi0);
        const WignerGrid we = wigner_continuous(psi_eps);

        detail::parallel_for(R, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const std::size_t wrow =
                    static_cast<std::size_t>(idx[i]) * static_cast<std::size_t>(N);
                double s[kSums] = {0, 0, 0, 0, 0, 0, 0, 0};
                for (std::size_t j = 0; j < R; ++j) {
                    const double a = w0.values()[wrow + static_cast<std::size_t>(idx[j])];
                    const double b = we.values()[wrow + static_cast<std::size_t>(idx[j])];
                    const double c = density_eval(d, pre0[i * R + j]);
                    const double e = density_eval(d, pre_eps[i * R + j]);
                    s[0] += a * b;
                    s[1] += c * e;
                    s[2] += a * c;
                    s[3] += b * e;
                    s[4] += a * a;
                    s[5] += b * b;
                    s[6] += c * c;
                    s[7] += e * e;
                }
                for (int k = 0; k < kSums; ++k) partial[i * kSums + k] = s[k];
            }
        });
        double sums[kSums] = {0, 0, 0, 0, 0, 0, 0, 0};
        for (std::size_t i = 0; i < R; ++i)
            for (int k = 0; k < kSums; ++k) sums[k] += partial[i * kSums + k];

        EchoRecord rec;
        rec.t = t;
        rec.raw_QLE = sums[0] * weight;
        rec.raw_CLE = sums[1] * weight;
        rec.raw_QCF_0 = sums[2] * weight;
        rec.raw_QCF_eps = sums[3] * weight;
        const double na = std::sqrt(sums[4] * weight);
        const double nb = std::sqrt(sums[5] * weight);
        const double nc = std::sqrt(sums[6] * weight);
        const double ne = std::sqrt(sums[7] * weight);
        rec.F_QLE = rec.raw_QLE / (na * nb);
        rec.F_CLE = rec.raw_CLE / (nc * ne);
        rec.F_QCF_0 = rec.raw_QCF_0 / (na * nc);
        rec.F_QCF_eps = rec.raw_QCF_eps / (nb * ne);
        const double d_cle = std::sqrt(std::max(0.0, 1.0 - rec.F_CLE));
        const double d_qle = std::sqrt(std::max(0.0, 1.0 - rec.F_QLE));
        rec.lhs = std::abs(d_cle - d_qle);
        rec.rhs = std::sqrt(std::max(0.0, 1.0 - rec.F_QCF_0)) +
                  std::sqrt(std::max(0.0, 1.0 - rec.F_QCF_eps));
        rec.residual = rec.rhs - rec.lhs;
        records.push_back(rec);
    }
    return records;
}

/// CSV emission of a fidelity series: header `t,F,G,P_minus,stderr_G`,
/// one row per timestep, 17 significant digits.
inline void write_series_csv(const FidelitySeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_series_csv: cannot open " + path);
    out << "t,F,G,P_minus,stderr_G\n";
    char buf[160];
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.16e,%.16e,%.16e,%.16e\n",
                      series.times[i], series.F[i], series.G[i],
                      series.P_minus[i], series.stderr_G[i]);
        out << buf;
    }
    if (!out)
        throw std::runtime_error("write_series_csv: write failed for " + path);
}

/// JSON emission of a decay fit: always the keys slope, intercept, T1, T2,
/// window_lo, window_hi, residual; the constrained_* keys follow when the
/// fit carried a pinned slope.
inline void write_fit_json(const DecayFit& fit, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_fit_json: cannot open " + path);
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.16e", v);
        return std::string(buf);
    };
    out << "{\n";
    out << "  \"slope\": " << num(fit.slope) << ",\n";
    out << "  \"intercept\": " << num(fit.intercept) << ",\n";
    out << "  \"T1\": " << num(fit.T1) << ",\n";
    out << "  \"T2\": " << num(fit.T2) << ",\n";
    out << "  \"window_lo\": " << fit.window_lo << ",\n";
    out << "  \"window_hi\": " << fit.window_hi << ",\n";
    out << "  \"residual\": " << num(fit.residual);
    if (fit.has_constrained) {
        out << ",\n";
        out << "  \"constrained_slope\": " << num(fit.constrained_slope) << ",\n";
        out << "  \"constrained_intercept\": " << num(fit.constrained_intercept)
            << ",\n";
        out << "  \"constrained_T1\": " << num(fit.constrained_T1) << ",\n";
        out << "  \"constrained_T2\": " << num(fit.constrained_T2) << "\n";
    } else {
        out << "\n";
    }
    out << "}\n";
    if (!out)
        throw std::runtime_error("write_fit_json: write failed for " + path);
}

/// CSV emission of Loschmidt echo records, matching EchoRecord field order.
inline void write_echo_csv(const std::vector<EchoRecord>& records,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_echo_csv: cannot open " + path);
    out << "t,F_CLE,F_QLE,F_QCF_0,F_QCF_eps,lhs,rhs,residual,"
           "raw_CLE,raw_QLE,raw_QCF_0,raw_QCF_eps\n";
    char buf[360];
    for (const EchoRecord& r : records) {
        std::snprintf(buf, sizeof(buf),
                      "%d,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,"
                      "%.16e,%.16e,%.16e\n",
                      r.t, r.F_CLE, r.F_QLE, r.F_QCF_0, r.F_QCF_eps, r.lhs,
                      r.rhs, r.residual, r.raw_CLE, r.raw_QLE, r.raw_QCF_0,
                      r.raw_QCF_eps);
        out << buf;
    }
    if (!out)
        throw std::runtime_error("write_echo_csv: write failed for " + path);
}

} // namespace torusqc
