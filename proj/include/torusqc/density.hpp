// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusqc/detail/parallel.hpp"
#include "torusqc/dynamics.hpp"
#include "torusqc/hilbert.hpp"

namespace torusqc {

/// Periodicized Gaussian probability density on [0,1) x [0,L),
///   rho(q,p) = norm_const * (sum_nu e^{-2 pi sigma N (q - q0 + nu)^2})
///                         * (sum_nu e^{-2 pi N/sigma (p - p0 + nu L)^2}),
/// the classical twin of the coherent state with matching center and
/// squeezing.  norm_const is fixed at construction so the quadrature over
/// the working grid is exactly 1 (its analytic value is 2N up to
/// exponentially small periodization corrections).
struct GaussianDensity {
    double q0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;
    int N = 1;
    int L = 1;
    double norm_const = 1.0;
};

namespace detail_den {

/// One periodicized Gaussian axis factor: sum of exp(-a (d + nu*period)^2)
/// over every image with exponent <= 45 (all others are below ~3e-20).
/// The image window is located by direct division, so far-from-support
/// points cost two rounding operations and no exp.
inline double axis_factor(double d, double period, double a, double reach) {
    const double lo = std::ceil((-d - reach) / period);
    const double hi = std::floor((-d + reach) / period);
    double s = 0.0;
    for (double nu = lo; nu <= hi; nu += 1.0) {
        const double w = d + nu * period;
        s += std::exp(-a * w * w);
    }
    return s;
}

inline double q_coefficient(const GaussianDensity& d) {
    return 2.0 * std::numbers::pi * d.sigma * static_cast<double>(d.N);
}

inline double p_coefficient(const GaussianDensity& d) {
    return 2.0 * std::numbers::pi * static_cast<double>(d.N) / d.sigma;
}

} // namespace detail_den

/// rho at a point; nonnegative by construction.
inline double density_eval(const GaussianDensity& d, TorusPoint x) {
    const double aq = detail_den::q_coefficient(d);
    const double qf =
        detail_den::axis_factor(x.q - d.q0, 1.0, aq, std::sqrt(45.0 / aq));
    if (qf == 0.0) return 0.0;
    const double ap = detail_den::p_coefficient(d);
    const double pf = detail_den::axis_factor(
        x.p - d.p0, static_cast<double>(d.L), ap, std::sqrt(45.0 / ap));
    return d.norm_const * qf * pf;
}

/// Builds the density and calibrates norm_const by normalizing the
/// quadrature sum_ij rho(i/R, j L/R) * (L/R^2) over the resolution x
/// resolution working grid to exactly 1.
inline GaussianDensity make_density(double q0, double p0, double sigma,
                                    const HilbertSpec& spec, int resolution) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("make_density: sigma must be > 0");
    if (resolution < 2)
        throw std::invalid_argument("make_density: resolution must be >= 2");
    GaussianDensity d;
    d.q0 = q0;
    d.p0 = p0;
    d.sigma = sigma;
    d.N = spec.N;
    d.L = spec.L;
    d.norm_const = 1.0;

    const double R = static_cast<double>(resolution);
    const double Ld = static_cast<double>(spec.L);
    double raw = 0.0;
    for (int i = 0; i < resolution; ++i) {
        const double q = static_cast<double>(i) / R;
        for (int j = 0; j < resolution; ++j) {
            const double p = static_cast<double>(j) * Ld / R;
            raw += density_eval(d, {q, p});
        }
    }
    const double quadrature = raw * Ld / (R * R);
    if (!(quadrature > 1e-300))
        throw std::invalid_argument(
            "make_density: density has no support on the working grid");
    d.norm_const = 1.0 / quadrature;
    return d;
}

/// Liouville evolution by exact pullback: rho^t(x) = rho^0(phi^{-t}(x)).
/// No interpolation and no grid evolution; the inverse orbit of x is
/// iterated directly.
inline double density_pullback(const GaussianDensity& d,
                               const ClassicalMapSpec& spec, int t,
                               TorusPoint x) {
    if (t < 0) throw std::invalid_argument("density_pullback: t must be >= 0");
    for (int s = 0; s < t; ++s) x = map_inverse(x, spec);
    return density_eval(d, x);
}

/// Samples rho^t on a resolution x resolution uniform grid over
/// [0,1) x [0,L), row-major with the position index first:
/// out[i*R + j] = rho^t(i/R, j L/R).  Rows evolve independently in
/// parallel.
inline std::vector<double> density_grid(const GaussianDensity& d,
                                        const ClassicalMapSpec& spec, int t,
                                        int resolution) {
    if (t < 0) throw std::invalid_argument("density_grid: t must be >= 0");
    if (resolution < 2)
        throw std::invalid_argument("density_grid: resolution must be >= 2");
    const std::size_t R = static_cast<std::size_t>(resolution);
    const double Rd = static_cast<double>(resolution);
    const double Ld = static_cast<double>(d.L);
    std::vector<double> out(R * R);
    detail::parallel_for(R, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double q = static_cast<double>(i) / Rd;
            for (std::size_t j = 0; j < R; ++j) {
                const double p = static_cast<double>(j) * Ld / Rd;
                out[i * R + j] = density_pullback(d, spec, t, {q, p});
            }
        }
    });
    return out;
}

/// Plain-text dump in the same shape as the Wigner grid format, with
/// `density` as the formalism token: header `# density N L t`, one grid
/// row per line, 17 significant digits.
inline void write_density_grid(const std::vector<double>& values, int resolution,
                               const HilbertSpec& spec, const std::string& path,
                               int t) {
    if (values.size() != static_cast<std::size_t>(resolution) *
                             static_cast<std::size_t>(resolution))
        throw std::invalid_argument(
            "write_density_grid: value count must be resolution^2");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_density_grid: cannot open " + path);
    out << "# density " << spec.N << ' ' << spec.L << ' ' << t << '\n';
    char buf[32];
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g",
                          values[static_cast<std::size_t>(i) *
                                     static_cast<std::size_t>(resolution) +
                                 static_cast<std::size_t>(j)]);
            out << buf << (j + 1 == resolution ? '\n' : ' ');
        }
    }
    if (!out)
        throw std::runtime_error("write_density_grid: write failed for " + path);
}

} // namespace torusqc
