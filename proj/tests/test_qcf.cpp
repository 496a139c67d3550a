// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
//
// Fidelity-engine tests: exact invariance under the linear cat map,
// ensemble averaging and its error bars, decay-window fitting on synthetic
// series, echoed-grid resampling, the Loschmidt comparison, measure-
// preservation form equivalence, and thread-count determinism.
#include <catch2/catch_amalgamated.hpp>

#include <torusqc/density.hpp>
#include <torusqc/dynamics.hpp>
#include <torusqc/hilbert.hpp>
#include <torusqc/propagator.hpp>
#include <torusqc/qcf.hpp>
#include <torusqc/wigner.hpp>

#include <torusqc/detail/rng.hpp>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <vector>

namespace {

using torusqc::ClassicalMapSpec;
using torusqc::DecayFit;
using torusqc::EchoRecord;
using torusqc::FidelitySeries;
using torusqc::GaussianDensity;
using torusqc::HilbertSpec;
using torusqc::QuantumMapSpec;
using torusqc::QuantumState;

/// One packet-vs-density run with matched centers; the closure shape used
/// by ensemble_average.  u is the momentum center in slots of [0,1).
FidelitySeries packet_run(const HilbertSpec& hs, const ClassicalMapSpec& cls,
                          torusqc::Formalism formalism, double q0, double u,
                          int t_max, int resolution) {
    const QuantumMapSpec map(cls, hs);
    const QuantumState psi = torusqc::coherent_state({q0, u, 1.0}, hs);
    const double p0 = u * static_cast<double>(hs.L);
    if (formalism == torusqc::Formalism::ContinuousAB) {
        const GaussianDensity d =
            torusqc::make_density(q0, p0, 1.0, hs, resolution);
        return torusqc::qcf_continuous(psi, d, map, t_max, resolution);
    }
    const GaussianDensity d = torusqc::make_density(q0, p0, 1.0, hs, 2 * hs.N);
    return torusqc::qcf_discrete(psi, d, map, t_max);
}

bool same_series(const FidelitySeries& a, const FidelitySeries& b) {
    return a.times == b.times && a.F == b.F && a.G == b.G &&
           a.P_minus == b.P_minus && a.stderr_G == b.stderr_G;
}

} // namespace

TEST_CASE("Relative fidelity starts at one in both formalisms", "[qcf]") {
    {
        const FidelitySeries s =
            packet_run(HilbertSpec(31, 2), ClassicalMapSpec::sawtooth(0.5, 2),
                       torusqc::Formalism::ContinuousAB, 0.3, 0.45, 3, 93);
        REQUIRE(s.times.size() == 4);
        CHECK(s.G[0] == 1.0);
        CHECK(s.formalism == torusqc::Formalism::ContinuousAB);
    }
    {
        const FidelitySeries s =
            packet_run(HilbertSpec(32, 1), ClassicalMapSpec::sawtooth(0.9, 1),
                       torusqc::Formalism::DiscreteMiquel, 0.3, 0.45, 3, 0);
        CHECK(s.G[0] == 1.0);
        CHECK(s.formalism == torusqc::Formalism::DiscreteMiquel);
    }
}

TEST_CASE("Kick of one makes the fidelity an exact invariant", "[qcf]") {
    // K = 1, L = 1 is the linear cat map: the discrete Wigner function is
    // transported point-to-point on the doubled lattice and the density
    // pullback visits exact lattice preimages, so F(t) is F(0) reordered.
    const HilbertSpec hs(64, 1);
    const FidelitySeries s =
        packet_run(hs, ClassicalMapSpec::sawtooth(1.0, 1),
                   torusqc::Formalism::DiscreteMiquel, 0.5, 0.5, 8, 0);
    for (std::size_t i = 0; i < s.G.size(); ++i) {
        INFO("t " << s.times[i]);
        CHECK(std::abs(s.G[i] - 1.0) < 1e-12);
    }
}

TEST_CASE("Ensemble decay stays inside the fidelity bounds and reaches the "
          "plateau scale",
          "[qcf][ensemble]") {
    const HilbertSpec hs(31, 2);
    const ClassicalMapSpec cls = ClassicalMapSpec::sawtooth(0.5, 2);
    const int t_max = 10;
    auto run = [&](int, double q0, double u) {
        return packet_run(hs, cls, torusqc::Formalism::ContinuousAB, q0, u,
                          t_max, 93);
    };
    const FidelitySeries s = torusqc::ensemble_average(run, 4, 2024);
    REQUIRE(s.times.size() == static_cast<std::size_t>(t_max) + 1);
    CHECK(s.ensemble_size == 4);
    for (std::size_t i = 0; i < s.G.size(); ++i) {
        INFO("t " << s.times[i]);
        CHECK(std::isfinite(s.F[i]));
        CHECK(s.G[i] > -1e-6);
        CHECK(s.G[i] < 1.0 + 1e-6);
    }
    // by t = 6 the decay at rate log 2 has crossed well below the shoulder
    CHECK(s.G[6] < 0.3);
    CHECK(s.G[t_max] < 0.3);
}

TEST_CASE("A one-member ensemble is the bare run with zero error bars",
          "[qcf][ensemble]") {
    const HilbertSpec hs(11, 2);
    const ClassicalMapSpec cls = ClassicalMapSpec::sawtooth(0.5, 2);
    auto run = [&](int, double q0, double u) {
        return packet_run(hs, cls, torusqc::Formalism::ContinuousAB, q0, u, 4,
                          23);
    };
    const std::uint64_t seed = 99;
    const FidelitySeries ens = torusqc::ensemble_average(run, 1, seed);

    auto gen = torusqc::detail::substream(seed, 0);
    const double q0 = torusqc::detail::uniform01(gen);
    const double u = torusqc::detail::uniform01(gen);
    const FidelitySeries bare = run(0, q0, u);

    REQUIRE(ens.times == bare.times);
    CHECK(ens.F == bare.F);
    CHECK(ens.G == bare.G);
    CHECK(ens.P_minus == bare.P_minus);
    for (double e : ens.stderr_G) CHECK(e == 0.0);
    CHECK(ens.ensemble_size == 1);
}

TEST_CASE("Ensemble mean and standard error match a hand fold",
          "[qcf][ensemble]") {
    const HilbertSpec hs(11, 2);
    const ClassicalMapSpec cls = ClassicalMapSpec::sawtooth(0.5, 2);
    const int n = 6;
    const std::uint64_t seed = 7;
    auto run = [&](int, double q0, double u) {
        return packet_run(hs, cls, torusqc::Formalism::ContinuousAB, q0, u, 4,
                          23);
    };
    const FidelitySeries ens = torusqc::ensemble_average(run, n, seed);

    // identical member draws, identical index-order accumulation
    std::vector<FidelitySeries> members;
    for (int member = 0; member < n; ++member) {
        auto gen = torusqc::detail::substream(seed, static_cast<std::uint64_t>(member));
        const double q0 = torusqc::detail::uniform01(gen);
        const double u = torusqc::detail::uniform01(gen);
        members.push_back(run(member, q0, u));
    }
    for (std::size_t i = 0; i < ens.times.size(); ++i) {
        double sf = 0.0, sg = 0.0, sp = 0.0, sg2 = 0.0;
        for (const FidelitySeries& m : members) {
            sf += m.F[i];
            sg += m.G[i];
            sp += m.P_minus[i];
            sg2 += m.G[i] * m.G[i];
        }
        const double nd = static_cast<double>(n);
        const double mean_g = sg / nd;
        CHECK(ens.F[i] == sf / nd);
        if (i > 0) CHECK(ens.G[i] == mean_g);
        CHECK(ens.P_minus[i] == sp / nd);
        const double var =
            std::max(0.0, (sg2 - nd * mean_g * mean_g) / (nd - 1.0));
        CHECK(ens.stderr_G[i] == std::sqrt(var / nd));
    }
}

TEST_CASE("Larger ensembles shrink the error bars roughly as one over "
          "root n",
          "[qcf][ensemble]") {
    const HilbertSpec hs(11, 2);
    const ClassicalMapSpec cls = ClassicalMapSpec::sawtooth(0.5, 2);
    auto run = [&](int, double q0, double u) {
        return packet_run(hs, cls, torusqc::Formalism::ContinuousAB, q0, u, 4,
                          23);
    };
    const FidelitySeries small = torusqc::ensemble_average(run, 4, 512);
    const FidelitySeries large = torusqc::ensemble_average(run, 16, 512);
    // mid-decay point where member-to-member spread is genuine
    const std::size_t t = 2;
    REQUIRE(small.stderr_G[t] > 0.0);
    REQUIRE(large.stderr_G[t] > 0.0);
    const double ratio = small.stderr_G[t] / large.stderr_G[t];
    INFO("stderr ratio (expected near 2): " << ratio);
    CHECK(ratio > 1.0);
    CHECK(ratio < 4.0);
}

TEST_CASE("Series are bit-identical across worker counts", "[qcf][threads]") {
    const HilbertSpec hs_c(11, 2);
    const HilbertSpec hs_d(16, 1);
    const ClassicalMapSpec cls = ClassicalMapSpec::sawtooth(0.5, 2);
    const ClassicalMapSpec cls_d = ClassicalMapSpec::sawtooth(0.9, 1);
    auto run_all = [&]() {
        std::vector<FidelitySeries> out;
        out.push_back(packet_run(hs_c, cls, torusqc::Formalism::ContinuousAB,
                                 0.3, 0.45, 5, 23));
        out.push_back(packet_run(hs_d, cls_d, torusqc::Formalism::DiscreteMiquel,
                                 0.3, 0.45, 5, 0));
        auto run = [&](int, double q0, double u) {
            return packet_run(hs_c, cls, torusqc::Formalism::ContinuousAB, q0,
                              u, 4, 23);
        };
        out.push_back(torusqc::ensemble_average(run, 3, 11));
        return out;
    };

    setenv("TORUSQC_THREADS", "1", 1);
    const std::vector<FidelitySeries> serial = run_all();
    setenv("TORUSQC_THREADS", "5", 1);
    const std::vector<FidelitySeries> threaded = run_all();
    unsetenv("TORUSQC_THREADS");

    REQUIRE(serial.size() == threaded.size());
    for (std::size_t k = 0; k < serial.size(); ++k) {
        INFO("series " << k);
        CHECK(same_series(serial[k], threaded[k]));
    }
}

TEST_CASE("Decay fit recovers a synthetic exponential exactly", "[qcf][fit]") {
    const int N = 101;
    const double a = 0.3;
    const double b = 0.45;
    FidelitySeries s;
    s.formalism = torusqc::Formalism::ContinuousAB;
    for (int t = 0; t <= 20; ++t) {
        s.times.push_back(t);
        const double g = std::exp(a - b * t);
        s.G.push_back(g);
        s.F.push_back(g);
        s.P_minus.push_back(0.0);
        s.stderr_G.push_back(0.0);
    }

    SECTION("free fit on the default window") {
        const DecayFit fit = torusqc::fit_decay(s, std::nullopt, N);
        // window 5/N <= G <= 1/2 selects t = 3..7
        CHECK(fit.window_lo == 3);
        CHECK(fit.window_hi == 7);
        CHECK(std::abs(fit.slope - b) < 1e-12);
        CHECK(std::abs(fit.intercept - a) < 1e-12);
        CHECK(std::abs(fit.T1 - a / b) < 1e-12);
        CHECK(std::abs(fit.T2 - (a + std::log(101.0)) / b) < 1e-12);
        CHECK(fit.residual < 1e-13);
        CHECK(!fit.has_constrained);
        CHECK(std::abs(fit.slope * (fit.T2 - fit.T1) - std::log(101.0)) < 1e-10);
    }
    SECTION("window overrides take effect") {
        // g_hi above G(0) = e^a admits every point into the window.
        const DecayFit fit =
            torusqc::fit_decay(s, std::nullopt, N, 1e-9, 1.5e0);
        CHECK(fit.window_lo == 0);
        CHECK(fit.window_hi == 20);
        CHECK(std::abs(fit.slope - b) < 1e-12);
    }
    SECTION("constrained fit pins the slope and refits the intercept") {
        const double lam = 0.5;
        const DecayFit fit = torusqc::fit_decay(s, lam, N);
        REQUIRE(fit.has_constrained);
        CHECK(fit.constrained_slope == lam);
        // c = mean over the window t=3..7 of (log G + lam t) = a + (lam-b)*mean(t)
        const double c = a + (lam - b) * 5.0;
        CHECK(std::abs(fit.constrained_intercept - c) < 1e-12);
        CHECK(std::abs(fit.constrained_T1 - c / lam) < 1e-12);
        CHECK(std::abs(fit.constrained_T2 - (c + std::log(101.0)) / lam) < 1e-12);
        CHECK(std::abs(fit.constrained_slope *
                           (fit.constrained_T2 - fit.constrained_T1) -
                       std::log(101.0)) < 1e-10);
    }
    SECTION("the time-scale identity holds on wiggly data too") {
        FidelitySeries noisy = s;
        for (std::size_t i = 0; i < noisy.G.size(); ++i)
            noisy.G[i] *= (i % 2 == 0) ? 1.001 : 0.999;
        const DecayFit fit = torusqc::fit_decay(noisy, std::nullopt, N);
        CHECK(std::abs(fit.slope * (fit.T2 - fit.T1) - std::log(101.0)) < 1e-10);
        CHECK(fit.residual > 0.0);
    }
    SECTION("a flat series leaves the window empty") {
        FidelitySeries flat;
        for (int t = 0; t <= 10; ++t) {
            flat.times.push_back(t);
            flat.G.push_back(1.0);
        }
        bool threw = false;
        try {
            torusqc::fit_decay(flat, std::nullopt, N);
        } catch (const std::runtime_error& e) {
            threw = true;
            CHECK(std::string(e.what()).find("fit unavailable") !=
                  std::string::npos);
        }
        CHECK(threw);
    }
    SECTION("dimension below two is rejected") {
        CHECK_THROWS_AS(torusqc::fit_decay(s, std::nullopt, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("Echoed grid at time zero is the plain Wigner grid", "[qcf][echo]") {
    const HilbertSpec hs(11, 2);
    const QuantumMapSpec map(ClassicalMapSpec::sawtooth(0.5, 2), hs);
    const QuantumState psi = torusqc::coherent_state({0.3, 0.45, 1.0}, hs);
    const torusqc::WignerGrid direct = torusqc::wigner_continuous(psi);
    const torusqc::WignerGrid echoed = torusqc::echoed_wigner(psi, map, 0);
    REQUIRE(echoed.values().size() == direct.values().size());
    for (std::size_t i = 0; i < direct.values().size(); ++i)
        CHECK(echoed.values()[i] == direct.values()[i]);
}

TEST_CASE("Echoed grid conserves its lattice sum before filamentation",
          "[qcf][echo]") {
    const HilbertSpec hs(101, 2);
    const QuantumMapSpec map(ClassicalMapSpec::sawtooth(0.5, 2), hs);
    const QuantumState psi = torusqc::coherent_state({0.5, 0.25, 1.0}, hs);
    const double base = torusqc::echoed_wigner(psi, map, 0).lattice_sum();
    REQUIRE(std::abs(base - 1.0) < 1e-8);
    for (int t = 1; t <= 3; ++t) {
        const double s = torusqc::echoed_wigner(psi, map, t).lattice_sum();
        INFO("t " << t << " lattice sum " << s);
        CHECK(std::abs(s - base) < 0.1 * std::abs(base));
    }
}

TEST_CASE("Identical maps give a trivial Loschmidt comparison", "[qcf][echo]") {
    const HilbertSpec hs(31, 2);
    const QuantumMapSpec map(ClassicalMapSpec::sawtooth(0.5, 2), hs);
    const QuantumState psi = torusqc::coherent_state({0.3, 0.45, 1.0}, hs);
    const GaussianDensity d = torusqc::make_density(0.3, 0.9, 1.0, hs, 93);
    const auto records = torusqc::loschmidt_echoes(psi, d, map, map, 6, 93);
    REQUIRE(records.size() == 7);
    const double raw_qle0 = records.front().raw_QLE;
    // the continuous extension integrates W^2 to L/N^3, conserved in t
    CHECK(std::abs(raw_qle0 - 2.0 / (31.0 * 31.0 * 31.0)) <
          1e-10 * raw_qle0);
    for (const EchoRecord& r : records) {
        INFO("t " << r.t);
        CHECK(std::abs(r.F_CLE - 1.0) < 1e-12);
        CHECK(std::abs(r.F_QLE - 1.0) < 1e-12);
        CHECK(r.lhs < 1e-7);
        CHECK(r.residual == r.rhs - r.lhs);
        CHECK(std::abs(r.raw_QLE - raw_qle0) < 1e-10 * raw_qle0);
    }
}

TEST_CASE("Loschmidt records start from perfect overlap and respect the "
          "bound early on",
          "[qcf][echo]") {
    const HilbertSpec hs(101, 2);
    const QuantumMapSpec map0(ClassicalMapSpec::sawtooth(0.5, 2), hs);
    const QuantumMapSpec map1(ClassicalMapSpec::sawtooth(0.51, 2), hs);
    const QuantumState psi = torusqc::coherent_state({0.3, 0.45, 1.0}, hs);
    const GaussianDensity d = torusqc::make_density(0.3, 0.9, 1.0, hs, 303);
    const auto records = torusqc::loschmidt_echoes(psi, d, map0, map1, 4);

    const EchoRecord& r0 = records.front();
    CHECK(r0.t == 0);
    CHECK(std::abs(r0.F_CLE - 1.0) < 1e-12);
    CHECK(std::abs(r0.F_QLE - 1.0) < 1e-12);
    // lhs is a square root of log-of-fidelity terms, so roundoff of order
    // eps in the fidelities surfaces as sqrt(eps) here.
    CHECK(r0.lhs >= 0.0);
    CHECK(r0.lhs < 1e-7);
    CHECK(r0.F_QCF_0 == r0.F_QCF_eps); // identical state, identical nodes

    for (const EchoRecord& r : records) {
        INFO("t " << r.t);
        CHECK(r.residual >= -1e-6);
    }
}

TEST_CASE("Both displayed forms of the overlap integral agree", "[qcf]") {
    // F(t) as quadrature of W~^t against rho^t equals the same integral
    // after transporting the Wigner extension forward and the density back
    // to t = 0; the second form is evaluated with the echoed grid on the
    // N x N lattice, so agreement is limited by quadrature, not roundoff:
    // once the map filaments the density below the lattice spacing (around
    // the Ehrenfest time, log N / lambda ~ 6.6 here) the coarser node set
    // degrades, so only the early steps are held to a tight band.
    const HilbertSpec hs(101, 2);
    const ClassicalMapSpec cls = ClassicalMapSpec::sawtooth(0.5, 2);
    const QuantumMapSpec map(cls, hs);
    const double q0 = 0.5, u = 0.25, p0 = 0.5;
    const QuantumState psi = torusqc::coherent_state({q0, u, 1.0}, hs);
    const GaussianDensity d = torusqc::make_density(q0, p0, 1.0, hs, 303);
    const FidelitySeries s = torusqc::qcf_continuous(psi, d, map, 5, 303);

    const int N = 101;
    for (int t = 0; t <= 3; ++t) {
        const torusqc::WignerGrid echoed = torusqc::echoed_wigner(psi, map, t);
        double rhs = 0.0;
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < N; ++m)
                rhs += echoed.at(n, m) *
                       torusqc::density_eval(
                           d, {static_cast<double>(n) / N,
                               static_cast<double>(m) * 2.0 / N});
        rhs *= 2.0 / (static_cast<double>(N) * static_cast<double>(N));
        INFO("t " << t << " lhs " << s.F[static_cast<std::size_t>(t)] << " rhs "
                  << rhs);
        CHECK(std::abs(rhs - s.F[static_cast<std::size_t>(t)]) <
              5e-2 * std::abs(s.F[static_cast<std::size_t>(t)]));
    }
}

TEST_CASE("Fidelity engines reject mismatched or invalid input",
          "[qcf][validation]") {
    const HilbertSpec hs(31, 2);
    const QuantumMapSpec map(ClassicalMapSpec::sawtooth(0.5, 2), hs);
    const QuantumState psi = torusqc::coherent_state({0.3, 0.45, 1.0}, hs);
    const GaussianDensity d = torusqc::make_density(0.3, 0.9, 1.0, hs, 93);

    // resolution below the sampling threshold 2N+1
    CHECK_THROWS_AS(torusqc::qcf_continuous(psi, d, map, 3, 62),
                    std::invalid_argument);
    // negative horizon
    CHECK_THROWS_AS(torusqc::qcf_continuous(psi, d, map, -1, 93),
                    std::invalid_argument);
    CHECK_THROWS_AS(torusqc::qcf_discrete(psi, d, map, -1),
                    std::invalid_argument);
    // density built for a different space
    const GaussianDensity other =
        torusqc::make_density(0.3, 0.45, 1.0, HilbertSpec(33, 2), 99);
    CHECK_THROWS_AS(torusqc::qcf_continuous(psi, other, map, 3, 93),
                    std::invalid_argument);
    // even N cannot use the continuous formalism
    const HilbertSpec even(32, 1);
    const QuantumMapSpec even_map(ClassicalMapSpec::sawtooth(0.5, 1), even);
    const QuantumState even_psi = torusqc::coherent_state({0.3, 0.45, 1.0}, even);
    const GaussianDensity even_d = torusqc::make_density(0.3, 0.45, 1.0, even, 65);
    CHECK_THROWS_AS(torusqc::qcf_continuous(even_psi, even_d, even_map, 3, 65),
                    std::invalid_argument);
    CHECK_THROWS_AS(torusqc::echoed_wigner(even_psi, even_map, 1),
                    std::invalid_argument);
    // state living in a different space from the map
    CHECK_THROWS_AS(torusqc::qcf_discrete(even_psi, d, map, 3),
                    std::invalid_argument);
    // empty ensembles are meaningless
    auto run = [&](int, double, double) { return FidelitySeries{}; };
    CHECK_THROWS_AS(torusqc::ensemble_average(run, 0, 1),
                    std::invalid_argument);
    // echo maps must share the Hilbert space
    const QuantumMapSpec map_small(ClassicalMapSpec::sawtooth(0.5, 2),
                                   HilbertSpec(33, 2));
    CHECK_THROWS_AS(torusqc::loschmidt_echoes(psi, d, map, map_small, 3),
                    std::invalid_argument);
}
