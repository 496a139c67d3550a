// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
//
// Infrastructure tests: FFT kernels (radix-2 and arbitrary length), modular
// reduction helpers, seeded substreams, and the ordered parallel partition.
#include <catch2/catch_amalgamated.hpp>

#include <torusqc/detail/fft.hpp>
#include <torusqc/detail/modular.hpp>
#include <torusqc/detail/parallel.hpp>
#include <torusqc/detail/rng.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace {

using cplx = std::complex<double>;

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen = torusqc::detail::substream(seed, 0);
    std::vector<cplx> v(n);
    for (auto& x : v)
        x = cplx{2.0 * torusqc::detail::uniform01(gen) - 1.0,
                 2.0 * torusqc::detail::uniform01(gen) - 1.0};
    return v;
}

// O(n^2) reference transform with the same (unnormalized, e^{-i2pi jk/n})
// forward kernel as the library transform.
std::vector<cplx> naive_dft(const std::vector<cplx>& in, int sign) {
    const std::size_t n = in.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * std::numbers::pi *
                               static_cast<double>(j * k % n) /
                               static_cast<double>(n);
            acc += in[j] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace

TEST_CASE("forward transform matches the quadratic reference at many lengths") {
    for (std::size_t n :
         {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{4},
          std::size_t{5}, std::size_t{7}, std::size_t{8}, std::size_t{11},
          std::size_t{16}, std::size_t{31}, std::size_t{100}, std::size_t{101},
          std::size_t{128}}) {
        std::vector<cplx> v = random_signal(n, 41 + n);
        std::vector<cplx> expected = naive_dft(v, -1);
        torusqc::detail::fft_forward(v);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            worst = std::max(worst, std::abs(v[k] - expected[k]));
        INFO("length " << n);
        CHECK(worst < 1e-11 * static_cast<double>(n));
    }
}

TEST_CASE("backward transform is the unnormalized inverse") {
    for (std::size_t n : {std::size_t{6}, std::size_t{13}, std::size_t{64},
                          std::size_t{101}}) {
        std::vector<cplx> v = random_signal(n, 97 + n);
        const std::vector<cplx> original = v;
        torusqc::detail::fft_forward(v);
        torusqc::detail::fft_backward(v);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            worst = std::max(
                worst, std::abs(v[k] - static_cast<double>(n) * original[k]));
        INFO("length " << n);
        CHECK(worst < 1e-11 * static_cast<double>(n));
    }
}

TEST_CASE("backward transform matches the conjugate-kernel reference") {
    std::vector<cplx> v = random_signal(31, 7);
    std::vector<cplx> expected = naive_dft(v, +1);
    torusqc::detail::fft_backward(v);
    double worst = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k)
        worst = std::max(worst, std::abs(v[k] - expected[k]));
    CHECK(worst < 1e-11);
}

TEST_CASE("wrap reduces into [0, period) and snaps the period endpoint") {
    CHECK(torusqc::detail::wrap(3.5, 2.0) == Catch::Approx(1.5).margin(1e-15));
    CHECK(torusqc::detail::wrap(-0.25, 1.0) ==
          Catch::Approx(0.75).margin(1e-15));
    CHECK(torusqc::detail::wrap(2.0, 2.0) == 0.0);
    // A value that rounds up to the period must wrap to zero, not escape
    // the fundamental domain.
    const double almost = std::nextafter(1.0, 0.0);
    const double wrapped = torusqc::detail::wrap_unit(almost + 2.0);
    CHECK(wrapped >= 0.0);
    CHECK(wrapped < 1.0);
    CHECK(torusqc::detail::wrap_unit(-1e-18) < 1.0);
    CHECK(torusqc::detail::wrap_unit(-1e-18) >= 0.0);
}

TEST_CASE("mod_index reduces negative and large indices") {
    CHECK(torusqc::detail::mod_index(-1, 5) == 4);
    CHECK(torusqc::detail::mod_index(5, 5) == 0);
    CHECK(torusqc::detail::mod_index(-10, 5) == 0);
    CHECK(torusqc::detail::mod_index(12, 5) == 2);
}

TEST_CASE("substreams are reproducible and index-separated") {
    std::mt19937_64 a = torusqc::detail::substream(123, 7);
    std::mt19937_64 b = torusqc::detail::substream(123, 7);
    std::mt19937_64 c = torusqc::detail::substream(123, 8);
    bool identical = true, distinct = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t va = a(), vb = b(), vc = c();
        identical = identical && (va == vb);
        distinct = distinct || (va != vc);
    }
    CHECK(identical);
    CHECK(distinct);
}

TEST_CASE("uniform01 stays inside the half-open unit interval") {
    std::mt19937_64 gen = torusqc::detail::substream(5, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = torusqc::detail::uniform01(gen);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("worker_count follows the environment variable") {
    setenv("TORUSQC_THREADS", "3", 1);
    CHECK(torusqc::detail::worker_count() == 3u);
    setenv("TORUSQC_THREADS", "1", 1);
    CHECK(torusqc::detail::worker_count() == 1u);
    unsetenv("TORUSQC_THREADS");
    CHECK(torusqc::detail::worker_count() >= 1u);
}

TEST_CASE("parallel partition covers the range once, in disjoint blocks") {
    for (unsigned workers : {1u, 2u, 3u, 7u, 16u}) {
        const std::size_t n = 101;
        std::vector<int> hits(n, 0);
        torusqc::detail::parallel_for(
            n,
            [&hits](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) hits[i] += 1;
            },
            workers);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(hits[i] == 1);
    }
}

TEST_CASE("per-slot parallel writes reduce identically for any worker count") {
    const std::size_t n = 1000;
    auto run = [n](unsigned workers) {
        std::vector<double> slot(n);
        torusqc::detail::parallel_for(
            n,
            [&slot](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i)
                    slot[i] = std::sin(0.001 * static_cast<double>(i * i));
            },
            workers);
        double acc = 0.0;
        for (double v : slot) acc += v;  // fixed fold order
        return acc;
    };
    const double serial = run(1);
    for (unsigned workers : {2u, 4u, 8u}) {
        // Bit-identical, not approximately equal: same slots, same fold order.
        REQUIRE(run(workers) == serial);
    }
}
