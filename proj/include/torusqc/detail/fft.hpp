// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace torusqc::detail {

using cplx = std::complex<double>;

/// Precomputed machinery for a fixed-size complex FFT.
///
/// forward() evaluates X_k = sum_j x_j e^{-2*pi*i*j*k/n} (unnormalized);
/// backward() is the conjugate kernel, also unnormalized, so
/// backward(forward(x)) == n * x.  Power-of-two sizes run the iterative
/// radix-2 kernel; every other size goes through Bluestein's chirp-z
/// reduction to a power-of-two convolution, which keeps the cost at
/// O(n log n) for the prime and odd sizes this library lives on.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("FftPlan: size must be positive");
        pow2_ = (n & (n - 1)) == 0;
        if (pow2_) {
            init_radix2(n);
        } else {
            init_bluestein();
        }
    }

    std::size_t size() const noexcept { return n_; }

    void forward(cplx* data) const {
        if (pow2_) {
            radix2(data, /*inverse=*/false);
        } else {
            bluestein(data);
        }
    }

    void backward(cplx* data) const {
        if (pow2_) {
            radix2(data, /*inverse=*/true);
        } else {
            // Conjugation identity: ifft(x) = conj(fft(conj(x))).
            for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
            bluestein(data);
            for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
        }
    }

private:
    void init_radix2(std::size_t n) {
        bitrev_.resize(n);
        bitrev_[0] = 0;
        for (std::size_t i = 1; i < n; ++i)
            bitrev_[i] = (bitrev_[i >> 1] >> 1) | ((i & 1) ? n >> 1 : 0);
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(n);
            twiddle_[k] = std::polar(1.0, angle);
        }
    }

    void radix2(cplx* a, bool inverse) const {
        const std::size_t n = n_;
        for (std::size_t i = 0; i < n; ++i)
            if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t stride = n / len;
            const std::size_t half = len >> 1;
            for (std::size_t blk = 0; blk < n; blk += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    cplx w = twiddle_[j * stride];
                    if (inverse) w = std::conj(w);
                    cplx u = a[blk + j];
                    cplx v = a[blk + j + half] * w;
                    a[blk + j] = u + v;
                    a[blk + j + half] = u - v;
                }
            }
        }
    }

    void init_bluestein() {
        const std::size_t n = n_;
        std::size_t m = 1;
        while (m < 2 * n - 1) m <<= 1;
        m_ = m;
        sub_ = std::make_unique<FftPlan>(m);

        // Chirp w_j = e^{-i*pi*j^2/n}.  The exponent integer is reduced
        // mod 2n before converting to an angle so the argument handed to
        // polar() stays small and fully accurate for any j.
        chirp_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            std::uint64_t j2 = (static_cast<std::uint64_t>(j) * j) % (2 * n);
            double angle = -std::numbers::pi * static_cast<double>(j2) /
                           static_cast<double>(n);
            chirp_[j] = std::polar(1.0, angle);
        }

        // b_j = conj(w_j) laid out circularly: b_0 = 1, b_j = b_{m-j}.
        std::vector<cplx> b(m, cplx(0.0, 0.0));
        b[0] = cplx(1.0, 0.0);
        for (std::size_t j = 1; j < n; ++j) {
            b[j] = std::conj(chirp_[j]);
            b[m - j] = b[j];
        }
        sub_->forward(b.data());
        bfft_ = std::move(b);
    }

    void bluestein(cplx* data) const {
        const std::size_t n = n_;
        const std::size_t m = m_;
        std::vector<cplx> a(m, cplx(0.0, 0.0));
        for (std::size_t j = 0; j < n; ++j) a[j] = data[j] * chirp_[j];
        sub_->forward(a.data());
        for (std::size_t j = 0; j < m; ++j) a[j] *= bfft_[j];
        sub_->backward(a.data());
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n; ++k)
            data[k] = chirp_[k] * (a[k] * inv_m);
    }

    std::size_t n_;
    bool pow2_ = false;
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> twiddle_;
    std::size_t m_ = 0;
    std::vector<cplx> chirp_;
    std::vector<cplx> bfft_;
    std::unique_ptr<FftPlan> sub_;
};

/// Per-thread plan cache.  Plans are immutable once built, but caching them
/// thread-locally keeps hot loops allocation-free without any locking.
inline const FftPlan& plan_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
    return *it->second;
}

/// Unnormalized transforms over std::vector buffers (convenience wrappers).
inline void fft_forward(std::vector<cplx>& v) { plan_for(v.size()).forward(v.data()); }
inline void fft_backward(std::vector<cplx>& v) { plan_for(v.size()).backward(v.data()); }

} // namespace torusqc::detail
