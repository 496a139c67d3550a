// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace torusqc::detail {

/// Number of worker threads.  Controlled by the TORUSQC_THREADS environment
/// variable; falls back to the hardware concurrency.  Always at least 1.
inline unsigned worker_count() {
    if (const char* env = std::getenv("TORUSQC_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

/// Run body(begin, end) over a static block partition of [0, n).
///
/// Blocks are contiguous and assigned in index order, so any caller that
/// writes results into per-index slots and folds them in index order gets
/// bit-identical output for every worker count.  Exceptions from workers are
/// rethrown (first one wins) after all threads have joined.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = 0) {
    if (workers == 0) workers = worker_count();
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        body(static_cast<std::size_t>(0), n);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);

    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);

    const std::size_t chunk = n / workers;
    const std::size_t rem = n % workers;
    std::size_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t len = chunk + (w < rem ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&body, &errors, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace torusqc::detail
