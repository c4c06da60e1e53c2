#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sads_dirac {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/**
 * @brief Calls body(i) for i in [0, n) on up to `threads` workers.
 * The first exception thrown by a body is rethrown after all workers join.
 */
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    const unsigned t = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            if (failed) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) first = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace sads_dirac
