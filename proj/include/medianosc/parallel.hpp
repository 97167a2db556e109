#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace medianosc {

/// Worker threads to use: hardware concurrency, capped by MEDIANOSC_THREADS when set.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MEDIANOSC_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
            // unparsable values leave the default in place
        }
    }
    return n;
}

/// Runs body(begin, end, worker) over contiguous chunks of [0, n). Callers keep
/// per-worker state indexed by `worker` and reduce it afterwards.
template <typename Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        body(std::size_t{0}, n, 0u);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, w * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, begin, end, w] {
            try {
                body(begin, end, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace medianosc
