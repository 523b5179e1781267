#ifndef SIMZ_PARALLEL_HPP
#define SIMZ_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace simz {

// Worker count: explicit request, else SIMZ_THREADS, else hardware.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SIMZ_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Run body(i) for i in [0, count) across workers.  Each index is processed
// exactly once; the work must write only to its own slot.
inline void parallel_for(long count, int threads, const std::function<void(long)>& body) {
    threads = std::min<long>(resolve_threads(threads), count);
    if (threads <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<long> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace simz

#endif
