#ifndef ECOPLUS_PARALLEL_HPP
#define ECOPLUS_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ecoplus {

/// Worker count: explicit request, else ECOPLUS_THREADS, else hardware.
inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ECOPLUS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(0..n-1) on up to `threads` workers. Callers write results into
/// index-addressed slots, so the outcome does not depend on scheduling.
/// The first exception thrown by any worker is rethrown.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::min(resolve_thread_count(threads), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace ecoplus

#endif // ECOPLUS_PARALLEL_HPP
