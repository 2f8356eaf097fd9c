#ifndef EPKIT_PARALLEL_HPP
#define EPKIT_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace epkit {

/// Runs fn(i) for i in [0, n) on a bounded pool.  Results are whatever fn
/// writes into caller-owned slots, so the merged output is independent of
/// scheduling; the lowest-index exception wins and is rethrown.
template <class F>
void parallel_for(int workers, int n, F&& fn) {
    if (n <= 0) return;
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (int i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

/// Deterministic parallel map: out[i] = fn(i).
template <class T, class F>
std::vector<T> parallel_map(int workers, int n, F&& fn) {
    std::vector<T> out(static_cast<std::size_t>(std::max(0, n)));
    parallel_for(workers, n, [&](int i) { out[static_cast<std::size_t>(i)] = fn(i); });
    return out;
}

}  // namespace epkit

#endif
