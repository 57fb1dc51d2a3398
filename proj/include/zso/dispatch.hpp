#ifndef ZSO_DISPATCH_HPP
#define ZSO_DISPATCH_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gateway.hpp"
#include "response_cache.hpp"

namespace zso {

struct WorkItem {
    RowId row_id;
    std::string prompt;
};

/// Runs every item through the cache and backend with at most `max_in_flight`
/// concurrent requests. Results come back in input order whatever the
/// completion order was.
inline std::vector<RawResponse> dispatch_all(const std::vector<WorkItem>& items, Backend& backend,
                                             ResponseCache& cache, std::size_t max_in_flight)
{
    std::vector<RawResponse> results(items.size());
    if (items.empty()) return results;
    const std::size_t workers = std::clamp<std::size_t>(max_in_flight, 1, items.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto work = [&] {
        for (;;) {
            if (stop.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            try {
                results[i] = cached_classify(items[i].prompt, items[i].row_id, backend, cache);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                stop = true;
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

} // namespace zso

#endif // ZSO_DISPATCH_HPP
