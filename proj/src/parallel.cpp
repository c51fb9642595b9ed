#include "parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace purelab {

void parallel_for(std::int64_t n, int workers,
                  const std::function<void(std::int64_t, std::int64_t)>& task) {
    if (n <= 0) return;
    workers = std::max(1, workers);
    if (workers == 1 || n == 1) {
        task(0, n);
        return;
    }
    const std::int64_t k = std::min<std::int64_t>(workers, n);
    std::mutex mu;
    std::int64_t err_begin = -1;
    std::exception_ptr err;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(k));
    for (std::int64_t w = 0; w < k; ++w) {
        const std::int64_t begin = n * w / k;
        const std::int64_t end = n * (w + 1) / k;
        threads.emplace_back([&, begin, end] {
            try {
                task(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (err_begin < 0 || begin < err_begin) {
                    err_begin = begin;
                    err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace purelab
