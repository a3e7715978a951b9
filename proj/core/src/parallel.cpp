#include "zsb/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace zsb {

int thread_count() {
    int hw = int(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("ZSB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
}

void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    int workers = std::min(thread_count(), n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::pair<int, std::exception_ptr>> errors;
    std::mutex err_mtx;
    auto run = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                errors.emplace_back(i, std::current_exception());
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (!errors.empty()) {
        auto first = errors.front();
        for (const auto& e : errors)
            if (e.first < first.first) first = e;
        std::rethrow_exception(first.second);
    }
}

} // namespace zsb
