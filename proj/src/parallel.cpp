#include "rankpi/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rankpi {

unsigned worker_count() {
    if (const char *env = std::getenv("RANKPI_THREADS")) {
        try {
            const int value = std::stoi(env);
            if (value > 0) {
                return static_cast<unsigned>(value);
            }
        } catch (const std::exception &) {
            // fall through to the hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {
thread_local bool inside_region = false;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn) {
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(worker_count(), count));
    // Nested regions run on the calling worker.
    if (workers <= 1 || inside_region) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            inside_region = true;
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace rankpi
