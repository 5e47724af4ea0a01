#include "ellipsoid_lab/parallel.hpp"

#include "ellipsoid_lab/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ellipsoid_lab {

std::size_t resolve_worker_count(std::size_t requested) {
    std::size_t workers = requested;
    if (const char* env = std::getenv(kThreadsEnvVar); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            throw UsageError(std::string(kThreadsEnvVar) + " must be a non-negative integer, got '" + env + "'");
        }
        workers = static_cast<std::size_t>(value);
    }
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    return workers;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& thread : pool) {
        thread.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace ellipsoid_lab
