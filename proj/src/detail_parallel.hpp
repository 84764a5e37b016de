#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace spectest::detail {

// Runs body(i) for i = 0..count-1 on up to `workers` threads. Work items are
// claimed through a shared counter; callers must make item results
// independent of scheduling (e.g. write into preassigned slots).
inline void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    auto run = [&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    };
    const int used = std::min(workers, count);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(used - 1));
    for (int w = 1; w < used; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

} // namespace spectest::detail
