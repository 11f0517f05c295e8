#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace tourlab {

// Worker count: explicit argument > TLAB_JOBS > hardware. Worker count may
// only affect wall time; all merges below are index-ordered.
inline int default_jobs() {
    if (const char* env = std::getenv("TLAB_JOBS")) {
        int j = std::atoi(env);
        if (j >= 1) return j;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

// Runs f(i) for i in [0, count) across workers; results land in slot i.
template <typename R>
std::vector<R> parallel_map(int count, int jobs, const std::function<R(int)>& f) {
    std::vector<R> out(count);
    if (count == 0) return out;
    if (jobs <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    int workers = std::min(jobs, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            for (int i = w; i < count; i += workers) out[i] = f(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

} // namespace tourlab
