#include "twinlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace twinlab {

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TWINLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  int threads) {
    const int nt = std::min<std::size_t>(thread_count(threads), std::max<std::size_t>(n, 1));
    if (nt <= 1 || n < 1024) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::size_t b = std::min(n, t * chunk);
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace twinlab
