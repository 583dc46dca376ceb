#include "diraclab/parallel.hpp"

#include <cstdlib>
#include <thread>

namespace diraclab {

int thread_count() {
    static const int n = [] {
        if (const char* e = std::getenv("DIRACLAB_THREADS")) {
            const int v = std::atoi(e);
            if (v > 0) return v;
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc ? int(hc) : 1;
    }();
    return n;
}

void parallel_for_slabs(std::size_t n,
                        const std::function<void(std::size_t, std::size_t, int)>& body) {
    const int nw = thread_count();
    if (nw <= 1 || n < 4096) {
        body(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(nw));
    const std::size_t chunk = (n + std::size_t(nw) - 1) / std::size_t(nw);
    for (int w = 0; w < nw; ++w) {
        const std::size_t b = std::min(n, std::size_t(w) * chunk);
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e, w] { body(b, e, w); });
    }
    for (auto& t : pool) t.join();
}

double parallel_reduce(std::size_t n,
                       const std::function<double(std::size_t, std::size_t)>& slab_sum) {
    if (n == 0) return 0.0;
    // fixed slab count, independent of the worker count, so the summation
    // order (and therefore the rounding) never depends on DIRACLAB_THREADS
    constexpr std::size_t kSlabs = 64;
    if (n < 4096) return slab_sum(0, n);
    const std::size_t chunk = (n + kSlabs - 1) / kSlabs;
    std::vector<double> partial(kSlabs, 0.0);

    const int nw = thread_count();
    if (nw <= 1) {
        for (std::size_t s = 0; s < kSlabs; ++s) {
            const std::size_t b = std::min(n, s * chunk), e = std::min(n, b + chunk);
            if (b < e) partial[s] = slab_sum(b, e);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(nw));
        for (int w = 0; w < nw; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t s = std::size_t(w); s < kSlabs; s += std::size_t(nw)) {
                    const std::size_t b = std::min(n, s * chunk), e = std::min(n, b + chunk);
                    if (b < e) partial[s] = slab_sum(b, e);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    double s = 0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace diraclab
