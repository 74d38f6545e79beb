#include "parcelca/parallel.hpp"

#include <algorithm>

namespace parcelca {

namespace {
std::atomic<int> g_workers{0};
}

void set_default_workers(int n) { g_workers.store(n < 0 ? 0 : n); }

int default_workers() {
    int n = g_workers.load();
    if (n <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n;
}

void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t)>& fn, int workers) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t nchunks = (n + chunk_size - 1) / chunk_size;
    int nw = workers > 0 ? workers : default_workers();
    nw = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(nw), nchunks));

    if (nw <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) {
            const std::size_t b = c * chunk_size;
            fn(b, std::min(n, b + chunk_size));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    auto work = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= nchunks || failed.load()) return;
            const std::size_t b = c * chunk_size;
            try {
                fn(b, std::min(n, b + chunk_size));
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    for (int t = 0; t < nw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failed.load() && first_error) std::rethrow_exception(first_error);
}

} // namespace parcelca
