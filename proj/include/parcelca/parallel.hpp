#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace parcelca {

/// Process-wide default worker count. 0 means hardware concurrency.
void set_default_workers(int n);
int default_workers();

/// Runs fn(begin, end) over fixed-size index chunks using up to `workers`
/// threads. Chunk boundaries depend only on n and chunk_size, never on the
/// worker count, so per-index writes and per-chunk partial results are
/// reproducible at any parallelism level.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t)>& fn,
                     int workers = 0);

/// Parallel loop over [0, n). fn must only write state owned by index i.
template <typename F>
void parallel_for(std::size_t n, F&& fn, int workers = 0) {
    parallel_chunks(
        n, 1024,
        [&fn](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) fn(i);
        },
        workers);
}

/// Deterministic parallel reduction: partial results are produced per fixed
/// chunk, then combined sequentially in chunk order.
template <typename T, typename ChunkF, typename CombineF>
T parallel_reduce(std::size_t n, std::size_t chunk_size, T init, ChunkF&& per_chunk,
                  CombineF&& combine, int workers = 0) {
    if (n == 0) return init;
    const std::size_t nchunks = (n + chunk_size - 1) / chunk_size;
    std::vector<T> partial(nchunks, init);
    parallel_chunks(
        n, chunk_size,
        [&](std::size_t b, std::size_t e) { partial[b / chunk_size] = per_chunk(b, e); },
        workers);
    T acc = init;
    for (std::size_t c = 0; c < nchunks; ++c) acc = combine(acc, partial[c]);
    return acc;
}

} // namespace parcelca
