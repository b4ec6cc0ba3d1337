#pragma once

#include <cstddef>
#include <functional>

namespace mq {

// Worker count: MQ_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

// Splits [0, n) into contiguous chunks, one per worker; fn(chunk, begin, end).
// Chunk boundaries depend only on n and the worker count.
void parallel_chunks(std::size_t n, std::size_t workers,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace mq
