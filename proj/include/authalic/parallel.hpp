#pragma once

#include <cstddef>
#include <functional>

namespace authalic {

// Number of worker threads used by parallel loops. Reads AUTHALIC_THREADS
// once; defaults to the hardware concurrency.
int thread_count();

// Overrides the thread cap for the rest of the process (tests use this).
void set_thread_count(int threads);

// Runs body(begin, end) over fixed-size chunks of [0, n). Chunk boundaries
// depend only on n and chunk, never on the thread count, so per-chunk partial
// results reduced in chunk order are bitwise reproducible.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t chunk_index, std::size_t begin,
                                              std::size_t end)>& body);

// Deterministic sum of term(i) for i in [0, n).
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace authalic
