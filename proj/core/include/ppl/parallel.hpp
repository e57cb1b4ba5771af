#pragma once

#include <cstddef>
#include <functional>

namespace ppl {

// Worker count for data-parallel node loops. 0 means "read PPL_THREADS, else 1".
void set_thread_count(unsigned n);
unsigned thread_count();

// Splits [0, n) into contiguous chunks, one per worker. body(begin, end, worker).
// Chunking depends only on n and the worker count, so reductions done per
// chunk and combined in chunk order are reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, unsigned)>& body);

}  // namespace ppl
