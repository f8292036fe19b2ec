#pragma once

#include <cstddef>
#include <functional>

namespace mslab {

// Worker cap for node/particle loops. Results never depend on the cap:
// work is split into fixed-size chunks and reductions combine chunk
// partials serially in chunk order, so any thread count is bit-identical.
void set_worker_count(unsigned n);
unsigned worker_count();

// Runs fn over [0,n) in fixed chunks, possibly on several threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn);

// Deterministic parallel sum of term(i) for i in [0,n).
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term);

} // namespace mslab
