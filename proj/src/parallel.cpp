#include "mslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mslab {

namespace {
std::atomic<unsigned> g_workers{0}; // 0 = use hardware concurrency

constexpr std::size_t kChunk = 4096;

unsigned effective_workers() {
    unsigned w = g_workers.load();
    if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
    return w;
}
} // namespace

void set_worker_count(unsigned n) { g_workers.store(n); }

unsigned worker_count() { return effective_workers(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
    if (n == 0) return;
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(effective_workers(), n_chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            chunk_fn(c * kChunk, std::min(n, (c + 1) * kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                chunk_fn(c * kChunk, std::min(n, (c + 1) * kChunk));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
    if (n == 0) return 0.0;
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(n_chunks, 0.0);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[lo / kChunk] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p; // fixed chunk order
    return total;
}

} // namespace mslab
