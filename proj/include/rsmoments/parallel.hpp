#pragma once
// Deterministic work splitting.  Work is always divided into a fixed block
// grid that does not depend on the worker count; workers pull block indices
// from an atomic cursor and write results into per-block slots.  Any
// reduction that then combines slots in block order is bit-identical for
// 1 thread and for N threads.

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rsmoments {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

// fn(block_index) for block_index in [0, nblocks)
template <class F>
void parallel_blocks(std::size_t nblocks, unsigned threads, F&& fn) {
    threads = resolve_threads(threads);
    if (nblocks == 0) return;
    if (threads <= 1 || nblocks == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex err_mx;
    auto worker = [&] {
        for (;;) {
            std::size_t b = cursor.fetch_add(1, std::memory_order_relaxed);
            if (b >= nblocks) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mx);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned n = threads < nblocks ? threads : static_cast<unsigned>(nblocks);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// [begin, end) of block b when [0, total) is cut into nblocks pieces
inline std::pair<std::uint64_t, std::uint64_t>
block_range(std::uint64_t total, std::size_t nblocks, std::size_t b) {
    std::uint64_t lo = total * b / nblocks;
    std::uint64_t hi = total * (b + 1) / nblocks;
    return {lo, hi};
}

} // namespace rsmoments
