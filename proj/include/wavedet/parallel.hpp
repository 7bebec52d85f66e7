#ifndef WAVEDET_PARALLEL_HPP
#define WAVEDET_PARALLEL_HPP

#include <cstddef>

namespace wavedet {

/// Execution mode for the batch kernels. `serial` is the reference
/// implementation; `parallel` runs the same chunk decomposition under
/// OpenMP. Both produce bit-identical results: work is split into fixed
/// chunks, each chunk is accumulated sequentially, and chunk partials are
/// combined in index order, so scheduling and thread count never change
/// the floating-point association.
enum class ExecMode { serial, parallel };

/// Fixed chunk length used by every batch kernel. Results depend on this
/// constant (association order), never on thread count.
inline constexpr std::size_t kBatchChunk = 256;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kBatchChunk) {
    return (n + chunk - 1) / chunk;
}

namespace detail {
void run_chunks(std::size_t n_chunks, ExecMode mode, void* ctx,
                void (*body)(void*, std::size_t));
}

/**
 * @brief Runs fn(chunk_index, begin, end) over [0, n) split into kBatchChunk
 * pieces, serially or under OpenMP depending on mode.
 *
 * fn must only touch state owned by its chunk (output slots indexed by
 * sample, or a partial accumulator indexed by chunk).
 */
template <typename Fn>
void for_each_chunk(std::size_t n, ExecMode mode, Fn&& fn) {
    struct Ctx {
        Fn* fn;
        std::size_t n;
    } ctx{&fn, n};
    detail::run_chunks(chunk_count(n), mode, &ctx, [](void* p, std::size_t c) {
        auto* s = static_cast<Ctx*>(p);
        const std::size_t begin = c * kBatchChunk;
        const std::size_t end = begin + kBatchChunk < s->n ? begin + kBatchChunk : s->n;
        (*s->fn)(c, begin, end);
    });
}

} // namespace wavedet

#endif // WAVEDET_PARALLEL_HPP
