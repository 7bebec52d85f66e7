#include "wavedet/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wavedet::detail {

void run_chunks(std::size_t n_chunks, ExecMode mode, void* ctx,
                void (*body)(void*, std::size_t)) {
#ifdef _OPENMP
    if (mode == ExecMode::parallel && n_chunks > 1) {
        const long long nc = static_cast<long long>(n_chunks);
#pragma omp parallel for schedule(dynamic, 1)
        for (long long c = 0; c < nc; ++c) {
            body(ctx, static_cast<std::size_t>(c));
        }
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t c = 0; c < n_chunks; ++c) body(ctx, c);
}

} // namespace wavedet::detail
