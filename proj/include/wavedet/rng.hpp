#ifndef WAVEDET_RNG_HPP
#define WAVEDET_RNG_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <utility>

namespace wavedet {

/**
 * @brief Seedable counter-style random stream (xoshiro256++ core).
 *
 * A stream is identified by a (seed, stream-id) pair; identical pairs
 * reproduce identical draw sequences bit-exactly on every platform.
 * Parallel consumers must partition work by stream-id via derive() and
 * never share one stream, which keeps Monte Carlo results independent
 * of thread count and scheduling.
 *
 * All distribution draws are built from the raw 64-bit output with fixed
 * arithmetic (no std::*_distribution, whose sequences are
 * implementation-defined).
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    /// Independent child stream; deterministic in (seed, stream-id, child).
    RngStream derive(std::uint64_t child) const;

    std::uint64_t next_u64();

    /// Uniform double in (0, 1]; never returns 0, so -log stays finite.
    double next_unit();

    /// Uniform in [0, n).
    std::uint64_t next_below(std::uint64_t n);

    /// Two independent N(0,1) draws (one Box-Muller transform, two uniforms).
    std::pair<double, double> gaussian_pair();

    /// Circularly symmetric complex Gaussian CN(0, variance):
    /// real and imaginary parts i.i.d. N(0, variance/2).
    std::complex<double> next_cgaussian(double variance);

    /// Fills out with i.i.d. N(0, stddev^2), consuming ceil(n/2) Box-Muller pairs.
    void fill_gaussian(std::span<double> out, double stddev);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    std::uint64_t state_[4];
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
};

} // namespace wavedet

#endif // WAVEDET_RNG_HPP
