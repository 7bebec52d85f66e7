#include "wavedet/rng.hpp"

#include <cmath>
#include <numbers>

namespace wavedet {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& x) {
    x += kGolden;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id) {
    std::uint64_t z = seed ^ (kGolden * (stream_id + 0x632BE59BD9B4E019ULL));
    for (auto& s : state_) s = splitmix64(z);
    // xoshiro requires a nonzero state; astronomically unlikely, still guarded.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RngStream RngStream::derive(std::uint64_t child) const {
    std::uint64_t c = child;
    std::uint64_t mixed = splitmix64(c);
    std::uint64_t s = stream_ ^ mixed;
    return RngStream(seed_, splitmix64(s));
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++ step.
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::next_unit() {
    // 53 mantissa bits mapped to (0, 1].
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny compared to 2^64 in every use.
    return next_u64() % n;
}

std::pair<double, double> RngStream::gaussian_pair() {
    double u = next_unit();
    double v = next_unit();
    double r = std::sqrt(-2.0 * std::log(u));
    double phi = 2.0 * std::numbers::pi * v;
    return {r * std::cos(phi), r * std::sin(phi)};
}

std::complex<double> RngStream::next_cgaussian(double variance) {
    double u = next_unit();
    double v = next_unit();
    // |z|^2 is exactly Exp(variance); per-component variance is variance/2.
    double r = std::sqrt(-variance * std::log(u));
    double phi = 2.0 * std::numbers::pi * v;
    return {r * std::cos(phi), r * std::sin(phi)};
}

void RngStream::fill_gaussian(std::span<double> out, double stddev) {
    std::size_t i = 0;
    while (i + 1 < out.size()) {
        auto [a, b] = gaussian_pair();
        out[i++] = stddev * a;
        out[i++] = stddev * b;
    }
    if (i < out.size()) {
        out[i] = stddev * gaussian_pair().first;
    }
}

} // namespace wavedet
