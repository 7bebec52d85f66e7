#include "wavedet/channel.hpp"

#include <cmath>
#include <numbers>

#include "wavedet/errors.hpp"

namespace wavedet {

PreparedEnv prepare_env(const EnvModel& env, std::size_t K) {
    env.validate();
    if (env.chip_count() != K)
        throw DimensionError("prepare_env: env sized for K=" + std::to_string(env.chip_count()) +
                             ", waveform has K=" + std::to_string(K));
    return PreparedEnv{env, chol_psd(noise_covariance(env.sigma_n_sq, env.rho, K))};
}

cplx draw_target_gain(const EnvModel& env, RngStream& rng) {
    return rng.next_cgaussian(env.sigma_alpha_sq);
}

cplx draw_coherent_weibull(double beta, double power, RngStream& rng) {
    if (!(beta >= 0.25 && beta <= 2.0))
        throw ConfigError("draw_coherent_weibull: beta must lie in [0.25, 2]");
    if (!(power >= 0.0))
        throw ConfigError("draw_coherent_weibull: power must be >= 0");
    const double u = rng.next_unit();
    const double v = rng.next_unit();
    if (power == 0.0) return {0.0, 0.0};
    const double scale = std::sqrt(power / std::tgamma(1.0 + 2.0 / beta));
    const double r = scale * std::pow(-std::log(u), 1.0 / beta);
    const double phi = 2.0 * std::numbers::pi * v;
    return {r * std::cos(phi), r * std::sin(phi)};
}

cvec colored_noise_from_white(const CMatrix& noise_chol, const cvec& w) {
    const std::size_t K = noise_chol.dim();
    if (w.size() != K) throw DimensionError("colored_noise_from_white: dimension mismatch");
    cvec n(K);
    for (std::size_t i = 0; i < K; ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += noise_chol(i, j) * w[j];
        n[i] = acc;
    }
    return n;
}

cvec draw_colored_noise(const CMatrix& noise_chol, RngStream& rng) {
    cvec w(noise_chol.dim());
    for (auto& c : w) c = rng.next_cgaussian(1.0);
    return colored_noise_from_white(noise_chol, w);
}

cvec compose_return(const Waveform& y, cplx alpha, const cvec& gammas, const cvec& noise) {
    const std::size_t K = y.size();
    const int Ki = static_cast<int>(K);
    if (gammas.size() != 2 * K - 2 || noise.size() != K)
        throw DimensionError("compose_return: dimension mismatch");
    cvec z(K);
    for (std::size_t i = 0; i < K; ++i) z[i] = alpha * y.chips[i] + noise[i];
    std::size_t cell = 0;
    for (int k = -Ki + 1; k <= Ki - 1; ++k) {
        if (k == 0) continue;
        const cplx g = gammas[cell++];
        if (g != cplx{0.0, 0.0}) {
            // (J_k y)_i = y_{i-k}; add in place instead of materializing shifts.
            const int lo = k > 0 ? k : 0;
            const int hi = k > 0 ? Ki : Ki + k;
            for (int i = lo; i < hi; ++i)
                z[static_cast<std::size_t>(i)] += g * y.chips[static_cast<std::size_t>(i - k)];
        }
    }
    return z;
}

LabeledSample simulate_return(const Waveform& y, int m, const PreparedEnv& prepared,
                              RngStream rng) {
    const std::size_t K = y.size();
    const cplx alpha = draw_target_gain(prepared.env, rng);
    cvec gammas(2 * K - 2);
    const int Ki = static_cast<int>(K);
    std::size_t cell = 0;
    for (int k = -Ki + 1; k <= Ki - 1; ++k) {
        if (k == 0) continue;
        gammas[cell] = draw_coherent_weibull(prepared.env.shape_beta,
                                             prepared.env.clutter_powers[cell], rng);
        ++cell;
    }
    const cvec noise = draw_colored_noise(prepared.noise_chol, rng);
    LabeledSample s;
    s.m = m;
    s.z = compose_return(y, static_cast<double>(m) * alpha, gammas, noise);
    return s;
}

LabeledSample simulate_return(const Waveform& y, int m, const EnvModel& env, RngStream rng) {
    return simulate_return(y, m, prepare_env(env, y.size()), std::move(rng));
}

std::vector<int> balanced_labels(std::size_t Q, RngStream shuffle_stream) {
    std::vector<int> labels(Q, 0);
    const std::size_t ones = (Q + 1) / 2;
    for (std::size_t i = 0; i < ones; ++i) labels[i] = 1;
    // Fisher-Yates on the stream keeps the split exact and the order seeded.
    for (std::size_t i = Q; i > 1; --i) {
        const std::size_t j = shuffle_stream.next_below(i);
        std::swap(labels[i - 1], labels[j]);
    }
    return labels;
}

std::size_t pick_env(const EnvMixture& envs, RngStream& rng) {
    if (envs.size() == 1) return 0;
    const double u = rng.next_unit();
    double acc = 0.0;
    for (std::size_t e = 0; e < envs.size(); ++e) {
        acc += envs[e].second;
        if (u <= acc) return e;
    }
    return envs.size() - 1;
}

Batch generate_batch(const Waveform& y, std::size_t Q, const EnvMixture& envs, bool balanced,
                     const RngStream& master, ExecMode mode) {
    if (envs.empty()) throw ConfigError("generate_batch: empty env mixture");
    if (Q < 1) throw ConfigError("generate_batch: Q must be >= 1");
    double wsum = 0.0;
    for (const auto& [env, w] : envs) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ConfigError("generate_batch: mixture weights must sum to 1");

    std::vector<PreparedEnv> prepared;
    prepared.reserve(envs.size());
    for (const auto& [env, w] : envs) prepared.push_back(prepare_env(env, y.size()));

    std::vector<int> labels;
    if (balanced) labels = balanced_labels(Q, master.derive(0));

    Batch batch(Q);
    for_each_chunk(Q, mode, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t q = begin; q < end; ++q) {
            RngStream st = master.derive(q + 1);
            const std::size_t e = pick_env(envs, st);
            const int m = balanced ? labels[q]
                                   : (st.next_unit() <= prepared[e].env.prior_p1 ? 1 : 0);
            batch[q] = simulate_return(y, m, prepared[e], std::move(st));
        }
    });
    return batch;
}

} // namespace wavedet
