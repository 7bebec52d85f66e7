#include "wavedet/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wavedet/errors.hpp"

namespace wavedet {

namespace {

// Substream tags; round streams hang off the root at 16 + round.
constexpr std::uint64_t kInitRx = 1;
constexpr std::uint64_t kInitTx = 2;
constexpr std::uint64_t kStageRx = 1;
constexpr std::uint64_t kStageTx = 2;
constexpr std::uint64_t kStageVal = 3;
constexpr std::uint64_t kRoundBase = 16;

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

void TrainConfig::validate() const {
    if (!(eta > 0.0)) throw ConfigError("train.eta: must be > 0");
    if (eta_rx >= 0.0 && !(eta_rx > 0.0)) throw ConfigError("train.eta_rx: must be > 0");
    if (eta_tx >= 0.0 && !(eta_tx > 0.0)) throw ConfigError("train.eta_tx: must be > 0");
    if (q_r < 1) throw ConfigError("train.q_r: must be >= 1");
    if (q_t < 1) throw ConfigError("train.q_t: must be >= 1");
}

double instantaneous_loss(int m, double p) {
    return m == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double receiver_loss(const NetworkParams& theta_r, const Batch& batch, ExecMode mode) {
    if (batch.empty()) throw ConfigError("receiver_loss: empty batch");
    std::vector<double> partial(chunk_count(batch.size()), 0.0);
    for_each_chunk(batch.size(), mode, [&](std::size_t c, std::size_t begin, std::size_t end) {
        ForwardTrace trace;
        double acc = 0.0;
        for (std::size_t q = begin; q < end; ++q)
            acc += instantaneous_loss(batch[q].m, receive_traced(theta_r, batch[q].z, trace));
        partial[c] = acc;
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return total / static_cast<double>(batch.size());
}

LossGrad receiver_loss_and_grad(const NetworkParams& theta_r, const Batch& batch, ExecMode mode) {
    if (batch.empty()) throw ConfigError("receiver_loss_and_grad: empty batch");
    const std::size_t n_chunks = chunk_count(batch.size());
    std::vector<double> loss_partial(n_chunks, 0.0);
    std::vector<ParamGrads> grad_partial(n_chunks);

    for_each_chunk(batch.size(), mode, [&](std::size_t c, std::size_t begin, std::size_t end) {
        ForwardTrace trace;
        ParamGrads local = ParamGrads::zeros_like(theta_r);
        double acc = 0.0;
        double d_out[1];
        for (std::size_t q = begin; q < end; ++q) {
            const LabeledSample& s = batch[q];
            const double p = receive_traced(theta_r, s.z, trace);
            acc += instantaneous_loss(s.m, p);
            // d l / d p for the clamped cross-entropy.
            d_out[0] = s.m == 1 ? -1.0 / p : 1.0 / (1.0 - p);
            backward(theta_r, trace, std::span<const double>(d_out, 1), local);
        }
        loss_partial[c] = acc;
        grad_partial[c] = std::move(local);
    });

    LossGrad out;
    out.grads = ParamGrads::zeros_like(theta_r);
    double total = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        total += loss_partial[c];
        out.grads += grad_partial[c];
    }
    const double inv_q = 1.0 / static_cast<double>(batch.size());
    out.loss = total * inv_q;
    for (auto& layer : out.grads.layers) {
        for (auto& v : layer.d_weights) v *= inv_q;
        for (auto& v : layer.d_bias) v *= inv_q;
    }
    return out;
}

PolicySample sample_policy(const Waveform& mean_y, const PolicyConfig& policy, RngStream& rng) {
    if (!(policy.sigma_sq > 0.0)) throw ConfigError("policy.sigma_sq: must be > 0");
    if (!has_unit_power(mean_y, 1e-9))
        throw ConfigError("sample_policy: policy mean must be a unit-power waveform");
    const std::vector<double> mean = c2r(mean_y.chips);
    std::vector<double> noise(mean.size());
    rng.fill_gaussian(noise, std::sqrt(policy.sigma_sq));

    PolicySample out;
    std::vector<double> perturbed(mean.size());
    out.score.resize(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        perturbed[i] = mean[i] + noise[i];
        // Score from the realized value, the exact gradient of log pi at y_q.
        out.score[i] = (perturbed[i] - mean[i]) / policy.sigma_sq;
    }
    out.y_q.chips = r2c(perturbed);
    out.y_q.normalized = false;
    return out;
}

Batch generate_policy_batch(const Waveform& mean_y, std::size_t Q, const EnvMixture& envs,
                            bool balanced, const PolicyConfig& policy, const RngStream& master,
                            ExecMode mode) {
    if (envs.empty()) throw ConfigError("generate_policy_batch: empty env mixture");
    if (Q < 1) throw ConfigError("generate_policy_batch: Q must be >= 1");
    std::vector<PreparedEnv> prepared;
    prepared.reserve(envs.size());
    for (const auto& [env, w] : envs) prepared.push_back(prepare_env(env, mean_y.size()));

    std::vector<int> labels;
    if (balanced) labels = balanced_labels(Q, master.derive(0));

    Batch batch(Q);
    for_each_chunk(Q, mode, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t q = begin; q < end; ++q) {
            RngStream st = master.derive(q + 1);
            PolicySample ps = sample_policy(mean_y, policy, st);
            const std::size_t e = pick_env(envs, st);
            const int m = balanced ? labels[q]
                                   : (st.next_unit() <= prepared[e].env.prior_p1 ? 1 : 0);
            batch[q] = simulate_return(ps.y_q, m, prepared[e], std::move(st));
            batch[q].y_sampled = std::move(ps.y_q);
        }
    });
    return batch;
}

void fill_losses(const NetworkParams& theta_r, Batch& batch, ExecMode mode) {
    for_each_chunk(batch.size(), mode, [&](std::size_t, std::size_t begin, std::size_t end) {
        ForwardTrace trace;
        for (std::size_t q = begin; q < end; ++q)
            batch[q].loss = instantaneous_loss(batch[q].m,
                                               receive_traced(theta_r, batch[q].z, trace));
    });
}

ParamGrads transmitter_grad(const NetworkParams& theta_t, const Waveform& x, const Batch& batch,
                            const PolicyConfig& policy, bool baseline_subtract, ExecMode mode) {
    if (batch.empty()) throw ConfigError("transmitter_grad: empty batch");
    const TransmitTrace trace = transmit_traced(theta_t, x);
    const std::size_t n = trace.mean_real.size();
    const std::size_t n_chunks = chunk_count(batch.size());

    double loss_baseline = 0.0;
    if (baseline_subtract) {
        std::vector<double> partial(n_chunks, 0.0);
        for_each_chunk(batch.size(), mode, [&](std::size_t c, std::size_t begin, std::size_t end) {
            double acc = 0.0;
            for (std::size_t q = begin; q < end; ++q) {
                if (!batch[q].loss)
                    throw ProtocolError("transmitter_grad: sample missing its loss");
                acc += *batch[q].loss;
            }
            partial[c] = acc;
        });
        double total = 0.0;
        for (double v : partial) total += v;
        loss_baseline = total / static_cast<double>(batch.size());
    }

    std::vector<std::vector<double>> partial(n_chunks);
    for_each_chunk(batch.size(), mode, [&](std::size_t c, std::size_t begin, std::size_t end) {
        std::vector<double> acc(n, 0.0);
        for (std::size_t q = begin; q < end; ++q) {
            const LabeledSample& s = batch[q];
            if (!s.loss) throw ProtocolError("transmitter_grad: sample missing its loss");
            if (!s.y_sampled)
                throw ProtocolError("transmitter_grad: sample missing its transmitted waveform");
            if (s.y_sampled->size() != x.size())
                throw DimensionError("transmitter_grad: sampled waveform length mismatch");
            const double weight = *s.loss - loss_baseline;
            const std::vector<double> y_real = c2r(s.y_sampled->chips);
            for (std::size_t i = 0; i < n; ++i)
                acc[i] += weight * (y_real[i] - trace.mean_real[i]) / policy.sigma_sq;
        }
        partial[c] = std::move(acc);
    });

    std::vector<double> d_mean(n, 0.0);
    for (const auto& chunk : partial)
        for (std::size_t i = 0; i < n; ++i) d_mean[i] += chunk[i];
    const double inv_q = 1.0 / static_cast<double>(batch.size());
    for (auto& v : d_mean) v *= inv_q;

    ParamGrads grads = ParamGrads::zeros_like(theta_t);
    transmit_backward(theta_t, trace, d_mean, grads);
    return grads;
}

StageResult train_receiver(const NetworkParams& theta_r, const NetworkParams& theta_t,
                           const Waveform& x, const EnvMixture& envs, const TrainConfig& cfg,
                           const RngStream& stage_stream, ExecMode mode) {
    cfg.validate();
    StageResult result;
    result.params = theta_r;
    const Waveform y = transmit(theta_t, x);
    for (std::size_t j = 0; j < cfg.rx_steps; ++j) {
        const Batch batch =
            generate_batch(y, cfg.q_r, envs, cfg.balanced, stage_stream.derive(j), mode);
        LossGrad lg = receiver_loss_and_grad(result.params, batch, mode);
        sgd_step(result.params, lg.grads, cfg.rx_rate());
        result.step_losses.push_back(lg.loss);
    }
    return result;
}

StageResult train_transmitter(const NetworkParams& theta_t, const NetworkParams& theta_r,
                              const Waveform& x, const EnvMixture& envs, const TrainConfig& cfg,
                              const PolicyConfig& policy, const RngStream& stage_stream,
                              ExecMode mode) {
    cfg.validate();
    StageResult result;
    result.params = theta_t;
    for (std::size_t j = 0; j < cfg.tx_steps; ++j) {
        const Waveform mean_y = transmit(result.params, x);
        Batch batch = generate_policy_batch(mean_y, cfg.q_t, envs, cfg.balanced, policy,
                                            stage_stream.derive(j), mode);
        fill_losses(theta_r, batch, mode);
        ParamGrads grads =
            transmitter_grad(result.params, x, batch, policy, cfg.baseline_subtract, mode);
        sgd_step(result.params, grads, cfg.tx_rate());

        double mean_loss = 0.0;
        for (const auto& s : batch) mean_loss += *s.loss;
        result.step_losses.push_back(mean_loss / static_cast<double>(batch.size()));
    }
    return result;
}

NetworkParams init_transmitter(std::size_t K, RngStream rng) {
    return init_network({2 * K, 2 * K, 2 * K},
                        {Activation::tanh_fn, Activation::identity}, std::move(rng));
}

NetworkParams init_receiver(std::size_t K, std::size_t M, RngStream rng) {
    return init_network({2 * K, M, 1}, {Activation::sigmoid, Activation::sigmoid},
                        std::move(rng));
}

TrainOutcome alternate_training(const TrainConfig& cfg, const PolicyConfig& policy,
                                const EnvMixture& envs, const Waveform& x, std::size_t M,
                                const RngStream& root, ExecMode mode) {
    cfg.validate();
    if (envs.empty()) throw ConfigError("alternate_training: empty env mixture");
    const std::size_t K = x.size();

    TrainOutcome out;
    out.theta_r = init_receiver(K, M, root.derive(kInitRx));
    out.theta_t = init_transmitter(K, root.derive(kInitTx));

    double prev_val = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t round = 1; round <= cfg.outer_iters; ++round) {
        const RngStream round_stream = root.derive(kRoundBase + round);

        StageResult rx = train_receiver(out.theta_r, out.theta_t, x, envs, cfg,
                                        round_stream.derive(kStageRx), mode);
        out.theta_r = std::move(rx.params);

        const Waveform y_round = transmit(out.theta_t, x);
        const Batch val_batch = generate_batch(y_round, cfg.effective_val_size(), envs,
                                               cfg.balanced, round_stream.derive(kStageVal), mode);
        const double val = receiver_loss(out.theta_r, val_batch, mode);

        double tx_loss = std::numeric_limits<double>::quiet_NaN();
        if (cfg.tx_steps > 0) {
            StageResult tx = train_transmitter(out.theta_t, out.theta_r, x, envs, cfg, policy,
                                               round_stream.derive(kStageTx), mode);
            out.theta_t = std::move(tx.params);
            tx_loss = mean_of(tx.step_losses);
        }

        RoundRecord rec;
        rec.round = round;
        rec.rx_loss = mean_of(rx.step_losses);
        rec.tx_loss = tx_loss;
        rec.val_loss = val;
        rec.scnr_rx = scnr(y_round, envs.front().first);
        rec.scnr = scnr(transmit(out.theta_t, x), envs.front().first);
        out.history.push_back(rec);

        if (cfg.stop_tol > 0.0 && !std::isnan(prev_val)) {
            const double rel_gain = (prev_val - val) / std::max(std::abs(prev_val), 1e-300);
            if (rel_gain < cfg.stop_tol) break;
        }
        prev_val = val;
    }
    return out;
}

} // namespace wavedet
