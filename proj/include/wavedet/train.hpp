#ifndef WAVEDET_TRAIN_HPP
#define WAVEDET_TRAIN_HPP

#include <cstddef>
#include <vector>

#include "wavedet/channel.hpp"
#include "wavedet/net.hpp"
#include "wavedet/parallel.hpp"
#include "wavedet/rng.hpp"

namespace wavedet {

/// Gaussian exploration policy: per-component variance of the waveform
/// perturbation in interleaved real coordinates.
struct PolicyConfig {
    double sigma_sq = 0.3;

    bool operator==(const PolicyConfig&) const = default;
};

/**
 * @brief Knobs for the alternating training loop.
 *
 * eta_rx/eta_tx below zero fall back to the shared eta. stop_tol <= 0
 * disables the plateau stop so a run executes exactly outer_iters rounds.
 */
struct TrainConfig {
    double eta = 1e-3;
    double eta_rx = -1.0;
    double eta_tx = -1.0;
    std::size_t q_r = 50000;
    std::size_t q_t = 400000;
    std::size_t rx_steps = 8;
    std::size_t tx_steps = 1;
    std::size_t outer_iters = 10;
    double stop_tol = 1e-3;
    bool balanced = true;
    bool baseline_subtract = false; // subtract the batch-mean loss in the
                                    // policy-gradient estimator (off: raw estimator)
    std::size_t val_size = 0;       // held-out batch per round; 0 -> q_r

    double rx_rate() const { return eta_rx >= 0.0 ? eta_rx : eta; }
    double tx_rate() const { return eta_tx >= 0.0 ? eta_tx : eta; }
    std::size_t effective_val_size() const { return val_size > 0 ? val_size : q_r; }
    void validate() const;

    bool operator==(const TrainConfig&) const = default;
};

/// Instantaneous loss l(m, z) = -[m log p + (1-m) log(1-p)].
double instantaneous_loss(int m, double p);

/// Mean cross-entropy of the receiver over a batch.
double receiver_loss(const NetworkParams& theta_r, const Batch& batch,
                     ExecMode mode = ExecMode::parallel);

struct LossGrad {
    double loss = 0.0;
    ParamGrads grads;
};

/// Batch cross-entropy and its exact gradient w.r.t. the receiver
/// parameters, accumulated chunk-by-chunk (deterministic in either mode).
LossGrad receiver_loss_and_grad(const NetworkParams& theta_r, const Batch& batch,
                                ExecMode mode = ExecMode::parallel);

struct PolicySample {
    Waveform y_q;              // mean + noise in real coordinates; power may
                               // deviate from 1 during exploration
    std::vector<double> score; // (y_q - mean)/sigma^2 in real coordinates
};

/// One Gaussian policy draw around the normalized mean waveform.
PolicySample sample_policy(const Waveform& mean_y, const PolicyConfig& policy, RngStream& rng);

/// Q policy draws pushed through the channel; y_sampled set, loss unset.
Batch generate_policy_batch(const Waveform& mean_y, std::size_t Q, const EnvMixture& envs,
                            bool balanced, const PolicyConfig& policy, const RngStream& master,
                            ExecMode mode = ExecMode::parallel);

/// Receiver-side scoring of a transmitter batch: fills sample.loss with
/// l(m, receive(theta_r, z)). The in-process stand-in for the feedback channel.
void fill_losses(const NetworkParams& theta_r, Batch& batch,
                 ExecMode mode = ExecMode::parallel);

/**
 * @brief Policy-gradient estimate (1/Q) sum_q l_q (d mean/d theta)^T score_q.
 *
 * The mean is shared by the whole batch, so the score-weighted loss sum is
 * reduced first and chained once through normalization and the network.
 * Throws ProtocolError when a sample lacks its loss or sampled waveform.
 */
ParamGrads transmitter_grad(const NetworkParams& theta_t, const Waveform& x, const Batch& batch,
                            const PolicyConfig& policy, bool baseline_subtract = false,
                            ExecMode mode = ExecMode::parallel);

struct StageResult {
    NetworkParams params;
    std::vector<double> step_losses;
};

/// rx_steps SGD iterations on fresh size-q_r batches with the waveform
/// fixed at transmit(theta_t, x).
StageResult train_receiver(const NetworkParams& theta_r, const NetworkParams& theta_t,
                           const Waveform& x, const EnvMixture& envs, const TrainConfig& cfg,
                           const RngStream& stage_stream, ExecMode mode = ExecMode::parallel);

/// tx_steps policy-gradient iterations against the fixed receiver.
StageResult train_transmitter(const NetworkParams& theta_t, const NetworkParams& theta_r,
                              const Waveform& x, const EnvMixture& envs, const TrainConfig& cfg,
                              const PolicyConfig& policy, const RngStream& stage_stream,
                              ExecMode mode = ExecMode::parallel);

struct RoundRecord {
    std::size_t round = 0;
    double rx_loss = 0.0;  // mean over the round's receiver steps
    double tx_loss = 0.0;  // mean over the round's transmitter steps (NaN if none)
    double val_loss = 0.0; // held-out receiver loss after the receiver stage
    double scnr_rx = 0.0;  // SCNR of the waveform the receiver trained against
    double scnr = 0.0;     // SCNR of the post-round mean waveform
};

struct TrainOutcome {
    NetworkParams theta_t;
    NetworkParams theta_r;
    std::vector<RoundRecord> history;
};

/**
 * @brief The alternating loop: initialize both networks, then per round
 * train the receiver (supervised) and the transmitter (policy gradient)
 * until outer_iters rounds or the held-out loss plateaus.
 */
TrainOutcome alternate_training(const TrainConfig& cfg, const PolicyConfig& policy,
                                const EnvMixture& envs, const Waveform& x, std::size_t M,
                                const RngStream& root, ExecMode mode = ExecMode::parallel);

/// Network shapes used throughout: transmitter 2K-2K-2K tanh+identity,
/// receiver 2K-M-1 all-sigmoid.
NetworkParams init_transmitter(std::size_t K, RngStream rng);
NetworkParams init_receiver(std::size_t K, std::size_t M, RngStream rng);

} // namespace wavedet

#endif // WAVEDET_TRAIN_HPP
