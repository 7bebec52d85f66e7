#ifndef WAVEDET_NET_HPP
#define WAVEDET_NET_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wavedet/linalg.hpp"
#include "wavedet/rng.hpp"
#include "wavedet/signal.hpp"

namespace wavedet {

enum class Activation : std::uint8_t { tanh_fn = 0, sigmoid = 1, identity = 2 };

/// One fully connected layer: out = act(W r + b), W row-major (out x in).
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation act = Activation::identity;
    std::vector<double> weights; // out*in, row-major
    std::vector<double> bias;    // out
};

/// Feedforward network parameters theta = {W^[i], b^[i]}.
struct NetworkParams {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out; }
};

/// Gradient container, shape-congruent with its NetworkParams.
struct LayerGrads {
    std::vector<double> d_weights;
    std::vector<double> d_bias;
};
struct ParamGrads {
    std::vector<LayerGrads> layers;

    static ParamGrads zeros_like(const NetworkParams& params);
    ParamGrads& operator+=(const ParamGrads& other);
    double max_abs() const;
};

/// All layer activations from one forward pass; acts[0] is the input,
/// acts[i] the output of layer i. Reusable across calls to avoid churn.
struct ForwardTrace {
    std::vector<std::vector<double>> acts;

    std::span<const double> output() const { return acts.back(); }
};

/**
 * @brief Glorot-uniform initialization: W ~ U(-a, a) with
 * a = sqrt(6/(fan_in+fan_out)), biases zero. Row-major draw order makes the
 * result a pure function of the stream.
 */
NetworkParams init_network(const std::vector<std::size_t>& layer_dims,
                           const std::vector<Activation>& activations, RngStream rng);

/// r_i = act(W^[i] r_{i-1} + b^[i]), recording every intermediate output.
void forward(const NetworkParams& params, std::span<const double> input, ForwardTrace& trace);

/**
 * @brief Exact reverse-mode gradients for one input.
 *
 * trace must come from forward() on the same params. Accumulates into
 * grads (+=). When d_input is non-null it receives dLoss/dInput, which the
 * transmitter path chains through the normalization layer.
 */
void backward(const NetworkParams& params, const ForwardTrace& trace,
              std::span<const double> d_output, ParamGrads& grads,
              std::vector<double>* d_input = nullptr);

/// Convenience wrapper returning fresh gradients.
ParamGrads backward(const NetworkParams& params, const ForwardTrace& trace,
                    std::span<const double> d_output);

/// theta <- theta - eta * grads, elementwise.
void sgd_step(NetworkParams& params, const ParamGrads& grads, double eta);

/// Everything transmit() computes, kept for the gradient chain.
struct TransmitTrace {
    ForwardTrace net;
    std::vector<double> pre_norm;  // u in interleaved real coordinates
    double pre_norm_len = 0.0;     // ||u||
    std::vector<double> mean_real; // u/||u||, the policy mean in real coords
    Waveform y;                    // R2C(mean_real), flagged normalized
};

/**
 * @brief Transmitter map: y = u/||u|| with u = R2C(f(C2R(x))).
 *
 * Throws NormalizationUnderflowError when ||u|| < 1e-9 rather than dividing;
 * a silently substituted waveform would corrupt training invisibly.
 */
TransmitTrace transmit_traced(const NetworkParams& theta_t, const Waveform& x);
Waveform transmit(const NetworkParams& theta_t, const Waveform& x);

/**
 * @brief Backward through normalization + network given dLoss/d(mean_real).
 *
 * Normalization Jacobian in real coordinates is (I - m m^T)/||u|| with
 * m = u/||u||. Accumulates into grads.
 */
void transmit_backward(const NetworkParams& theta_t, const TransmitTrace& trace,
                       std::span<const double> d_mean, ParamGrads& grads);

/// Receiver map: p = f(C2R(z)), clamped to [1e-12, 1 - 1e-12].
double receive(const NetworkParams& theta_r, const cvec& z);
double receive_traced(const NetworkParams& theta_r, const cvec& z, ForwardTrace& trace);

constexpr double kProbClamp = 1e-12;
double clamp_prob(double p);

/// Binary serialization: magic/version, then {layer count, dims, activation
/// codes}, then row-major W and b per layer as little-endian f64.
/// save/load round-trip bit-exactly.
void save_network(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_network(const std::filesystem::path& path);

} // namespace wavedet

#endif // WAVEDET_NET_HPP
