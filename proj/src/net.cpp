#include "wavedet/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "wavedet/errors.hpp"

namespace wavedet {

namespace {

double apply_activation(Activation act, double x) {
    switch (act) {
        case Activation::tanh_fn: return std::tanh(x);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::identity: return x;
    }
    return x;
}

/// Derivative expressed through the activation output.
double activation_deriv(Activation act, double out) {
    switch (act) {
        case Activation::tanh_fn: return 1.0 - out * out;
        case Activation::sigmoid: return out * (1.0 - out);
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

} // namespace

ParamGrads ParamGrads::zeros_like(const NetworkParams& params) {
    ParamGrads g;
    g.layers.resize(params.layers.size());
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        g.layers[i].d_weights.assign(params.layers[i].weights.size(), 0.0);
        g.layers[i].d_bias.assign(params.layers[i].bias.size(), 0.0);
    }
    return g;
}

ParamGrads& ParamGrads::operator+=(const ParamGrads& other) {
    if (other.layers.size() != layers.size())
        throw DimensionError("ParamGrads::operator+=: layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        auto& dst = layers[i];
        const auto& src = other.layers[i];
        if (src.d_weights.size() != dst.d_weights.size() || src.d_bias.size() != dst.d_bias.size())
            throw DimensionError("ParamGrads::operator+=: shape mismatch");
        for (std::size_t k = 0; k < dst.d_weights.size(); ++k) dst.d_weights[k] += src.d_weights[k];
        for (std::size_t k = 0; k < dst.d_bias.size(); ++k) dst.d_bias[k] += src.d_bias[k];
    }
    return *this;
}

double ParamGrads::max_abs() const {
    double m = 0.0;
    for (const auto& l : layers) {
        for (double v : l.d_weights) m = std::max(m, std::abs(v));
        for (double v : l.d_bias) m = std::max(m, std::abs(v));
    }
    return m;
}

NetworkParams init_network(const std::vector<std::size_t>& layer_dims,
                           const std::vector<Activation>& activations, RngStream rng) {
    if (layer_dims.size() < 2)
        throw ConfigError("init_network: need at least input and output dims");
    if (activations.size() != layer_dims.size() - 1)
        throw ConfigError("init_network: activations must match layer count " +
                          std::to_string(layer_dims.size() - 1));
    for (std::size_t d : layer_dims)
        if (d < 1) throw ConfigError("init_network: dims must be >= 1");

    NetworkParams params;
    params.layers.resize(layer_dims.size() - 1);
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        Layer& layer = params.layers[i];
        layer.in = layer_dims[i];
        layer.out = layer_dims[i + 1];
        layer.act = activations[i];
        layer.weights.resize(layer.out * layer.in);
        layer.bias.assign(layer.out, 0.0);
        const double a = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        for (auto& w : layer.weights) w = a * (2.0 * rng.next_unit() - 1.0);
    }
    return params;
}

void forward(const NetworkParams& params, std::span<const double> input, ForwardTrace& trace) {
    if (input.size() != params.input_dim())
        throw DimensionError("forward: input has length " + std::to_string(input.size()) +
                             ", network expects " + std::to_string(params.input_dim()));
    trace.acts.resize(params.layers.size() + 1);
    trace.acts[0].assign(input.begin(), input.end());
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        const Layer& layer = params.layers[i];
        const auto& prev = trace.acts[i];
        auto& cur = trace.acts[i + 1];
        cur.resize(layer.out);
        for (std::size_t r = 0; r < layer.out; ++r) {
            double acc = layer.bias[r];
            const double* wrow = layer.weights.data() + r * layer.in;
            for (std::size_t c = 0; c < layer.in; ++c) acc += wrow[c] * prev[c];
            cur[r] = apply_activation(layer.act, acc);
        }
    }
}

void backward(const NetworkParams& params, const ForwardTrace& trace,
              std::span<const double> d_output, ParamGrads& grads,
              std::vector<double>* d_input) {
    const std::size_t L = params.layers.size();
    if (trace.acts.size() != L + 1)
        throw DimensionError("backward: trace does not match network depth");
    if (d_output.size() != params.output_dim())
        throw DimensionError("backward: upstream gradient has wrong length");
    if (grads.layers.size() != L)
        throw DimensionError("backward: gradient container shape mismatch");

    std::vector<double> delta(d_output.begin(), d_output.end());
    std::vector<double> next;
    for (std::size_t li = L; li-- > 0;) {
        const Layer& layer = params.layers[li];
        const auto& out = trace.acts[li + 1];
        const auto& in = trace.acts[li];
        for (std::size_t r = 0; r < layer.out; ++r)
            delta[r] *= activation_deriv(layer.act, out[r]);

        auto& lg = grads.layers[li];
        for (std::size_t r = 0; r < layer.out; ++r) {
            double* gw = lg.d_weights.data() + r * layer.in;
            const double dr = delta[r];
            for (std::size_t c = 0; c < layer.in; ++c) gw[c] += dr * in[c];
            lg.d_bias[r] += dr;
        }

        if (li > 0 || d_input != nullptr) {
            next.assign(layer.in, 0.0);
            for (std::size_t r = 0; r < layer.out; ++r) {
                const double* wrow = layer.weights.data() + r * layer.in;
                const double dr = delta[r];
                for (std::size_t c = 0; c < layer.in; ++c) next[c] += wrow[c] * dr;
            }
            delta.swap(next);
        }
    }
    if (d_input != nullptr) *d_input = delta;
}

ParamGrads backward(const NetworkParams& params, const ForwardTrace& trace,
                    std::span<const double> d_output) {
    ParamGrads grads = ParamGrads::zeros_like(params);
    backward(params, trace, d_output, grads);
    return grads;
}

void sgd_step(NetworkParams& params, const ParamGrads& grads, double eta) {
    if (grads.layers.size() != params.layers.size())
        throw DimensionError("sgd_step: gradient shape mismatch");
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        Layer& layer = params.layers[i];
        const LayerGrads& lg = grads.layers[i];
        if (lg.d_weights.size() != layer.weights.size() || lg.d_bias.size() != layer.bias.size())
            throw DimensionError("sgd_step: gradient shape mismatch");
        for (std::size_t k = 0; k < layer.weights.size(); ++k)
            layer.weights[k] -= eta * lg.d_weights[k];
        for (std::size_t k = 0; k < layer.bias.size(); ++k) layer.bias[k] -= eta * lg.d_bias[k];
    }
}

TransmitTrace transmit_traced(const NetworkParams& theta_t, const Waveform& x) {
    if (theta_t.input_dim() != 2 * x.size() || theta_t.output_dim() != 2 * x.size())
        throw DimensionError("transmit: network dims must be 2K on both ends");
    TransmitTrace t;
    const std::vector<double> input = c2r(x.chips);
    forward(theta_t, input, t.net);
    t.pre_norm.assign(t.net.output().begin(), t.net.output().end());
    double len_sq = 0.0;
    for (double v : t.pre_norm) len_sq += v * v;
    t.pre_norm_len = std::sqrt(len_sq);
    if (t.pre_norm_len < 1e-9)
        throw NormalizationUnderflowError(
            "transmit: pre-normalization output has norm < 1e-9");
    t.mean_real.resize(t.pre_norm.size());
    for (std::size_t i = 0; i < t.pre_norm.size(); ++i)
        t.mean_real[i] = t.pre_norm[i] / t.pre_norm_len;
    t.y.chips = r2c(t.mean_real);
    t.y.normalized = true;
    return t;
}

Waveform transmit(const NetworkParams& theta_t, const Waveform& x) {
    return transmit_traced(theta_t, x).y;
}

void transmit_backward(const NetworkParams& theta_t, const TransmitTrace& trace,
                       std::span<const double> d_mean, ParamGrads& grads) {
    const std::size_t n = trace.mean_real.size();
    if (d_mean.size() != n) throw DimensionError("transmit_backward: gradient length mismatch");
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += trace.mean_real[i] * d_mean[i];
    std::vector<double> d_u(n);
    for (std::size_t i = 0; i < n; ++i)
        d_u[i] = (d_mean[i] - trace.mean_real[i] * proj) / trace.pre_norm_len;
    backward(theta_t, trace.net, d_u, grads);
}

double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double receive_traced(const NetworkParams& theta_r, const cvec& z, ForwardTrace& trace) {
    if (theta_r.input_dim() != 2 * z.size() || theta_r.output_dim() != 1)
        throw DimensionError("receive: network must map 2K reals to one output");
    forward(theta_r, c2r(z), trace);
    return clamp_prob(trace.output()[0]);
}

double receive(const NetworkParams& theta_r, const cvec& z) {
    ForwardTrace trace;
    return receive_traced(theta_r, z, trace);
}

namespace {

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

struct Reader {
    std::string buf;
    std::size_t pos = 0;

    std::uint64_t u64() {
        if (pos + 8 > buf.size()) throw ConfigError("load_network: truncated file");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::uint8_t u8() {
        if (pos + 1 > buf.size()) throw ConfigError("load_network: truncated file");
        return static_cast<std::uint8_t>(buf[pos++]);
    }
};

constexpr std::uint64_t kNetMagic = 0x3154454E44575743ULL; // "CWWDNET1" tag

} // namespace

void save_network(const std::filesystem::path& path, const NetworkParams& params) {
    std::string out;
    put_u64(out, kNetMagic);
    put_u64(out, params.layers.size());
    put_u64(out, params.input_dim());
    for (const Layer& layer : params.layers) put_u64(out, layer.out);
    for (const Layer& layer : params.layers)
        out.push_back(static_cast<char>(static_cast<std::uint8_t>(layer.act)));
    for (const Layer& layer : params.layers) {
        for (double w : layer.weights) put_f64(out, w);
        for (double b : layer.bias) put_f64(out, b);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("save_network: cannot open " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw ConfigError("save_network: write failed for " + path.string());
}

NetworkParams load_network(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("load_network: cannot open " + path.string());
    Reader r;
    r.buf.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());

    if (r.u64() != kNetMagic) throw ConfigError("load_network: bad magic in " + path.string());
    const std::uint64_t L = r.u64();
    if (L == 0 || L > 64) throw ConfigError("load_network: implausible layer count");
    std::vector<std::size_t> dims(L + 1);
    dims[0] = r.u64();
    for (std::size_t i = 0; i < L; ++i) dims[i + 1] = r.u64();
    NetworkParams params;
    params.layers.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
        const std::uint8_t code = r.u8();
        if (code > 2) throw ConfigError("load_network: unknown activation code");
        params.layers[i].act = static_cast<Activation>(code);
    }
    for (std::size_t i = 0; i < L; ++i) {
        Layer& layer = params.layers[i];
        layer.in = dims[i];
        layer.out = dims[i + 1];
        layer.weights.resize(layer.out * layer.in);
        layer.bias.resize(layer.out);
        for (auto& w : layer.weights) w = r.f64();
        for (auto& b : layer.bias) b = r.f64();
    }
    if (r.pos != r.buf.size()) throw ConfigError("load_network: trailing bytes in " + path.string());
    return params;
}

} // namespace wavedet
