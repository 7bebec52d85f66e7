#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "test_helpers.hpp"
#include "wavedet/errors.hpp"
#include "wavedet/net.hpp"

using namespace wavedet;
namespace th = wavedet::testing;

namespace {

NetworkParams identity_net(std::size_t n) {
    NetworkParams params;
    Layer layer;
    layer.in = n;
    layer.out = n;
    layer.act = Activation::identity;
    layer.weights.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) layer.weights[i * n + i] = 1.0;
    layer.bias.assign(n, 0.0);
    params.layers.push_back(layer);
    return params;
}

/// Central finite-difference gradient of fn w.r.t. one parameter entry.
template <typename Fn>
double fd_param(NetworkParams& params, std::size_t layer, bool is_bias, std::size_t idx, Fn fn,
                double h = 1e-6) {
    double& slot = is_bias ? params.layers[layer].bias[idx] : params.layers[layer].weights[idx];
    const double saved = slot;
    slot = saved + h;
    const double hi = fn(params);
    slot = saved - h;
    const double lo = fn(params);
    slot = saved;
    return (hi - lo) / (2.0 * h);
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

} // namespace

TEST_SUITE("net") {

TEST_CASE("init_network shapes, bounds and determinism") {
    const NetworkParams tx = init_network({16, 16, 16},
                                          {Activation::tanh_fn, Activation::identity},
                                          RngStream(3));
    CHECK(tx.input_dim() == 16);
    CHECK(tx.output_dim() == 16);
    CHECK(tx.layers.size() == 2);

    const NetworkParams rx = init_network({16, 10, 1},
                                          {Activation::sigmoid, Activation::sigmoid},
                                          RngStream(4));
    CHECK(rx.layers[0].out == 10);
    CHECK(rx.layers[1].out == 1);

    // Glorot bound and zero biases.
    const double a0 = std::sqrt(6.0 / (16 + 10));
    for (double w : rx.layers[0].weights) CHECK(std::abs(w) <= a0);
    for (double b : rx.layers[0].bias) CHECK(b == 0.0);

    const NetworkParams again = init_network({16, 10, 1},
                                             {Activation::sigmoid, Activation::sigmoid},
                                             RngStream(4));
    CHECK(again.layers[0].weights == rx.layers[0].weights);
    CHECK(again.layers[1].weights == rx.layers[1].weights);

    CHECK_THROWS_AS(init_network({4, 4}, {Activation::sigmoid, Activation::sigmoid},
                                 RngStream(1)),
                    ConfigError);
}

TEST_CASE("forward fixed points of sigmoid and tanh") {
    NetworkParams net = identity_net(3);
    ForwardTrace trace;

    net.layers[0].act = Activation::sigmoid;
    forward(net, std::vector<double>{0.0, 0.0, 0.0}, trace);
    for (double v : trace.output()) CHECK(v == 0.5);

    net.layers[0].act = Activation::tanh_fn;
    forward(net, std::vector<double>{0.0, 0.0, 0.0}, trace);
    for (double v : trace.output()) CHECK(v == 0.0);
}

TEST_CASE("forward matches the straight-line oracle") {
    RngStream rng(5);
    const NetworkParams net = init_network(
        {6, 5, 4, 3},
        {Activation::tanh_fn, Activation::sigmoid, Activation::identity}, RngStream(6));
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> input(6);
        rng.fill_gaussian(input, 1.0);
        ForwardTrace trace;
        forward(net, input, trace);
        const std::vector<double> oracle = th::straight_line_forward(net, input);
        REQUIRE(trace.output().size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(std::abs(trace.output()[i] - oracle[i]) < 1e-12);
    }
}

TEST_CASE("forward is deterministic") {
    const NetworkParams net = init_network({4, 4, 2},
                                           {Activation::tanh_fn, Activation::sigmoid},
                                           RngStream(7));
    const std::vector<double> input = {0.3, -1.2, 0.9, 2.0};
    ForwardTrace a, b;
    forward(net, input, a);
    forward(net, input, b);
    CHECK(a.acts == b.acts);
}

TEST_CASE("backward zero upstream gradient gives zero grads") {
    const NetworkParams net = init_network({4, 3, 2},
                                           {Activation::sigmoid, Activation::identity},
                                           RngStream(8));
    ForwardTrace trace;
    forward(net, std::vector<double>{1.0, 2.0, 3.0, 4.0}, trace);
    const ParamGrads grads = backward(net, trace, std::vector<double>{0.0, 0.0});
    CHECK(grads.max_abs() == 0.0);
}

TEST_CASE("backward of a single affine layer") {
    NetworkParams net = identity_net(3);
    ForwardTrace trace;
    const std::vector<double> r0 = {1.5, -2.0, 0.25};
    forward(net, r0, trace);
    // loss = sum of outputs: d/db = 1, d/dW = r0 broadcast per row.
    const ParamGrads grads = backward(net, trace, std::vector<double>{1.0, 1.0, 1.0});
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(grads.layers[0].d_bias[r] == 1.0);
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(grads.layers[0].d_weights[r * 3 + c] == r0[c]);
    }
}

TEST_CASE("backward matches central finite differences") {
    RngStream rng(9);
    for (const auto& arch : {std::vector<std::size_t>{16, 16, 16},
                             std::vector<std::size_t>{16, 10, 1}}) {
        const std::vector<Activation> acts =
            arch.back() == 1 ? std::vector<Activation>{Activation::sigmoid, Activation::sigmoid}
                             : std::vector<Activation>{Activation::tanh_fn, Activation::identity};
        NetworkParams net = init_network(arch, acts, RngStream(10 + arch.back()));

        std::vector<double> input(arch.front());
        rng.fill_gaussian(input, 1.0);
        std::vector<double> upstream(arch.back());
        rng.fill_gaussian(upstream, 1.0);

        ForwardTrace trace;
        forward(net, input, trace);
        const ParamGrads grads = backward(net, trace, upstream);

        auto loss = [&](const NetworkParams& p) {
            ForwardTrace t;
            forward(p, input, t);
            double acc = 0.0;
            for (std::size_t i = 0; i < upstream.size(); ++i) acc += upstream[i] * t.output()[i];
            return acc;
        };

        for (int probe = 0; probe < 25; ++probe) {
            const std::size_t layer = rng.next_below(net.layers.size());
            const bool is_bias = rng.next_below(4) == 0;
            const std::size_t count = is_bias ? net.layers[layer].bias.size()
                                              : net.layers[layer].weights.size();
            const std::size_t idx = rng.next_below(count);
            const double fd = fd_param(net, layer, is_bias, idx, loss);
            const double an = is_bias ? grads.layers[layer].d_bias[idx]
                                      : grads.layers[layer].d_weights[idx];
            CHECK(rel_err(fd, an) < 1e-5);
        }
    }
}

TEST_CASE("backward returns the input gradient for chaining") {
    RngStream rng(11);
    NetworkParams net = init_network({4, 5, 2},
                                     {Activation::tanh_fn, Activation::identity}, RngStream(12));
    std::vector<double> input = {0.2, -0.4, 1.0, 0.8};
    std::vector<double> upstream = {0.7, -0.3};
    ForwardTrace trace;
    forward(net, input, trace);
    ParamGrads grads = ParamGrads::zeros_like(net);
    std::vector<double> d_input;
    backward(net, trace, upstream, grads, &d_input);
    REQUIRE(d_input.size() == 4);

    auto loss = [&](const std::vector<double>& in) {
        ForwardTrace t;
        forward(net, in, t);
        return upstream[0] * t.output()[0] + upstream[1] * t.output()[1];
    };
    const double h = 1e-6;
    for (std::size_t i = 0; i < input.size(); ++i) {
        std::vector<double> hi = input, lo = input;
        hi[i] += h;
        lo[i] -= h;
        const double fd = (loss(hi) - loss(lo)) / (2.0 * h);
        CHECK(rel_err(fd, d_input[i]) < 1e-5);
    }
}

TEST_CASE("sgd_step basics and quadratic decay") {
    NetworkParams net = identity_net(2);
    const NetworkParams before = net;
    ParamGrads grads = ParamGrads::zeros_like(net);

    sgd_step(net, grads, 0.5); // zero grads
    CHECK(net.layers[0].weights == before.layers[0].weights);

    grads.layers[0].d_weights[0] = 123.0;
    sgd_step(net, grads, 0.0); // eta = 0
    CHECK(net.layers[0].weights == before.layers[0].weights);

    // Scalar theta under loss theta^2: theta <- theta(1 - 2 eta), 50 steps.
    double theta = 1.0;
    NetworkParams scalar;
    Layer l;
    l.in = 1;
    l.out = 1;
    l.act = Activation::identity;
    l.weights = {theta};
    l.bias = {0.0};
    scalar.layers.push_back(l);
    for (int step = 0; step < 50; ++step) {
        ParamGrads g = ParamGrads::zeros_like(scalar);
        g.layers[0].d_weights[0] = 2.0 * scalar.layers[0].weights[0];
        sgd_step(scalar, g, 0.1);
    }
    CHECK(std::abs(scalar.layers[0].weights[0]) ==
          doctest::Approx(std::pow(0.8, 50)).epsilon(1e-10));
    CHECK(std::abs(scalar.layers[0].weights[0]) < 1e-4);
}

TEST_CASE("transmit output has unit power and the normalized flag") {
    RngStream rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const Waveform x = th::random_waveform(8, rng);
        const NetworkParams tx = init_network({16, 16, 16},
                                              {Activation::tanh_fn, Activation::identity},
                                              RngStream(15 + static_cast<std::uint64_t>(trial)));
        const Waveform y = transmit(tx, x);
        CHECK(y.normalized);
        CHECK(has_unit_power(y, 1e-12));
    }
}

TEST_CASE("identity transmitter passes the waveform through") {
    RngStream rng(16);
    Waveform x = th::random_waveform(4, rng, /*normalize=*/false);
    for (auto& c : x.chips) c *= 2.5; // non-unit input
    const NetworkParams net = identity_net(8);
    const Waveform y = transmit(net, x);
    double len = 0.0;
    for (const auto& c : x.chips) len += std::norm(c);
    len = std::sqrt(len);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(y.chips[i].real() == doctest::Approx(x.chips[i].real() / len).epsilon(1e-12));
        CHECK(y.chips[i].imag() == doctest::Approx(x.chips[i].imag() / len).epsilon(1e-12));
    }
}

TEST_CASE("transmit underflow is a hard error") {
    RngStream rng(17);
    const Waveform x = th::random_waveform(4, rng);
    NetworkParams net = init_network({8, 8, 8}, {Activation::tanh_fn, Activation::identity},
                                     RngStream(18));
    for (auto& layer : net.layers) {
        layer.weights.assign(layer.weights.size(), 0.0);
        layer.bias.assign(layer.bias.size(), 0.0);
    }
    CHECK_THROWS_AS(transmit(net, x), NormalizationUnderflowError);
}

TEST_CASE("gradients chain through the normalization layer") {
    RngStream rng(19);
    const Waveform x = th::random_waveform(8, rng);
    NetworkParams net = init_network({16, 16, 16},
                                     {Activation::tanh_fn, Activation::identity}, RngStream(20));
    std::vector<double> weights_vec(16);
    rng.fill_gaussian(weights_vec, 1.0);

    // Scalar function of the normalized output: g = <w, mean_real>.
    auto g_of = [&](const NetworkParams& p) {
        const TransmitTrace t = transmit_traced(p, x);
        double acc = 0.0;
        for (std::size_t i = 0; i < 16; ++i) acc += weights_vec[i] * t.mean_real[i];
        return acc;
    };

    const TransmitTrace trace = transmit_traced(net, x);
    ParamGrads grads = ParamGrads::zeros_like(net);
    transmit_backward(net, trace, weights_vec, grads);

    for (int probe = 0; probe < 40; ++probe) {
        const std::size_t layer = rng.next_below(net.layers.size());
        const bool is_bias = rng.next_below(4) == 0;
        const std::size_t count = is_bias ? net.layers[layer].bias.size()
                                          : net.layers[layer].weights.size();
        const std::size_t idx = rng.next_below(count);
        const double fd = fd_param(net, layer, is_bias, idx, g_of);
        const double an = is_bias ? grads.layers[layer].d_bias[idx]
                                  : grads.layers[layer].d_weights[idx];
        CHECK(rel_err(fd, an) < 1e-5);
    }
}

TEST_CASE("receive maps to (0,1) and zero nets give 0.5") {
    RngStream rng(21);
    NetworkParams net = init_network({8, 5, 1}, {Activation::sigmoid, Activation::sigmoid},
                                     RngStream(22));
    cvec z(4);
    for (auto& v : z) v = rng.next_cgaussian(4.0);
    const double p = receive(net, z);
    CHECK(p > 0.0);
    CHECK(p < 1.0);

    for (auto& layer : net.layers) {
        layer.weights.assign(layer.weights.size(), 0.0);
        layer.bias.assign(layer.bias.size(), 0.0);
    }
    CHECK(receive(net, z) == 0.5);
}

TEST_CASE("receive matches the duplicate-evaluation oracle") {
    RngStream rng(23);
    const NetworkParams net = init_network({8, 6, 1}, {Activation::sigmoid, Activation::sigmoid},
                                           RngStream(24));
    for (int trial = 0; trial < 20; ++trial) {
        cvec z(4);
        for (auto& v : z) v = rng.next_cgaussian(2.0);
        const double p = receive(net, z);
        const double oracle = th::straight_line_forward(net, c2r(z))[0];
        CHECK(std::abs(p - oracle) < 1e-12);
    }
}

TEST_CASE("clamp keeps probabilities strictly inside (0,1)") {
    CHECK(clamp_prob(0.0) == 1e-12);
    CHECK(clamp_prob(1.0) == 1.0 - 1e-12);
    CHECK(clamp_prob(0.25) == 0.25);
}

TEST_CASE("weight files round-trip bit-exactly") {
    const NetworkParams net = init_network({16, 10, 1},
                                           {Activation::sigmoid, Activation::sigmoid},
                                           RngStream(25));
    const auto path = std::filesystem::temp_directory_path() / "wavedet_net_roundtrip.net";
    save_network(path, net);
    const NetworkParams loaded = load_network(path);
    REQUIRE(loaded.layers.size() == net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        CHECK(loaded.layers[i].in == net.layers[i].in);
        CHECK(loaded.layers[i].out == net.layers[i].out);
        CHECK(loaded.layers[i].act == net.layers[i].act);
        CHECK(loaded.layers[i].weights == net.layers[i].weights);
        CHECK(loaded.layers[i].bias == net.layers[i].bias);
    }
    std::filesystem::remove(path);
}

TEST_CASE("weight file loader rejects garbage") {
    const auto path = std::filesystem::temp_directory_path() / "wavedet_net_bad.net";
    {
        std::ofstream f(path, std::ios::binary);
        f << "not a network";
    }
    CHECK_THROWS_AS(load_network(path), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_network(path), ConfigError); // missing file
}

} // TEST_SUITE
