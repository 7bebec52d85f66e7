// Timing harness comparing the serial reference path against the
// OpenMP-parallel path on the four batch kernels. Both paths share the
// chunk decomposition, so outputs are bit-identical; only wall time may
// differ. Run with OMP_NUM_THREADS to vary the worker count.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wavedet/channel.hpp"
#include "wavedet/eval.hpp"
#include "wavedet/experiment.hpp"
#include "wavedet/train.hpp"

using namespace wavedet;

namespace {

template <typename Fn>
double time_seconds(Fn&& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-24s %10.1f ms %10.1f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

} // namespace

int main() {
    const std::size_t K = 8;
    const EnvModel env = EnvModel::reference(K, 2.0);
    const EnvMixture envs = {{env, 1.0}};
    const Waveform x = make_init_waveform(InitWaveformKind::stepped_frequency, K);
    const NetworkParams theta_t = init_transmitter(K, RngStream(1));
    const NetworkParams theta_r = init_receiver(K, 10, RngStream(2));
    const Waveform y = transmit(theta_t, x);

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled at build time\n");
#endif
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        const std::size_t Q = 100000;
        auto run = [&](ExecMode mode) { generate_batch(y, Q, envs, true, RngStream(3), mode); };
        report("generate_batch 1e5",
               time_seconds([&] { run(ExecMode::serial); }, 3),
               time_seconds([&] { run(ExecMode::parallel); }, 3));
    }
    {
        const Batch batch = generate_batch(y, 20000, envs, true, RngStream(4));
        auto run = [&](ExecMode mode) { receiver_loss_and_grad(theta_r, batch, mode); };
        report("receiver_grad 2e4",
               time_seconds([&] { run(ExecMode::serial); }, 3),
               time_seconds([&] { run(ExecMode::parallel); }, 3));
    }
    {
        Batch batch = generate_policy_batch(y, 50000, envs, true, PolicyConfig{}, RngStream(5));
        fill_losses(theta_r, batch);
        auto run = [&](ExecMode mode) {
            transmitter_grad(theta_t, x, batch, PolicyConfig{}, false, mode);
        };
        report("transmitter_grad 5e4",
               time_seconds([&] { run(ExecMode::serial); }, 3),
               time_seconds([&] { run(ExecMode::parallel); }, 3));
    }
    {
        auto scorer = [&](const cvec& z) { return receive(theta_r, z); };
        auto run = [&](ExecMode mode) {
            evaluate_scores(scorer, y, env, 50000, RngStream(6), mode);
        };
        report("evaluate_scores 5e4",
               time_seconds([&] { run(ExecMode::serial); }, 3),
               time_seconds([&] { run(ExecMode::parallel); }, 3));
    }
    return 0;
}
