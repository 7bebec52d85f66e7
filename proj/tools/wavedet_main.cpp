#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "wavedet/config.hpp"
#include "wavedet/errors.hpp"
#include "wavedet/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitWarning = 4;

struct CommonOpts {
    std::string config_path;
    std::int64_t seed = -1;
    std::string out;
};

wavedet::ExperimentConfig load_with_overrides(const CommonOpts& opts) {
    wavedet::ExperimentConfig cfg = wavedet::load_config(opts.config_path);
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.out.empty()) cfg.output_dir = opts.out;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--out", opts.out, "override the output directory");
}

int report(const wavedet::ArtifactManifest& manifest, bool strict) {
    for (const auto& w : manifest.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("mode=%s seed=%llu wall=%.2fs -> %zu files\n", manifest.mode.c_str(),
                static_cast<unsigned long long>(manifest.seed), manifest.wall_seconds,
                manifest.files.size());
    if (strict && !manifest.warnings.empty()) return kExitWarning;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavedet: end-to-end learned radar waveform and detector"};
    app.require_subcommand(1);

    bool strict = false;
    app.add_flag("--strict", strict, "treat non-convergence warnings as errors");

    CommonOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "run the experiment described by the config");
    add_common(run, run_opts);

    CommonOpts eval_opts;
    std::string weights_prefix;
    CLI::App* eval = app.add_subcommand("eval", "evaluate stored weights on the test env");
    eval->add_option("--weights", weights_prefix,
                     "weights path prefix (expects <prefix>_tx.net and <prefix>_rx.net)")
        ->required();
    add_common(eval, eval_opts);

    CommonOpts base_opts;
    CLI::App* baseline =
        app.add_subcommand("baseline", "square-law detector with the fixed-point optimal waveform");
    add_common(baseline, base_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return report(wavedet::run_experiment(load_with_overrides(run_opts)), strict);
        }
        if (eval->parsed()) {
            return report(wavedet::eval_weights(load_with_overrides(eval_opts), weights_prefix),
                          strict);
        }
        wavedet::ExperimentConfig cfg = load_with_overrides(base_opts);
        cfg.mode = wavedet::RunMode::baseline;
        return report(wavedet::run_experiment(cfg), strict);
    } catch (const wavedet::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}
