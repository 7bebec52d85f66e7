#ifndef WAVEDET_EXPERIMENT_HPP
#define WAVEDET_EXPERIMENT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "wavedet/config.hpp"
#include "wavedet/parallel.hpp"
#include "wavedet/signal.hpp"

namespace wavedet {

/// Initialization waveform. stepped_frequency is the unit-power discrete
/// chirp x_k = exp(j pi (k-1)^2 / K) / sqrt(K); file reads 2K
/// whitespace/comma-separated doubles (interleaved real/imag), used as-is.
Waveform make_init_waveform(const InitWaveformSpec& spec, std::size_t K);
Waveform make_init_waveform(InitWaveformKind kind, std::size_t K);

struct ManifestEntry {
    std::string path; // relative to the output dir
    std::string hash; // git blob sha1 of the content
};

struct ArtifactManifest {
    std::vector<ManifestEntry> files;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::string mode;
    std::string init_waveform; // recorded for reproducibility
    std::vector<std::string> warnings;
};

/**
 * @brief Runs one experiment end to end and persists its artifacts.
 *
 * joint/rx_only: alternating training, then a Monte Carlo ROC of the
 * learned receiver on the test environment; writes weights_tx.net,
 * weights_rx.net, history.csv, roc.csv. baseline: the fixed-point optimal
 * waveform with the square-law detector; writes roc.csv (plus
 * roc_closed_form.csv when the test clutter is Gaussian). Every mode writes
 * manifest.json with content hashes, the seed, and wall time.
 */
ArtifactManifest run_experiment(const ExperimentConfig& cfg,
                                ExecMode mode = ExecMode::parallel);

/// ROC of stored weights (written by a previous run) on the config's test
/// environment; prefix names the weights_tx.net/weights_rx.net pair.
ArtifactManifest eval_weights(const ExperimentConfig& cfg, const std::string& weights_prefix,
                              ExecMode mode = ExecMode::parallel);

std::string manifest_to_json(const ArtifactManifest& m);

} // namespace wavedet

#endif // WAVEDET_EXPERIMENT_HPP
