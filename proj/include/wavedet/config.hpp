#ifndef WAVEDET_CONFIG_HPP
#define WAVEDET_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wavedet/channel.hpp"
#include "wavedet/signal.hpp"
#include "wavedet/train.hpp"

namespace wavedet {

enum class RunMode { joint, rx_only, baseline };

enum class InitWaveformKind { stepped_frequency, file };

struct InitWaveformSpec {
    InitWaveformKind kind = InitWaveformKind::stepped_frequency;
    std::string path;

    bool operator==(const InitWaveformSpec&) const = default;
};

struct EvalConfig {
    std::size_t n_per_hyp = 200000;
    std::size_t n_points = 512;
    double beta_test = 2.0;
    std::size_t bootstrap = 0; // resample count; > 0 adds pd band columns

    bool operator==(const EvalConfig&) const = default;
};

/**
 * @brief Full experiment description, loadable from flat key=value text
 * with [section] headers.
 *
 * An empty file yields this struct's defaults, which are the reference
 * parameterization throughout (K=8, M=10, sigma^2=0.3, Q_R=5e4, Q_T=4e5,
 * sigma_alpha^2=50, clutter power 1/7, sigma_n^2=1, rho=0.4). Repeating
 * the [env] section defines a training mixture; the test environment is
 * the first env block with its shape replaced by eval.beta_test.
 */
struct ExperimentConfig {
    RunMode mode = RunMode::joint;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::size_t K = 8;
    std::size_t M = 10;
    std::vector<std::pair<EnvModel, double>> envs; // empty -> single reference env
    TrainConfig train;
    PolicyConfig policy;
    InitWaveformSpec init_waveform;
    EvalConfig eval;

    /// Mixture with defaults applied; weights validated to sum to 1.
    EnvMixture training_mixture() const;
    /// First env with shape_beta swapped for eval.beta_test.
    EnvModel test_env() const;

    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates a config file. Unknown keys are rejected with the
/// list of valid keys for their section; invariant violations name the field.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

/// Canonical serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

} // namespace wavedet

#endif // WAVEDET_CONFIG_HPP
