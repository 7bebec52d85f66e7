#include "wavedet/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "wavedet/baseline.hpp"
#include "wavedet/errors.hpp"
#include "wavedet/eval.hpp"
#include "wavedet/net.hpp"
#include "wavedet/sha1.hpp"
#include "wavedet/train.hpp"

namespace fs = std::filesystem;

namespace wavedet {

namespace {

// Substream tags under the experiment root.
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kEvalStream = 2;
constexpr std::uint64_t kBootstrapStream = 3;

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("run_experiment: cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string history_csv(const std::vector<RoundRecord>& history, bool with_tx) {
    std::ostringstream os;
    os << "round,stage,loss,scnr\n";
    for (const RoundRecord& r : history) {
        os << r.round << ",rx," << fmt17(r.rx_loss) << "," << fmt17(r.scnr_rx) << "\n";
        os << r.round << ",val," << fmt17(r.val_loss) << "," << fmt17(r.scnr_rx) << "\n";
        if (with_tx)
            os << r.round << ",tx," << fmt17(r.tx_loss) << "," << fmt17(r.scnr) << "\n";
    }
    return os.str();
}

std::string waveform_csv(const Waveform& y) {
    std::ostringstream os;
    os << "re,im\n";
    for (const cplx& c : y.chips) os << fmt17(c.real()) << "," << fmt17(c.imag()) << "\n";
    return os.str();
}

std::string roc_csv_string(const RocCurve& curve) {
    std::ostringstream os;
    write_roc_csv(os, curve);
    return os.str();
}

ScoreFn receiver_scorer(NetworkParams theta_r) {
    return [theta = std::move(theta_r)](const cvec& z) { return receive(theta, z); };
}

class ArtifactWriter {
public:
    ArtifactWriter(fs::path dir, ArtifactManifest& manifest)
        : dir_(std::move(dir)), manifest_(manifest) {
        fs::create_directories(dir_);
    }

    void add(const std::string& name, const std::string& content) {
        write_text_file(dir_ / name, content);
        manifest_.files.push_back({name, git_blob_hash(content)});
    }

    void add_network(const std::string& name, const NetworkParams& params) {
        save_network(dir_ / name, params);
        manifest_.files.push_back({name, git_blob_hash_file(dir_ / name)});
    }

private:
    fs::path dir_;
    ArtifactManifest& manifest_;
};

} // namespace

Waveform make_init_waveform(InitWaveformKind kind, std::size_t K) {
    return make_init_waveform(InitWaveformSpec{kind, ""}, K);
}

Waveform make_init_waveform(const InitWaveformSpec& spec, std::size_t K) {
    if (K < 1) throw ConfigError("make_init_waveform: K must be >= 1");
    if (spec.kind == InitWaveformKind::stepped_frequency) {
        Waveform x;
        x.chips.resize(K);
        const double amp = 1.0 / std::sqrt(static_cast<double>(K));
        for (std::size_t k = 1; k <= K; ++k) {
            const double phase = std::numbers::pi * static_cast<double>((k - 1) * (k - 1)) /
                                 static_cast<double>(K);
            x.chips[k - 1] = {amp * std::cos(phase), amp * std::sin(phase)};
        }
        x.normalized = true;
        return x;
    }
    std::ifstream f(spec.path);
    if (!f) throw ConfigError("make_init_waveform: cannot open " + spec.path);
    std::vector<double> values;
    std::string token;
    while (f >> token) {
        std::stringstream parts(token);
        std::string item;
        while (std::getline(parts, item, ',')) {
            if (item.empty()) continue;
            values.push_back(std::strtod(item.c_str(), nullptr));
        }
    }
    if (values.size() != 2 * K)
        throw ConfigError("make_init_waveform: file must hold 2K = " + std::to_string(2 * K) +
                          " values, found " + std::to_string(values.size()));
    Waveform x;
    x.chips = r2c(values);
    return x;
}

ArtifactManifest run_experiment(const ExperimentConfig& cfg, ExecMode mode) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    ArtifactManifest manifest;
    manifest.seed = cfg.seed;
    manifest.mode = cfg.mode == RunMode::joint ? "joint"
                    : cfg.mode == RunMode::rx_only ? "rx_only" : "baseline";
    manifest.init_waveform =
        cfg.init_waveform.kind == InitWaveformKind::stepped_frequency
            ? "stepped_frequency"
            : "file:" + cfg.init_waveform.path;
    ArtifactWriter out(cfg.output_dir, manifest);
    out.add("config.ini", serialize_config(cfg));

    const Waveform x = make_init_waveform(cfg.init_waveform, cfg.K);
    const RngStream root(cfg.seed);
    const EnvModel env_test = cfg.test_env();

    if (cfg.mode == RunMode::baseline) {
        const OptimalWaveformResult opt = optimal_waveform(env_test, cfg.K, x);
        if (!opt.converged)
            manifest.warnings.push_back("optimal_waveform: hit max_iters before tolerance");
        const CovarianceMatrix omega = total_covariance(opt.y, env_test);
        const SquareLawDetector detector(opt.y, omega);
        const ScoreSets scores = evaluate_scores([&detector](const cvec& z) { return detector(z); },
                                                 opt.y, env_test, cfg.eval.n_per_hyp,
                                                 root.derive(kEvalStream), mode);
        RocCurve roc = roc_from_scores(scores.h0, scores.h1, cfg.eval.n_points);
        if (cfg.eval.bootstrap > 0)
            add_bootstrap_bands(roc, scores.h1, cfg.eval.bootstrap,
                                root.derive(kBootstrapStream));
        out.add("roc.csv", roc_csv_string(roc));
        out.add("waveform.csv", waveform_csv(opt.y));

        if (env_test.shape_beta == 2.0) {
            const double s = env_test.sigma_alpha_sq * opt.objective;
            std::ostringstream os;
            os << "pfa,pd\n";
            for (std::size_t i = 0; i < cfg.eval.n_points; ++i) {
                const double frac = static_cast<double>(i) /
                                    static_cast<double>(std::max<std::size_t>(cfg.eval.n_points - 1, 1));
                const double pfa = std::pow(10.0, -4.0 * (1.0 - frac)); // 1e-4 .. 1
                os << fmt17(pfa) << "," << fmt17(closed_form_pd(pfa, s)) << "\n";
            }
            out.add("roc_closed_form.csv", os.str());
        }
    } else {
        TrainConfig tc = cfg.train;
        if (cfg.mode == RunMode::rx_only) tc.tx_steps = 0;
        const TrainOutcome outcome = alternate_training(tc, cfg.policy, cfg.training_mixture(),
                                                        x, cfg.M, root.derive(kTrainStream), mode);
        out.add_network("weights_tx.net", outcome.theta_t);
        out.add_network("weights_rx.net", outcome.theta_r);
        out.add("history.csv", history_csv(outcome.history, tc.tx_steps > 0));

        const Waveform y_final = transmit(outcome.theta_t, x);
        const ScoreSets scores = evaluate_scores(receiver_scorer(outcome.theta_r), y_final,
                                                 env_test, cfg.eval.n_per_hyp,
                                                 root.derive(kEvalStream), mode);
        RocCurve roc = roc_from_scores(scores.h0, scores.h1, cfg.eval.n_points);
        if (cfg.eval.bootstrap > 0)
            add_bootstrap_bands(roc, scores.h1, cfg.eval.bootstrap,
                                root.derive(kBootstrapStream));
        out.add("roc.csv", roc_csv_string(roc));
        out.add("waveform.csv", waveform_csv(y_final));
    }

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(fs::path(cfg.output_dir) / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

ArtifactManifest eval_weights(const ExperimentConfig& cfg, const std::string& weights_prefix,
                              ExecMode mode) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    ArtifactManifest manifest;
    manifest.seed = cfg.seed;
    manifest.mode = "eval";
    manifest.init_waveform =
        cfg.init_waveform.kind == InitWaveformKind::stepped_frequency
            ? "stepped_frequency"
            : "file:" + cfg.init_waveform.path;
    ArtifactWriter out(cfg.output_dir, manifest);

    const NetworkParams theta_t = load_network(weights_prefix + "_tx.net");
    const NetworkParams theta_r = load_network(weights_prefix + "_rx.net");
    const Waveform x = make_init_waveform(cfg.init_waveform, cfg.K);
    const Waveform y = transmit(theta_t, x);

    const RngStream root(cfg.seed);
    const ScoreSets scores = evaluate_scores(receiver_scorer(theta_r), y, cfg.test_env(),
                                             cfg.eval.n_per_hyp, root.derive(kEvalStream), mode);
    RocCurve roc = roc_from_scores(scores.h0, scores.h1, cfg.eval.n_points);
    if (cfg.eval.bootstrap > 0)
        add_bootstrap_bands(roc, scores.h1, cfg.eval.bootstrap,
                            root.derive(kBootstrapStream));
    out.add("roc.csv", roc_csv_string(roc));
    out.add("waveform.csv", waveform_csv(y));

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(fs::path(cfg.output_dir) / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

std::string manifest_to_json(const ArtifactManifest& m) {
    nlohmann::json j;
    j["seed"] = m.seed;
    j["mode"] = m.mode;
    j["init_waveform"] = m.init_waveform;
    j["wall_time_seconds"] = m.wall_seconds;
    j["files"] = nlohmann::json::array();
    for (const ManifestEntry& e : m.files)
        j["files"].push_back({{"path", e.path}, {"sha1", e.hash}});
    j["warnings"] = m.warnings;
    return j.dump(2) + "\n";
}

} // namespace wavedet
