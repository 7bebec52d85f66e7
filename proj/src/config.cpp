#include "wavedet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "wavedet/errors.hpp"

namespace wavedet {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& value, const std::string& where) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty())
        throw ConfigError(where + ": cannot parse number '" + value + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& value, const std::string& where) {
    const std::string v = trim(value);
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty())
        throw ConfigError(where + ": cannot parse integer '" + value + "'");
    return x;
}

std::size_t parse_size(const std::string& value, const std::string& where) {
    return static_cast<std::size_t>(parse_u64(value, where));
}

bool parse_bool(const std::string& value, const std::string& where) {
    const std::string v = trim(value);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(where + ": expected true/false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& value, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, where));
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Raw env block: resolved into an EnvModel once K is known.
struct EnvRaw {
    double weight = 1.0;
    double beta = 2.0;
    double sigma_alpha_sq = 50.0;
    std::optional<double> clutter_power;
    std::optional<std::vector<double>> clutter_powers;
    double sigma_n_sq = 1.0;
    double rho = 0.4;
    double prior_p1 = 0.5;
};

const char* kExperimentKeys = "mode, seed, output_dir, K, M";
const char* kEnvKeys =
    "weight, beta, sigma_alpha_sq, clutter_power, clutter_powers, sigma_n_sq, rho, prior_p1";
const char* kTrainKeys =
    "eta, eta_rx, eta_tx, q_r, q_t, rx_steps, tx_steps, outer_iters, stop_tol, balanced, "
    "baseline_subtract, val_size";
const char* kPolicyKeys = "sigma_sq";
const char* kInitKeys = "kind, path";
const char* kEvalKeys = "n_per_hyp, n_points, beta_test, bootstrap";

[[noreturn]] void unknown_key(const std::string& section, const std::string& key,
                              const char* valid) {
    throw ConfigError("unknown key '" + key + "' in [" + section + "]; valid keys: " + valid);
}

} // namespace

EnvMixture ExperimentConfig::training_mixture() const {
    EnvMixture mixture = envs;
    if (mixture.empty()) mixture.emplace_back(EnvModel::reference(K, 2.0), 1.0);
    double wsum = 0.0;
    for (auto& [env, w] : mixture) {
        env.validate();
        if (env.chip_count() != K)
            throw ConfigError("env.clutter_powers: length must be 2K-2 = " +
                              std::to_string(2 * K - 2));
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ConfigError("env.weight: mixture weights must sum to 1");
    return mixture;
}

EnvModel ExperimentConfig::test_env() const {
    EnvModel env = training_mixture().front().first;
    env.shape_beta = eval.beta_test;
    env.validate();
    return env;
}

void ExperimentConfig::validate() const {
    if (K < 1) throw ConfigError("experiment.K: must be >= 1");
    if (M < 1) throw ConfigError("experiment.M: must be >= 1");
    train.validate();
    if (!(policy.sigma_sq > 0.0)) throw ConfigError("policy.sigma_sq: must be > 0");
    if (eval.n_per_hyp < 1) throw ConfigError("eval.n_per_hyp: must be >= 1");
    if (eval.n_points < 1) throw ConfigError("eval.n_points: must be >= 1");
    if (eval.bootstrap == 1) throw ConfigError("eval.bootstrap: needs >= 2 resamples (0 = off)");
    if (init_waveform.kind == InitWaveformKind::file && init_waveform.path.empty())
        throw ConfigError("init_waveform.path: required when kind = file");
    (void)training_mixture();
    (void)test_env();
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<EnvRaw> raw_envs;

    std::string section;
    EnvRaw* env = nullptr;

    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section == "env") {
                raw_envs.emplace_back();
                env = &raw_envs.back();
            } else if (section != "experiment" && section != "train" && section != "policy" &&
                       section != "init_waveform" && section != "eval") {
                throw ConfigError("unknown section [" + section +
                                  "]; valid sections: experiment, env, train, policy, "
                                  "init_waveform, eval");
            }
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string where = section + "." + key;

        if (section == "experiment") {
            if (key == "mode") {
                if (value == "joint") cfg.mode = RunMode::joint;
                else if (value == "rx_only") cfg.mode = RunMode::rx_only;
                else if (value == "baseline") cfg.mode = RunMode::baseline;
                else throw ConfigError("experiment.mode: expected joint, rx_only or baseline");
            } else if (key == "seed") cfg.seed = parse_u64(value, where);
            else if (key == "output_dir") cfg.output_dir = value;
            else if (key == "K") cfg.K = parse_size(value, where);
            else if (key == "M") cfg.M = parse_size(value, where);
            else unknown_key(section, key, kExperimentKeys);
        } else if (section == "env") {
            if (key == "weight") env->weight = parse_double(value, where);
            else if (key == "beta") env->beta = parse_double(value, where);
            else if (key == "sigma_alpha_sq") env->sigma_alpha_sq = parse_double(value, where);
            else if (key == "clutter_power") env->clutter_power = parse_double(value, where);
            else if (key == "clutter_powers") env->clutter_powers = parse_list(value, where);
            else if (key == "sigma_n_sq") env->sigma_n_sq = parse_double(value, where);
            else if (key == "rho") env->rho = parse_double(value, where);
            else if (key == "prior_p1") env->prior_p1 = parse_double(value, where);
            else unknown_key(section, key, kEnvKeys);
        } else if (section == "train") {
            if (key == "eta") cfg.train.eta = parse_double(value, where);
            else if (key == "eta_rx") cfg.train.eta_rx = parse_double(value, where);
            else if (key == "eta_tx") cfg.train.eta_tx = parse_double(value, where);
            else if (key == "q_r") cfg.train.q_r = parse_size(value, where);
            else if (key == "q_t") cfg.train.q_t = parse_size(value, where);
            else if (key == "rx_steps") cfg.train.rx_steps = parse_size(value, where);
            else if (key == "tx_steps") cfg.train.tx_steps = parse_size(value, where);
            else if (key == "outer_iters") cfg.train.outer_iters = parse_size(value, where);
            else if (key == "stop_tol") cfg.train.stop_tol = parse_double(value, where);
            else if (key == "balanced") cfg.train.balanced = parse_bool(value, where);
            else if (key == "baseline_subtract")
                cfg.train.baseline_subtract = parse_bool(value, where);
            else if (key == "val_size") cfg.train.val_size = parse_size(value, where);
            else unknown_key(section, key, kTrainKeys);
        } else if (section == "policy") {
            if (key == "sigma_sq") cfg.policy.sigma_sq = parse_double(value, where);
            else unknown_key(section, key, kPolicyKeys);
        } else if (section == "init_waveform") {
            if (key == "kind") {
                if (value == "stepped_frequency")
                    cfg.init_waveform.kind = InitWaveformKind::stepped_frequency;
                else if (value == "file") cfg.init_waveform.kind = InitWaveformKind::file;
                else throw ConfigError("init_waveform.kind: expected stepped_frequency or file");
            } else if (key == "path") cfg.init_waveform.path = value;
            else unknown_key(section, key, kInitKeys);
        } else if (section == "eval") {
            if (key == "n_per_hyp") cfg.eval.n_per_hyp = parse_size(value, where);
            else if (key == "n_points") cfg.eval.n_points = parse_size(value, where);
            else if (key == "beta_test") cfg.eval.beta_test = parse_double(value, where);
            else if (key == "bootstrap") cfg.eval.bootstrap = parse_size(value, where);
            else unknown_key(section, key, kEvalKeys);
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        }
    }

    for (const EnvRaw& raw : raw_envs) {
        if (raw.clutter_power && raw.clutter_powers)
            throw ConfigError("env: clutter_power and clutter_powers are mutually exclusive");
        EnvModel env_model;
        env_model.sigma_alpha_sq = raw.sigma_alpha_sq;
        env_model.shape_beta = raw.beta;
        env_model.sigma_n_sq = raw.sigma_n_sq;
        env_model.rho = raw.rho;
        env_model.prior_p1 = raw.prior_p1;
        if (raw.clutter_powers) {
            env_model.clutter_powers = *raw.clutter_powers;
        } else {
            const double p = raw.clutter_power.value_or(1.0 / 7.0);
            env_model.clutter_powers.assign(2 * cfg.K - 2, p);
        }
        cfg.envs.emplace_back(env_model, raw.weight);
    }
    if (cfg.envs.empty()) cfg.envs.emplace_back(EnvModel::reference(cfg.K, 2.0), 1.0);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("load_config: cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "mode = "
       << (cfg.mode == RunMode::joint ? "joint"
           : cfg.mode == RunMode::rx_only ? "rx_only" : "baseline")
       << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "output_dir = " << cfg.output_dir << "\n";
    os << "K = " << cfg.K << "\n";
    os << "M = " << cfg.M << "\n";

    for (const auto& [env, weight] : cfg.envs) {
        os << "\n[env]\n";
        os << "weight = " << fmt17(weight) << "\n";
        os << "beta = " << fmt17(env.shape_beta) << "\n";
        os << "sigma_alpha_sq = " << fmt17(env.sigma_alpha_sq) << "\n";
        os << "clutter_powers = ";
        for (std::size_t i = 0; i < env.clutter_powers.size(); ++i)
            os << (i ? "," : "") << fmt17(env.clutter_powers[i]);
        os << "\n";
        os << "sigma_n_sq = " << fmt17(env.sigma_n_sq) << "\n";
        os << "rho = " << fmt17(env.rho) << "\n";
        os << "prior_p1 = " << fmt17(env.prior_p1) << "\n";
    }

    os << "\n[train]\n";
    os << "eta = " << fmt17(cfg.train.eta) << "\n";
    if (cfg.train.eta_rx >= 0.0) os << "eta_rx = " << fmt17(cfg.train.eta_rx) << "\n";
    if (cfg.train.eta_tx >= 0.0) os << "eta_tx = " << fmt17(cfg.train.eta_tx) << "\n";
    os << "q_r = " << cfg.train.q_r << "\n";
    os << "q_t = " << cfg.train.q_t << "\n";
    os << "rx_steps = " << cfg.train.rx_steps << "\n";
    os << "tx_steps = " << cfg.train.tx_steps << "\n";
    os << "outer_iters = " << cfg.train.outer_iters << "\n";
    os << "stop_tol = " << fmt17(cfg.train.stop_tol) << "\n";
    os << "balanced = " << (cfg.train.balanced ? "true" : "false") << "\n";
    os << "baseline_subtract = " << (cfg.train.baseline_subtract ? "true" : "false") << "\n";
    os << "val_size = " << cfg.train.val_size << "\n";

    os << "\n[policy]\n";
    os << "sigma_sq = " << fmt17(cfg.policy.sigma_sq) << "\n";

    os << "\n[init_waveform]\n";
    os << "kind = "
       << (cfg.init_waveform.kind == InitWaveformKind::stepped_frequency ? "stepped_frequency"
                                                                         : "file")
       << "\n";
    if (!cfg.init_waveform.path.empty()) os << "path = " << cfg.init_waveform.path << "\n";

    os << "\n[eval]\n";
    os << "n_per_hyp = " << cfg.eval.n_per_hyp << "\n";
    os << "n_points = " << cfg.eval.n_points << "\n";
    os << "beta_test = " << fmt17(cfg.eval.beta_test) << "\n";
    os << "bootstrap = " << cfg.eval.bootstrap << "\n";
    return os.str();
}

} // namespace wavedet
