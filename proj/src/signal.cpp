#include "wavedet/signal.hpp"

#include <cmath>
#include <string>

#include "wavedet/errors.hpp"

namespace wavedet {

bool has_unit_power(const Waveform& w, double tol) {
    double p = 0.0;
    for (const auto& c : w.chips) p += std::norm(c);
    return std::abs(p - 1.0) <= tol;
}

std::size_t EnvModel::cell_index(int k) const {
    const int K = static_cast<int>(chip_count());
    if (k == 0 || k <= -K || k >= K) throw ShiftRangeError("cell_index: lag out of range");
    return k < 0 ? static_cast<std::size_t>(k + K - 1) : static_cast<std::size_t>(k + K - 2);
}

void EnvModel::validate() const {
    if (!(sigma_alpha_sq >= 0.0))
        throw ConfigError("env.sigma_alpha_sq: must be >= 0");
    if (clutter_powers.size() % 2 != 0)
        throw ConfigError("env.clutter_powers: needs 2K-2 entries (empty only for K = 1)");
    for (double p : clutter_powers)
        if (!(p >= 0.0)) throw ConfigError("env.clutter_powers: entries must be >= 0");
    if (!(shape_beta >= 0.25 && shape_beta <= 2.0))
        throw ConfigError("env.beta: must lie in [0.25, 2]");
    if (!(sigma_n_sq > 0.0))
        throw ConfigError("env.sigma_n_sq: must be > 0");
    if (!(rho >= 0.0 && rho < 1.0))
        throw ConfigError("env.rho: must lie in [0, 1)");
    if (!(prior_p1 > 0.0 && prior_p1 < 1.0))
        throw ConfigError("env.prior_p1: must lie in (0, 1)");
}

EnvModel EnvModel::reference(std::size_t K, double beta) {
    EnvModel env;
    env.clutter_powers.assign(2 * K - 2, 1.0 / 7.0);
    env.shape_beta = beta;
    return env;
}

cvec shift_apply(const cvec& y, int k) {
    const int K = static_cast<int>(y.size());
    if (k <= -K || k >= K)
        throw ShiftRangeError("shift_apply: |k| must be <= K-1, got k=" + std::to_string(k));
    cvec out(y.size(), cplx{0.0, 0.0});
    for (int i = 0; i < K; ++i) {
        const int j = i - k;
        if (j >= 0 && j < K) out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(j)];
    }
    return out;
}

cvec shift_apply(const Waveform& y, int k) {
    return shift_apply(y.chips, k);
}

CovarianceMatrix noise_covariance(double sigma_n_sq, double rho, std::size_t K) {
    if (!(sigma_n_sq > 0.0)) throw ConfigError("noise_covariance: sigma_n_sq must be > 0");
    if (!(rho >= 0.0 && rho < 1.0))
        throw ConfigError("noise_covariance: rho must lie in [0, 1) for a PD matrix");
    CovarianceMatrix omega(K);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j)
            omega(i, j) = sigma_n_sq * std::pow(rho, std::abs(static_cast<double>(i) -
                                                              static_cast<double>(j)));
    return omega;
}

CovarianceMatrix clutter_covariance(const Waveform& y, const EnvModel& env) {
    const std::size_t K = y.size();
    if (env.clutter_powers.size() != 2 * K - 2)
        throw DimensionError("clutter_covariance: env has " +
                             std::to_string(env.clutter_powers.size()) +
                             " clutter cells, expected " + std::to_string(2 * K - 2));
    CovarianceMatrix omega(K);
    const int Ki = static_cast<int>(K);
    for (int k = -Ki + 1; k <= Ki - 1; ++k) {
        if (k == 0) continue;
        const double power = env.clutter_powers[env.cell_index(k)];
        if (power == 0.0) continue;
        const cvec v = shift_apply(y, k);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                omega(i, j) += power * v[i] * std::conj(v[j]);
    }
    return omega;
}

double whitened_quadratic(const cvec& y, const CovarianceMatrix& omega) {
    if (omega.dim() != y.size()) throw DimensionError("whitened_quadratic: dimension mismatch");
    const cvec x = solve_hermitian(omega, y);
    return dot_conj(y, x).real();
}

double whitened_quadratic(const Waveform& y, const CovarianceMatrix& omega) {
    return whitened_quadratic(y.chips, omega);
}

CovarianceMatrix total_covariance(const Waveform& y, const EnvModel& env) {
    CovarianceMatrix omega = clutter_covariance(y, env);
    omega += noise_covariance(env.sigma_n_sq, env.rho, y.size());
    return omega;
}

double scnr(const Waveform& y, const EnvModel& env) {
    return env.sigma_alpha_sq * whitened_quadratic(y, total_covariance(y, env));
}

} // namespace wavedet
