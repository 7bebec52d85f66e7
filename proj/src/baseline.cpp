#include "wavedet/baseline.hpp"

#include <cmath>

#include "wavedet/errors.hpp"

namespace wavedet {

double square_law_score(const cvec& z, const Waveform& y, const CovarianceMatrix& omega_total) {
    return SquareLawDetector(y, omega_total)(z);
}

SquareLawDetector::SquareLawDetector(const Waveform& y, const CovarianceMatrix& omega_total)
    : whitened_(solve_hermitian(omega_total, y.chips)) {}

double SquareLawDetector::operator()(const cvec& z) const {
    if (z.size() != whitened_.size())
        throw DimensionError("SquareLawDetector: observation length mismatch");
    return std::norm(dot_conj(z, whitened_));
}

double closed_form_pd(double pfa, double scnr) {
    if (!(pfa > 0.0 && pfa <= 1.0))
        throw ConfigError("closed_form_pd: pfa must lie in (0, 1]");
    if (!(scnr >= 0.0)) throw ConfigError("closed_form_pd: scnr must be >= 0");
    return std::pow(pfa, 1.0 / (1.0 + scnr));
}

OptimalWaveformResult optimal_waveform(const EnvModel& env, std::size_t K, const Waveform& init,
                                       std::size_t max_iters, double tol) {
    if (init.size() != K) throw DimensionError("optimal_waveform: init length != K");
    const CovarianceMatrix omega_n = noise_covariance(env.sigma_n_sq, env.rho, K);

    auto objective_of = [&](const Waveform& y) {
        CovarianceMatrix omega = clutter_covariance(y, env);
        omega += omega_n;
        return whitened_quadratic(y, omega);
    };

    Waveform current = init;
    // Work on a unit-power copy so the objective matches the constraint set.
    double len = norm2(current.chips);
    if (len == 0.0) throw ConfigError("optimal_waveform: zero initialization");
    for (auto& c : current.chips) c /= len;
    current.normalized = true;

    OptimalWaveformResult result;
    result.y = current;
    result.objective = objective_of(current);
    result.objective_trajectory.push_back(result.objective);

    bool exhausted = true;
    for (std::size_t it = 0; it < max_iters; ++it) {
        CovarianceMatrix omega = clutter_covariance(current, env);
        omega += omega_n;
        const MinEigResult eig = min_eigpair(omega, current.chips);
        Waveform candidate{eig.vector, true};
        const double obj = objective_of(candidate);
        if (obj < result.objective) {
            // Reject and halt: the trajectory stays ascent-only.
            exhausted = false;
            break;
        }
        const double gain = obj - result.objective;
        current = candidate;
        result.y = candidate;
        result.objective = obj;
        result.objective_trajectory.push_back(obj);
        if (gain < tol) {
            exhausted = false;
            break;
        }
    }
    result.converged = !exhausted;
    return result;
}

} // namespace wavedet
