#ifndef WAVEDET_BASELINE_HPP
#define WAVEDET_BASELINE_HPP

#include <vector>

#include "wavedet/linalg.hpp"
#include "wavedet/signal.hpp"

namespace wavedet {

/// |z^H Omega^{-1} y|^2, the Gaussian-clutter square-law statistic.
double square_law_score(const cvec& z, const Waveform& y, const CovarianceMatrix& omega_total);

/// Precomputes w = Omega^{-1} y so batch scoring is one dot product.
class SquareLawDetector {
public:
    SquareLawDetector(const Waveform& y, const CovarianceMatrix& omega_total);
    double operator()(const cvec& z) const;

private:
    cvec whitened_;
};

/// Closed-form Gaussian ROC point: pd = pfa^(1/(1+scnr)).
/// Throws ConfigError for pfa outside (0, 1] or negative scnr.
double closed_form_pd(double pfa, double scnr);

struct OptimalWaveformResult {
    Waveform y;
    double objective = 0.0;                   // y^H (Omega_c(y)+Omega_n)^{-1} y
    std::vector<double> objective_trajectory; // accepted objectives, monotone
    bool converged = true;                    // false => hit max_iters (warning)
};

/**
 * @brief Unit-power waveform maximizing y^H (Omega_c(y) + Omega_n)^{-1} y.
 *
 * Fixed-point iteration: at each step assemble Omega_t from the current
 * iterate and move to the minimum-eigenvalue eigenvector of Omega_t (the
 * dominant eigenvector of Omega_t^{-1}). A step that would decrease the
 * objective is rejected and the iteration halts; the best iterate seen is
 * returned along with the accepted-objective trajectory.
 */
OptimalWaveformResult optimal_waveform(const EnvModel& env, std::size_t K, const Waveform& init,
                                       std::size_t max_iters = 500, double tol = 1e-12);

} // namespace wavedet

#endif // WAVEDET_BASELINE_HPP
