#ifndef WAVEDET_SIGNAL_HPP
#define WAVEDET_SIGNAL_HPP

#include <cstddef>
#include <vector>

#include "wavedet/linalg.hpp"

namespace wavedet {

/// Transmit waveform: K complex baseband chips. `normalized` marks unit
/// power (|chips|^2 summing to 1 within 1e-12).
struct Waveform {
    cvec chips;
    bool normalized = false;

    std::size_t size() const { return chips.size(); }
};

bool has_unit_power(const Waveform& w, double tol = 1e-12);

/**
 * @brief Channel statistics: target gain variance, per-cell clutter powers,
 * Weibull shape, noise power, one-lag noise correlation, and the prior on
 * target presence.
 *
 * clutter_powers holds sigma_{c,k}^2 for k = -K+1..-1, 1..K-1 in ascending
 * k order (2K-2 entries, lag 0 excluded).
 */
struct EnvModel {
    double sigma_alpha_sq = 50.0;
    std::vector<double> clutter_powers;
    double shape_beta = 2.0;
    double sigma_n_sq = 1.0;
    double rho = 0.4;
    double prior_p1 = 0.5;

    std::size_t num_cells() const { return clutter_powers.size(); }
    std::size_t chip_count() const { return clutter_powers.size() / 2 + 1; }

    /// Index of sigma_{c,k}^2 in clutter_powers for k != 0, |k| <= K-1.
    std::size_t cell_index(int k) const;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Reference parameterization: clutter power 1/7 in every cell,
    /// sigma_alpha^2 = 50, sigma_n^2 = 1, rho = 0.4, prior 1/2.
    static EnvModel reference(std::size_t K, double beta);

    bool operator==(const EnvModel&) const = default;
};

/**
 * @brief J_k y as an index shift: output[i] = y[i-k] where defined, else 0.
 *
 * The shifting matrices [J_k]_{i,j} = 1 iff i-j = k exist only in test
 * oracles; this is O(K) and allocates nothing beyond the result.
 * Throws ShiftRangeError when |k| >= K.
 */
cvec shift_apply(const cvec& y, int k);
cvec shift_apply(const Waveform& y, int k);

/// Toeplitz noise covariance [Omega_n]_{ij} = sigma_n_sq * rho^|i-j|.
/// Throws ConfigError for rho outside [0,1) or non-positive power.
CovarianceMatrix noise_covariance(double sigma_n_sq, double rho, std::size_t K);

/// Clutter covariance sum_{k != 0} sigma_{c,k}^2 (J_k y)(J_k y)^H.
/// Throws DimensionError when env.clutter_powers does not match 2K-2.
CovarianceMatrix clutter_covariance(const Waveform& y, const EnvModel& env);

/**
 * @brief y^H Omega^{-1} y as a nonnegative real.
 *
 * Solves the Hermitian system instead of forming the inverse; applies the
 * 1e-12*trace/K regularization when Omega is on the PSD boundary and throws
 * ConditioningError beyond that.
 */
double whitened_quadratic(const Waveform& y, const CovarianceMatrix& omega);
double whitened_quadratic(const cvec& y, const CovarianceMatrix& omega);

/// Total disturbance covariance Omega_c(y) + Omega_n for env.
CovarianceMatrix total_covariance(const Waveform& y, const EnvModel& env);

/// sigma_alpha^2 * y^H (Omega_c + Omega_n)^{-1} y, the exponent driver of
/// the closed-form detection probability.
double scnr(const Waveform& y, const EnvModel& env);

} // namespace wavedet

#endif // WAVEDET_SIGNAL_HPP
