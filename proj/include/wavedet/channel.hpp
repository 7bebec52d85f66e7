#ifndef WAVEDET_CHANNEL_HPP
#define WAVEDET_CHANNEL_HPP

#include <optional>
#include <utility>
#include <vector>

#include "wavedet/linalg.hpp"
#include "wavedet/parallel.hpp"
#include "wavedet/rng.hpp"
#include "wavedet/signal.hpp"

namespace wavedet {

/// One labeled draw from the radar channel. y_sampled and loss are filled
/// only on transmitter-training batches.
struct LabeledSample {
    int m = 0;
    cvec z;
    std::optional<Waveform> y_sampled;
    std::optional<double> loss;
};

using Batch = std::vector<LabeledSample>;

/// Mixture of channel models with selection weights (summing to 1).
using EnvMixture = std::vector<std::pair<EnvModel, double>>;

/// Env plus the precomputed noise Cholesky factor; build once per batch.
struct PreparedEnv {
    EnvModel env;
    CMatrix noise_chol;
};

PreparedEnv prepare_env(const EnvModel& env, std::size_t K);

/// Swerling I target gain alpha ~ CN(0, sigma_alpha_sq).
cplx draw_target_gain(const EnvModel& env, RngStream& rng);

/**
 * @brief Coherent Weibull scatter coefficient: Weibull modulus, independent
 * uniform phase.
 *
 * The Weibull scale solves E[r^2] = power, i.e. b = sqrt(power / Gamma(1 + 2/beta)),
 * so the stated per-cell power is matched for every shape. beta = 2 reduces to
 * CN(0, power).
 */
cplx draw_coherent_weibull(double beta, double power, RngStream& rng);

/// L * w for deterministic w; the linear map behind draw_colored_noise.
cvec colored_noise_from_white(const CMatrix& noise_chol, const cvec& w);

/// Correlated noise n = L w, w i.i.d. CN(0,1).
cvec draw_colored_noise(const CMatrix& noise_chol, RngStream& rng);

/// Deterministic composition z = alpha*y + sum_k gamma_k J_k y + noise.
/// gammas are ordered by ascending lag (k = -K+1..-1, 1..K-1).
cvec compose_return(const Waveform& y, cplx alpha, const cvec& gammas, const cvec& noise);

/**
 * @brief One draw of the binary-hypothesis channel.
 *
 * m=1: z = alpha y + c + n; m=0: z = c + n. The target gain is drawn under
 * both hypotheses and multiplied by m, so a fixed stream yields identical
 * clutter/noise realizations for either label.
 */
LabeledSample simulate_return(const Waveform& y, int m, const PreparedEnv& env, RngStream rng);
LabeledSample simulate_return(const Waveform& y, int m, const EnvModel& env, RngStream rng);

/**
 * @brief Q labeled samples from the env mixture, sample q on substream q+1.
 *
 * balanced: exactly ceil(Q/2) target-present labels, order shuffled on
 * substream 0; otherwise labels are Bernoulli(prior) per sample. Identical
 * (seed, stream-id) reproduce bit-identical batches in either ExecMode.
 */
Batch generate_batch(const Waveform& y, std::size_t Q, const EnvMixture& envs, bool balanced,
                     const RngStream& master, ExecMode mode = ExecMode::parallel);

/// Balanced label vector used by generate_batch; exposed for the policy path.
std::vector<int> balanced_labels(std::size_t Q, RngStream shuffle_stream);

/// Weighted env pick (one uniform when the mixture has > 1 entry).
std::size_t pick_env(const EnvMixture& envs, RngStream& rng);

} // namespace wavedet

#endif // WAVEDET_CHANNEL_HPP
