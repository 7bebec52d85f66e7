#ifndef WAVEDET_EVAL_HPP
#define WAVEDET_EVAL_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "wavedet/channel.hpp"
#include "wavedet/linalg.hpp"
#include "wavedet/parallel.hpp"
#include "wavedet/rng.hpp"
#include "wavedet/signal.hpp"

namespace wavedet {

struct RocPoint {
    double threshold;
    double pfa;
    double pd;
    double pd_lo = 0.0; // bootstrap band, filled only by add_bootstrap_bands
    double pd_hi = 0.0;
};

/// Threshold-indexed operating points; pfa and pd are non-increasing in the
/// threshold by construction. has_bands marks bootstrap columns as filled.
struct RocCurve {
    std::vector<RocPoint> points;
    bool has_bands = false;
};

/// Detector abstraction scored on received vectors; must be thread-safe.
using ScoreFn = std::function<double(const cvec&)>;

/**
 * @brief Empirical ROC from per-hypothesis score samples.
 *
 * Thresholds are n_points pooled-score quantiles plus -inf/+inf endpoints;
 * pfa/pd count strict exceedances. Quantile thresholds put resolution where
 * the scores concentrate.
 */
RocCurve roc_from_scores(std::span<const double> scores_h0, std::span<const double> scores_h1,
                         std::size_t n_points);

struct ScoreSets {
    std::vector<double> h0;
    std::vector<double> h1;
};

/// n_per_hyp channel draws per hypothesis, each scored by score_fn.
/// Sample (m, q) runs on its own derived stream, so results are identical
/// in either ExecMode and under any thread count.
ScoreSets evaluate_scores(const ScoreFn& score_fn, const Waveform& y, const EnvModel& env,
                          std::size_t n_per_hyp, const RngStream& master,
                          ExecMode mode = ExecMode::parallel);

/// Monte Carlo ROC of a detector over the env.
RocCurve evaluate_system(const ScoreFn& score_fn, const Waveform& y, const EnvModel& env,
                         std::size_t n_per_hyp, std::size_t n_points, const RngStream& master,
                         ExecMode mode = ExecMode::parallel);

/// Pd at the threshold whose empirical false-alarm rate is pfa (order
/// statistic of the H0 scores; no grid involved).
double pd_at_pfa(std::span<const double> scores_h0, std::span<const double> scores_h1, double pfa);

/// Interpolated Pd at the target pfa from a finished curve.
double pd_at_pfa(const RocCurve& curve, double pfa);

/// Percentile bootstrap band (2.5/97.5) for pd at every threshold of the
/// curve, from `reps` resamples of the per-hypothesis scores.
void add_bootstrap_bands(RocCurve& curve, std::span<const double> scores_h1,
                         std::size_t reps, RngStream rng);

/// CSV rows `threshold,pfa,pd` with 17-significant-digit floats; curves
/// carrying bootstrap bands gain pd_lo,pd_hi columns.
void write_roc_csv(std::ostream& os, const RocCurve& curve);

} // namespace wavedet

#endif // WAVEDET_EVAL_HPP
