#include "wavedet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "wavedet/errors.hpp"

namespace wavedet {

namespace {

/// Fraction of sorted scores strictly above the threshold.
double exceed_fraction(const std::vector<double>& sorted, double threshold) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), threshold);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

} // namespace

RocCurve roc_from_scores(std::span<const double> scores_h0, std::span<const double> scores_h1,
                         std::size_t n_points) {
    if (scores_h0.empty() || scores_h1.empty())
        throw ConfigError("roc_from_scores: score lists must be nonempty");
    if (n_points < 1) throw ConfigError("roc_from_scores: n_points must be >= 1");

    std::vector<double> pooled(scores_h0.begin(), scores_h0.end());
    pooled.insert(pooled.end(), scores_h1.begin(), scores_h1.end());
    std::sort(pooled.begin(), pooled.end());
    std::vector<double> h0(scores_h0.begin(), scores_h0.end());
    std::vector<double> h1(scores_h1.begin(), scores_h1.end());
    std::sort(h0.begin(), h0.end());
    std::sort(h1.begin(), h1.end());

    const double inf = std::numeric_limits<double>::infinity();
    RocCurve curve;
    curve.points.reserve(n_points + 2);
    curve.points.push_back({-inf, 1.0, 1.0});
    for (std::size_t i = 0; i < n_points; ++i) {
        const std::size_t rank =
            n_points == 1 ? (pooled.size() - 1) / 2
                          : static_cast<std::size_t>(
                                std::llround(static_cast<double>(i) *
                                             static_cast<double>(pooled.size() - 1) /
                                             static_cast<double>(n_points - 1)));
        const double threshold = pooled[rank];
        curve.points.push_back(
            {threshold, exceed_fraction(h0, threshold), exceed_fraction(h1, threshold)});
    }
    curve.points.push_back({inf, 0.0, 0.0});
    return curve;
}

ScoreSets evaluate_scores(const ScoreFn& score_fn, const Waveform& y, const EnvModel& env,
                          std::size_t n_per_hyp, const RngStream& master, ExecMode mode) {
    if (n_per_hyp < 1) throw ConfigError("evaluate_scores: n_per_hyp must be >= 1");
    const PreparedEnv prepared = prepare_env(env, y.size());

    ScoreSets sets;
    sets.h0.resize(n_per_hyp);
    sets.h1.resize(n_per_hyp);
    for (int m = 0; m <= 1; ++m) {
        auto& out = m == 0 ? sets.h0 : sets.h1;
        const RngStream hyp = master.derive(static_cast<std::uint64_t>(m));
        for_each_chunk(n_per_hyp, mode, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t q = begin; q < end; ++q) {
                const LabeledSample s = simulate_return(y, m, prepared, hyp.derive(q));
                out[q] = score_fn(s.z);
            }
        });
    }
    return sets;
}

RocCurve evaluate_system(const ScoreFn& score_fn, const Waveform& y, const EnvModel& env,
                         std::size_t n_per_hyp, std::size_t n_points, const RngStream& master,
                         ExecMode mode) {
    const ScoreSets sets = evaluate_scores(score_fn, y, env, n_per_hyp, master, mode);
    return roc_from_scores(sets.h0, sets.h1, n_points);
}

double pd_at_pfa(std::span<const double> scores_h0, std::span<const double> scores_h1,
                 double pfa) {
    if (scores_h0.empty() || scores_h1.empty())
        throw ConfigError("pd_at_pfa: score lists must be nonempty");
    if (!(pfa > 0.0 && pfa <= 1.0)) throw ConfigError("pd_at_pfa: pfa must lie in (0, 1]");
    std::vector<double> h0(scores_h0.begin(), scores_h0.end());
    std::sort(h0.begin(), h0.end(), std::greater<>());
    const auto k = static_cast<std::size_t>(
        std::llround(pfa * static_cast<double>(h0.size())));
    const double threshold = h0[std::min(k, h0.size() - 1)];
    std::size_t hits = 0;
    for (double s : scores_h1)
        if (s > threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(scores_h1.size());
}

double pd_at_pfa(const RocCurve& curve, double pfa) {
    if (curve.points.empty()) throw ConfigError("pd_at_pfa: empty curve");
    // Points are ordered by threshold, so pfa is non-increasing along them.
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const RocPoint& hi = curve.points[i - 1]; // larger pfa
        const RocPoint& lo = curve.points[i];
        if (lo.pfa <= pfa && pfa <= hi.pfa) {
            if (hi.pfa == lo.pfa) return 0.5 * (hi.pd + lo.pd);
            const double t = (pfa - lo.pfa) / (hi.pfa - lo.pfa);
            return lo.pd + t * (hi.pd - lo.pd);
        }
    }
    return curve.points.back().pd;
}

void add_bootstrap_bands(RocCurve& curve, std::span<const double> scores_h1,
                         std::size_t reps, RngStream rng) {
    if (reps < 2) throw ConfigError("add_bootstrap_bands: need at least 2 resamples");
    if (scores_h1.empty())
        throw ConfigError("add_bootstrap_bands: score lists must be nonempty");
    std::vector<std::vector<double>> pd_samples(curve.points.size(),
                                                std::vector<double>(reps));
    std::vector<double> resampled(scores_h1.size());
    for (std::size_t r = 0; r < reps; ++r) {
        for (auto& v : resampled) v = scores_h1[rng.next_below(scores_h1.size())];
        std::sort(resampled.begin(), resampled.end());
        for (std::size_t i = 0; i < curve.points.size(); ++i)
            pd_samples[i][r] = exceed_fraction(resampled, curve.points[i].threshold);
    }
    const auto lo_rank = static_cast<std::size_t>(0.025 * static_cast<double>(reps - 1));
    const auto hi_rank =
        static_cast<std::size_t>(std::ceil(0.975 * static_cast<double>(reps - 1)));
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        auto& samples = pd_samples[i];
        std::sort(samples.begin(), samples.end());
        curve.points[i].pd_lo = samples[lo_rank];
        curve.points[i].pd_hi = samples[hi_rank];
    }
    curve.has_bands = true;
}

void write_roc_csv(std::ostream& os, const RocCurve& curve) {
    char buf[192];
    if (curve.has_bands) {
        os << "threshold,pfa,pd,pd_lo,pd_hi\n";
        for (const RocPoint& p : curve.points) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.threshold,
                          p.pfa, p.pd, p.pd_lo, p.pd_hi);
            os << buf;
        }
        return;
    }
    os << "threshold,pfa,pd\n";
    for (const RocPoint& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.threshold, p.pfa, p.pd);
        os << buf;
    }
}

} // namespace wavedet
