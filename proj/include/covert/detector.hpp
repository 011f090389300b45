#pragma once

#include <cmath>
#include <numeric>

#include "covert/model.hpp"

namespace covert {

/// The two channel gains Willie's radiometer depends on.
struct WillieChannel {
    double g_aw;  ///< |h_aw|^2
    double g_bw;  ///< |h_bw|^2
};

/// Support endpoints of Willie's per-slot average received power under each
/// hypothesis. These four numbers carve the threshold axis into the intervals
/// the detector analysis distinguishes.
struct ThresholdBoundaries {
    double h0_min;  ///< g_bw * p_min + sigma_w2
    double h0_max;  ///< g_bw * p_max + sigma_w2
    double h1_min;  ///< h0_min + g_aw * p_a
    double h1_max;  ///< h0_max + g_aw * p_a

    /// Disjoint supports: every threshold in (h0_max, h1_min] is error-free.
    bool supports_disjoint() const { return h0_max < h1_min; }
};

inline ThresholdBoundaries threshold_boundaries(const WillieChannel& ch, const SystemParams& p,
                                                const AnPowerPolicy& pol) {
    const double noise = p.sigma_w2;
    const double signal = ch.g_aw * p.p_a;
    const double lo = ch.g_bw * pol.p_min + noise;
    const double hi = ch.g_bw * pol.p_max + noise;
    return {lo, hi, lo + signal, hi + signal};
}

/// P[D1 | H0] for threshold gamma: 1 below the H0 support, a linear ramp
/// across it, 0 above. A degenerate p_min == p_max support collapses the ramp
/// to a unit step.
inline double false_alarm_probability(const WillieChannel& ch, const SystemParams& p,
                                      const AnPowerPolicy& pol, double gamma) {
    const ThresholdBoundaries b = threshold_boundaries(ch, p, pol);
    if (gamma <= b.h0_min) return 1.0;
    if (gamma > b.h0_max) return 0.0;
    return detail::clamp_probability((b.h0_max - gamma) / (ch.g_bw * pol.span()),
                                     "false_alarm_probability");
}

/// P[D0 | H1] for threshold gamma: 0 below the H1 support, a linear ramp
/// across it, 1 above.
inline double missed_detection_probability(const WillieChannel& ch, const SystemParams& p,
                                           const AnPowerPolicy& pol, double gamma) {
    const ThresholdBoundaries b = threshold_boundaries(ch, p, pol);
    if (gamma <= b.h1_min) return 0.0;
    if (gamma > b.h1_max) return 1.0;
    return detail::clamp_probability((gamma - b.h1_min) / (ch.g_bw * pol.span()),
                                     "missed_detection_probability");
}

/// Willie can be forced into detection errors iff the gain ratio satisfies
/// g_aw / g_bw <= (p_max - p_min) / p_a (boundary included).
inline bool detectable_error_condition(const WillieChannel& ch, const SystemParams& p,
                                       const AnPowerPolicy& pol) {
    if (!(ch.g_bw > 0.0))
        throw validation_error(validation_error::kind::degenerate_channel, "g_bw",
                               "g_bw = 0 is a probability-zero degenerate realization");
    return ch.g_aw / ch.g_bw <= pol.span() / p.p_a;
}

inline ThresholdRegime classify_threshold(const WillieChannel& ch, const SystemParams& p,
                                          const AnPowerPolicy& pol, double gamma) {
    const ThresholdBoundaries b = threshold_boundaries(ch, p, pol);
    if (gamma <= b.h0_min) return ThresholdRegime::always_alarm;
    if (gamma > b.h1_max) return ThresholdRegime::never_alarm;
    if (b.supports_disjoint()) {
        if (gamma <= b.h0_max) return ThresholdRegime::case_i_fa;
        if (gamma <= b.h1_min) return ThresholdRegime::error_free;
        return ThresholdRegime::case_i_md;
    }
    if (gamma <= b.h1_min) return ThresholdRegime::case_ii_fa;
    if (gamma <= b.h0_max) return ThresholdRegime::case_ii_mixed;
    return ThresholdRegime::case_ii_md;
}

struct OptimalThreshold {
    double gamma_star;
    ThresholdRegime regime;
};

/// Willie's loss-minimizing threshold. With overlapping supports it sits at
/// an overlap endpoint chosen by the prior ordering; with disjoint supports
/// any interior point is error-free and the midpoint is returned as a
/// deterministic representative.
inline OptimalThreshold optimal_threshold(const WillieChannel& ch, const SystemParams& p,
                                          const AnPowerPolicy& pol, const Priors& priors) {
    const ThresholdBoundaries b = threshold_boundaries(ch, p, pol);
    if (!detectable_error_condition(ch, p, pol))
        return {std::midpoint(b.h0_max, b.h1_min), ThresholdRegime::error_free};
    const double gamma = priors.transmission_favoured() ? b.h1_min : b.h0_max;
    return {gamma, classify_threshold(ch, p, pol, gamma)};
}

/// Willie's minimum error probability for one realization, together with the
/// threshold achieving it. The error probabilities are evaluated in a form
/// free of sigma_w2, so the optimum is exactly invariant to Willie's noise
/// floor even in floating point (only gamma_star shifts with it).
inline DetectionOutcome min_error_probability(const WillieChannel& ch, const SystemParams& p,
                                              const AnPowerPolicy& pol, const Priors& priors) {
    const OptimalThreshold opt = optimal_threshold(ch, p, pol, priors);
    if (opt.regime == ThresholdRegime::error_free)
        return {opt.gamma_star, 0.0, 0.0, 0.0, opt.regime};

    const double signal = ch.g_aw * p.p_a;
    const double ratio = signal == 0.0 ? 0.0 : signal / (ch.g_bw * pol.span());
    const double residual = detail::clamp_probability(1.0 - ratio, "min_error_probability");

    double p_fa = 0.0;
    double p_md = 0.0;
    if (priors.transmission_favoured())
        p_fa = residual;
    else
        p_md = residual;
    const double p_e = priors.pi0() * p_fa + priors.pi1() * p_md;
    return {opt.gamma_star, p_fa, p_md, p_e, opt.regime};
}

}  // namespace covert
