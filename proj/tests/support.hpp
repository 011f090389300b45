#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately re-derive results through a different route than the library
// (dense scans, Monte-Carlo counting, textbook formulas) so they stay valid
// checks of the closed forms.

#include <algorithm>
#include <cmath>
#include <vector>

#include "covert/analytics.hpp"
#include "covert/detector.hpp"
#include "covert/model.hpp"
#include "covert/rng.hpp"

namespace testsupport {

/// The default parameter set used throughout the numeric experiments:
/// p_a = 10 dB, sigma^2 = -10 dB, phi = 0.01, r_ab = 1, all fading means 1.
inline covert::SystemParams default_params() { return covert::SystemParams{}; }

inline constexpr double default_p_avg = 10'000.0;  // 40 dB

/// Dense threshold scan over the span of all four support boundaries
/// (plus the exact boundaries and midpoint themselves) — an independent check
/// that no threshold beats the closed-form optimum.
struct ThresholdScan {
    double min_pe;
    double argmin_gamma;
    int zero_error_points;
};

inline ThresholdScan scan_thresholds(const covert::WillieChannel& ch,
                                     const covert::SystemParams& p,
                                     const covert::AnPowerPolicy& pol,
                                     const covert::Priors& priors, int points) {
    const auto b = covert::threshold_boundaries(ch, p, pol);
    const double lo = 0.9 * b.h0_min;
    const double hi = 1.1 * b.h1_max;
    std::vector<double> gammas;
    gammas.reserve(static_cast<std::size_t>(points) + 5);
    for (int i = 0; i < points; ++i)
        gammas.push_back(lo + (hi - lo) * i / (points - 1));
    gammas.push_back(b.h0_min);
    gammas.push_back(b.h0_max);
    gammas.push_back(b.h1_min);
    gammas.push_back(b.h1_max);
    gammas.push_back(0.5 * (b.h0_max + b.h1_min));

    ThresholdScan scan{2.0, 0.0, 0};
    for (const double g : gammas) {
        const double pe = priors.pi0() * covert::false_alarm_probability(ch, p, pol, g) +
                          priors.pi1() * covert::missed_detection_probability(ch, p, pol, g);
        if (pe == 0.0) ++scan.zero_error_points;
        if (pe < scan.min_pe) {
            scan.min_pe = pe;
            scan.argmin_gamma = g;
        }
    }
    return scan;
}

/// Textbook-form outage evaluation (direct log ratio, no log1p rearrangement).
inline double outage_reference(const covert::SystemParams& p, double p_min, double p_max) {
    const double mu = p.mu();
    const double c = p.lambda_ab * p.phi * mu;
    const double a = p.lambda_bb * std::exp(-p.lambda_ab * mu * p.sigma_b2);
    if (p_min == p_max) return 1.0 - a / (p.lambda_bb + c * p_min);
    return 1.0 - a / ((p_max - p_min) * c) *
                     std::log((p.lambda_bb + c * p_max) / (p.lambda_bb + c * p_min));
}

}  // namespace testsupport
