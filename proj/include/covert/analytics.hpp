#pragma once

#include <cmath>

#include "covert/model.hpp"

namespace covert {

/// kappa(x) = 1 + x ln x - x^2 on [0, 1]; the fading-averaged error shape.
/// kappa(0) = 1 by continuity (x ln x -> 0) and kappa(1) = 0. Inputs below
/// 1e-300 short-circuit to 1 so subnormal x cannot distort ln.
inline double kappa(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw validation_error(validation_error::kind::argument_out_of_domain, "x",
                               "kappa is defined on [0, 1]");
    if (x < 1e-300) return 1.0;
    return 1.0 + x * std::log(x) - x * x;
}

/// The ratio t = lambda_bw p_a / (lambda_bw p_a + lambda_aw (p_max - p_min));
/// reduces to the p_min = 0 form s when the support starts at zero.
inline double power_randomization_ratio(const SystemParams& p, const AnPowerPolicy& pol) {
    const double base = p.lambda_bw * p.p_a;
    return base / (base + p.lambda_aw * pol.span());
}

/// Fading-averaged probability that the Alice -> Bob link fails to carry
/// r_ab, over the channel gains and Bob's AN power draw. The degenerate
/// p_min == p_max support uses the analytic point-mass limit instead of the
/// 0/0 form.
inline double outage_probability(const SystemParams& p, const AnPowerPolicy& pol) {
    const double mu = p.mu();
    const double leak = p.lambda_ab * p.phi * mu;  // AN-to-outage coupling
    const double noise_term = p.lambda_bb * std::exp(-p.lambda_ab * mu * p.sigma_b2);
    const double at_min = p.lambda_bb + leak * pol.p_min;
    if (pol.degenerate()) return 1.0 - noise_term / at_min;
    const double spread = leak * pol.span();
    return 1.0 - noise_term / spread * std::log1p(spread / at_min);
}

/// Fading-averaged minimum detection error probability at Willie under his
/// optimal per-slot threshold: min(pi0, pi1) * kappa(t).
inline double expected_min_error(const SystemParams& p, const AnPowerPolicy& pol,
                                 const Priors& priors) {
    return priors.min_prior() * kappa(power_randomization_ratio(p, pol));
}

/// The closed-form figures of merit for one (params, policy, priors) triple.
struct CovertnessSummary {
    double delta_ab;        ///< transmission outage probability
    double expected_pe;     ///< fading-averaged minimum detection error
    double effective_rate;  ///< pi1 * r_ab * (1 - delta_ab)
    double s_or_t;          ///< the randomization ratio behind expected_pe
};

inline CovertnessSummary summarize(const SystemParams& p, const AnPowerPolicy& pol,
                                   const Priors& priors) {
    validate(p, pol, priors);
    const double delta = outage_probability(p, pol);
    return {
        delta,
        expected_min_error(p, pol, priors),
        priors.pi1() * p.r_ab * (1.0 - delta),
        power_randomization_ratio(p, pol),
    };
}

}  // namespace covert
