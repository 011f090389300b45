#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "covert/errors.hpp"

namespace covert {

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Channel, power and rate constants of one covert link. All powers are in
/// linear units; dB exists only at the CLI boundary. Squared channel gains
/// |h_ij|^2 are exponential with rate lambda_ij (mean gain 1/lambda_ij).
struct SystemParams {
    double lambda_ab{1.0};  ///< Alice -> Bob fading rate
    double lambda_aw{1.0};  ///< Alice -> Willie fading rate
    double lambda_bw{1.0};  ///< Bob -> Willie fading rate
    double lambda_bb{1.0};  ///< Bob self-interference fading rate
    double p_a{db_to_linear(10.0)};           ///< Alice's fixed transmit power
    double sigma_b2{db_to_linear(-10.0)};     ///< noise variance at Bob
    double sigma_w2{db_to_linear(-10.0)};     ///< noise variance at Willie
    double phi{0.01};   ///< residual self-interference fraction, (0, 1]
    double r_ab{1.0};   ///< fixed Alice -> Bob rate, bits per channel use

    /// SNR-per-power threshold for decoding at rate r_ab: (2^r_ab - 1) / p_a.
    /// Derived on demand so it can never go stale.
    double mu() const { return (std::exp2(r_ab) - 1.0) / p_a; }

    bool operator==(const SystemParams&) const = default;
};

/// Bob's artificial-noise power law: per-slot power is uniform on
/// [p_min, p_max], subject to the average-power cap p_min + p_max <= 2 p_avg.
struct AnPowerPolicy {
    double p_min{0.0};
    double p_max{0.0};
    double p_avg{db_to_linear(40.0)};

    double span() const { return p_max - p_min; }
    bool degenerate() const { return p_min == p_max; }

    bool operator==(const AnPowerPolicy&) const = default;
};

/// Prior transmission probabilities (pi0, pi1). Only pi1 is stored; pi0 is
/// always the complement, so the pair can never drift out of sum.
class Priors {
public:
    Priors() = default;
    explicit Priors(double pi1) : pi1_(pi1) {}

    double pi1() const { return pi1_; }
    double pi0() const { return 1.0 - pi1_; }
    double min_prior() const { return std::min(pi0(), pi1_); }

    /// Tie pi1 == pi0 deliberately lands on the pi1-favoured branch of the
    /// optimal-threshold rule, which is written with ">=".
    bool transmission_favoured() const { return pi1_ >= pi0(); }

    bool operator==(const Priors&) const = default;

private:
    double pi1_{0.5};
};

/// One fading draw: realized squared gains, Bob's AN power this slot, and the
/// true hypothesis.
struct SlotRealization {
    double g_ab;
    double g_aw;
    double g_bw;
    double g_bb;
    double p_b;
    bool alice_transmits;
};

/// Which interval of the threshold axis a detector threshold lies in, for one
/// realization. Case I: the H0/H1 received-power supports are disjoint;
/// Case II: they overlap.
enum class ThresholdRegime {
    always_alarm,   ///< below the H0 support: P_FA = 1
    never_alarm,    ///< above the H1 support: P_MD = 1
    error_free,     ///< between disjoint supports: P_FA = P_MD = 0
    case_i_fa,      ///< disjoint supports, inside H0: only false alarms
    case_i_md,      ///< disjoint supports, inside H1: only missed detections
    case_ii_fa,     ///< overlapping supports, left part: only false alarms
    case_ii_md,     ///< overlapping supports, right part: only missed detections
    case_ii_mixed,  ///< overlapping supports, overlap part: both error types
};

inline const char* to_string(ThresholdRegime r) {
    switch (r) {
        case ThresholdRegime::always_alarm: return "always_alarm";
        case ThresholdRegime::never_alarm: return "never_alarm";
        case ThresholdRegime::error_free: return "error_free";
        case ThresholdRegime::case_i_fa: return "case_i_fa";
        case ThresholdRegime::case_i_md: return "case_i_md";
        case ThresholdRegime::case_ii_fa: return "case_ii_fa";
        case ThresholdRegime::case_ii_md: return "case_ii_md";
        case ThresholdRegime::case_ii_mixed: return "case_ii_mixed";
    }
    return "?";
}

/// Willie's optimal operating point for one realization.
struct DetectionOutcome {
    double gamma_star;  ///< optimal detector threshold (linear power)
    double p_fa;
    double p_md;
    double p_e;  ///< pi0 * p_fa + pi1 * p_md
    ThresholdRegime regime;
};

inline void validate(const SystemParams& p) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(p.lambda_ab))
        throw validation_error(validation_error::kind::lambda_not_positive, "lambda_ab",
                               "lambda_ab must be strictly positive");
    if (!positive(p.lambda_aw))
        throw validation_error(validation_error::kind::lambda_not_positive, "lambda_aw",
                               "lambda_aw must be strictly positive");
    if (!positive(p.lambda_bw))
        throw validation_error(validation_error::kind::lambda_not_positive, "lambda_bw",
                               "lambda_bw must be strictly positive");
    if (!positive(p.lambda_bb))
        throw validation_error(validation_error::kind::lambda_not_positive, "lambda_bb",
                               "lambda_bb must be strictly positive");
    if (!positive(p.p_a))
        throw validation_error(validation_error::kind::power_not_positive, "p_a",
                               "p_a must be strictly positive");
    if (!positive(p.sigma_b2))
        throw validation_error(validation_error::kind::power_not_positive, "sigma_b2",
                               "sigma_b2 must be strictly positive");
    if (!positive(p.sigma_w2))
        throw validation_error(validation_error::kind::power_not_positive, "sigma_w2",
                               "sigma_w2 must be strictly positive");
    if (!(std::isfinite(p.phi) && p.phi > 0.0 && p.phi <= 1.0))
        throw validation_error(validation_error::kind::phi_out_of_range, "phi",
                               "phi must lie in (0, 1]");
    if (!positive(p.r_ab))
        throw validation_error(validation_error::kind::rate_not_positive, "r_ab",
                               "r_ab must be strictly positive");
}

inline void validate(const AnPowerPolicy& pol) {
    if (!(std::isfinite(pol.p_min) && pol.p_min >= 0.0))
        throw validation_error(validation_error::kind::negative_p_min, "p_min",
                               "p_min must be nonnegative");
    if (!(std::isfinite(pol.p_max) && pol.p_max >= pol.p_min))
        throw validation_error(validation_error::kind::inverted_support, "p_max",
                               "AN power support is inverted: p_min > p_max");
    if (!(std::isfinite(pol.p_avg) && pol.p_avg > 0.0))
        throw validation_error(validation_error::kind::power_not_positive, "p_avg",
                               "p_avg must be strictly positive");
    if (pol.p_min + pol.p_max > 2.0 * pol.p_avg)
        throw validation_error(validation_error::kind::power_cap_exceeded, "p_max",
                               "p_min + p_max exceeds 2 * p_avg");
}

inline void validate(const Priors& priors) {
    if (!(std::isfinite(priors.pi1()) && priors.pi1() >= 0.0 && priors.pi1() <= 1.0))
        throw validation_error(validation_error::kind::prior_out_of_range, "pi1",
                               "pi1 must lie in [0, 1]");
}

inline void validate(const SystemParams& p, const AnPowerPolicy& pol, const Priors& priors) {
    validate(p);
    validate(pol);
    validate(priors);
}

inline void validate(const SlotRealization& slot, const AnPowerPolicy& pol) {
    auto gain_ok = [](double g) { return std::isfinite(g) && g >= 0.0; };
    if (!gain_ok(slot.g_ab) || !gain_ok(slot.g_aw) || !gain_ok(slot.g_bw) || !gain_ok(slot.g_bb))
        throw validation_error(validation_error::kind::negative_gain, "g_ij",
                               "squared channel gains must be nonnegative");
    if (!(slot.p_b >= pol.p_min && slot.p_b <= pol.p_max))
        throw validation_error(validation_error::kind::an_power_outside_support, "p_b",
                               "realized AN power lies outside [p_min, p_max]");
}

namespace detail {

/// Clamps a computed probability to [0,1]. Excursions beyond floating-point
/// slack mean a formula bug, not roundoff, and are escalated.
inline double clamp_probability(double v, const char* where) {
    constexpr double slack = 1e-9;
    if (!(v > -slack && v < 1.0 + slack))
        throw consistency_error(std::string(where) + ": probability left [0,1] by more than 1e-9");
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

}  // namespace covert
