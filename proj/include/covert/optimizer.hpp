#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "covert/analytics.hpp"
#include "covert/model.hpp"
#include "covert/search.hpp"

namespace covert {

/// A covert-design instance: maximize Willie's expected detection error over
/// (pi1, p_min, p_max) subject to the effective-rate floor tau and the
/// average AN power cap p_avg.
struct CovertDesignProblem {
    SystemParams params{};
    double p_avg{db_to_linear(40.0)};
    double tau{0.1};  ///< required effective covert rate, 0 < tau < r_ab

    bool operator==(const CovertDesignProblem&) const = default;
};

enum class DesignRegime {
    cap_bound,        ///< power cap binds: p_max* = 2 p_avg, pi1* = 1/2
    interior_search,  ///< rate/covertness trade-off solved numerically
};

inline const char* to_string(DesignRegime r) {
    return r == DesignRegime::cap_bound ? "cap_bound" : "interior_search";
}

struct OptimalDesign {
    double p_min_star;      ///< always 0: lowering p_min helps rate and covertness
    double pi1_star;        ///< in [1/2, 1]
    double p_max_star;      ///< at most 2 p_avg
    double expected_pe_star;
    double achieved_rate;   ///< pi1* r_ab (1 - delta_ab(p_max*)) >= tau
    DesignRegime regime;
};

namespace detail {

inline AnPowerPolicy zero_min_policy(const CovertDesignProblem& pb, double p_max) {
    return AnPowerPolicy{0.0, p_max, pb.p_avg};
}

/// delta_ab at p_min = 0 as a function of the AN ceiling alone.
inline double outage_at(const CovertDesignProblem& pb, double p_max) {
    return outage_probability(pb.params, zero_min_policy(pb, p_max));
}

}  // namespace detail

/// Smallest Alice power that keeps the problem feasible at rate tau.
inline double required_alice_power(const CovertDesignProblem& pb) {
    return pb.params.lambda_ab * pb.params.sigma_b2 * (std::exp2(pb.params.r_ab) - 1.0) /
           std::log(pb.params.r_ab / pb.tau);
}

/// Checks 0 < tau < r_ab and the transmit-power feasibility bound; throws
/// invalid_tau_error / infeasible_error otherwise.
inline void feasibility_check(const CovertDesignProblem& pb) {
    validate(pb.params);
    if (!(std::isfinite(pb.p_avg) && pb.p_avg > 0.0))
        throw validation_error(validation_error::kind::power_not_positive, "p_avg",
                               "p_avg must be strictly positive");
    if (!(std::isfinite(pb.tau) && pb.tau > 0.0 && pb.tau < pb.params.r_ab))
        throw invalid_tau_error("tau must lie in (0, r_ab)");
    const double need = required_alice_power(pb);
    if (pb.params.p_a < need)
        throw infeasible_error(need, "p_a below the feasibility bound for this tau");
}

/// Least prior meeting the rate at this p_max, floored at 1/2:
/// max(1/2, tau / (r_ab (1 - delta_ab(p_max)))). Throws
/// rate_unreachable_error if not even pi1 = 1 meets the rate.
inline double optimal_pi1(const CovertDesignProblem& pb, double p_max) {
    const double delta = detail::outage_at(pb, p_max);
    const double required = pb.tau / (pb.params.r_ab * (1.0 - delta));
    if (!(required <= 1.0))
        throw rate_unreachable_error(p_max, required,
                                     "no prior in [1/2, 1] meets the rate at this p_max");
    return std::max(0.5, required);
}

namespace detail {

constexpr double dagger_bracket_cap = 1e12;
constexpr double root_rel_tol = 1e-10;

}  // namespace detail

/// AN ceiling where the outage reaches 1 - 2 tau / r_ab, i.e. where the
/// rate constraint at pi1 = 1/2 becomes tight. Returns 0 when the target sits
/// at or below the no-AN outage floor (the constraint binds everywhere), and
/// +infinity when the outage stays below the target out to the bracket cap
/// (the constraint binds nowhere that matters).
inline double p_max_dagger(const CovertDesignProblem& pb) {
    const double target = 1.0 - 2.0 * pb.tau / pb.params.r_ab;
    if (target <= detail::outage_at(pb, 0.0)) return 0.0;
    double hi = pb.p_avg;
    while (detail::outage_at(pb, hi) < target) {
        hi *= 2.0;
        if (hi > detail::dagger_bracket_cap) return std::numeric_limits<double>::infinity();
    }
    return bisect_nondecreasing([&](double p) { return detail::outage_at(pb, p); }, 0.0, hi,
                                target, detail::root_rel_tol);
}

/// The post-prior-elimination objective: (1 - tau/(r_ab (1 - delta))) kappa(s).
/// Negative exactly where the rate is unreachable with pi1 <= 1, so a maximum
/// never lands there.
inline double design_objective(const CovertDesignProblem& pb, double p_max) {
    const double delta = detail::outage_at(pb, p_max);
    const double margin = 1.0 - pb.tau / (pb.params.r_ab * (1.0 - delta));
    return margin * kappa(power_randomization_ratio(pb.params, detail::zero_min_policy(pb, p_max)));
}

namespace detail {

inline OptimalDesign finish_design(const CovertDesignProblem& pb, double p_max,
                                   DesignRegime regime) {
    const double pi1 = optimal_pi1(pb, p_max);
    const Priors priors(pi1);
    const AnPowerPolicy pol = zero_min_policy(pb, p_max);
    return {
        0.0,
        pi1,
        p_max,
        expected_min_error(pb.params, pol, priors),
        pi1 * pb.params.r_ab * (1.0 - outage_at(pb, p_max)),
        regime,
    };
}

}  // namespace detail

/// Optimal AN ceiling under the cap: 2 p_avg when the cap binds before the
/// rate does, otherwise the maximizer of the design objective over
/// [p_max_dagger, 2 p_avg]. The objective is continuous but not proven
/// unimodal, so a 256-point log-spaced scan seeds a golden-section refinement
/// and the endpoints stay in the candidate set.
inline OptimalDesign optimal_p_max(const CovertDesignProblem& pb) {
    feasibility_check(pb);
    const double cap = 2.0 * pb.p_avg;
    const double dagger = p_max_dagger(pb);
    if (cap <= dagger) return detail::finish_design(pb, cap, DesignRegime::cap_bound);

    const auto objective = [&](double p) { return design_objective(pb, p); };

    constexpr int scan_points = 256;
    std::vector<double> grid;
    grid.reserve(scan_points + 2);
    grid.push_back(dagger);
    const double scan_lo = std::max(dagger, cap * 1e-12);
    const double log_lo = std::log(scan_lo);
    const double log_hi = std::log(cap);
    for (int i = 0; i < scan_points; ++i) {
        const double x = std::exp(log_lo + (log_hi - log_lo) * i / (scan_points - 1));
        grid.push_back(std::clamp(x, dagger, cap));
    }
    grid.push_back(cap);
    std::sort(grid.begin(), grid.end());

    std::size_t best = 0;
    double best_value = objective(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double v = objective(grid[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }

    const double bracket_lo = grid[best == 0 ? 0 : best - 1];
    const double bracket_hi = grid[std::min(best + 1, grid.size() - 1)];
    const double abs_tol = detail::root_rel_tol * pb.p_avg;
    const auto refined = golden_section_maximize(objective, bracket_lo, bracket_hi, abs_tol);

    // Candidates in preference order; a later one must strictly win to
    // displace an earlier one, which keeps the exact boundary value whenever
    // the maximum sits on it.
    double p_star = dagger;
    double v_star = objective(dagger);
    for (const auto& [x, v] :
         {std::pair{refined.x, refined.value}, std::pair{grid[best], best_value},
          std::pair{cap, objective(cap)}}) {
        if (v > v_star) {
            v_star = v;
            p_star = x;
        }
    }
    return detail::finish_design(pb, p_star, DesignRegime::interior_search);
}

/// The staged global solution: p_min* = 0, then pi1* and p_max* jointly via
/// optimal_p_max.
inline OptimalDesign solve_p1(const CovertDesignProblem& pb) { return optimal_p_max(pb); }

/// Baseline that pins pi1 = 1/2 and only adjusts the AN ceiling: the largest
/// p_max meeting the rate at equal priors, capped at 2 p_avg. Throws
/// rate_unreachable_error when even p_max -> 0 cannot carry tau at pi1 = 1/2.
inline OptimalDesign solve_half_prior_benchmark(const CovertDesignProblem& pb) {
    feasibility_check(pb);
    const double target = 1.0 - 2.0 * pb.tau / pb.params.r_ab;
    const double floor = detail::outage_at(pb, 0.0);
    if (target < floor)
        throw rate_unreachable_error(
            0.0, pb.tau / (pb.params.r_ab * (1.0 - floor)),
            "pi1 = 1/2 cannot meet the rate at any AN power");
    const double cap = 2.0 * pb.p_avg;
    const double dagger = p_max_dagger(pb);
    const double p_max = std::min(cap, dagger);  // dagger may be +inf
    const AnPowerPolicy pol = detail::zero_min_policy(pb, p_max);
    const Priors priors(0.5);
    return {
        0.0,
        0.5,
        p_max,
        expected_min_error(pb.params, pol, priors),
        0.5 * pb.params.r_ab * (1.0 - detail::outage_at(pb, p_max)),
        cap <= dagger ? DesignRegime::cap_bound : DesignRegime::interior_search,
    };
}

}  // namespace covert
