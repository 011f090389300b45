#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace covert {

/// Base class for every error thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A domain-object invariant was violated. `which()` identifies the invariant,
/// `field()` names the offending input.
class validation_error : public error {
public:
    enum class kind {
        lambda_not_positive,
        power_not_positive,
        phi_out_of_range,
        rate_not_positive,
        negative_p_min,
        inverted_support,
        power_cap_exceeded,
        prior_out_of_range,
        negative_gain,
        an_power_outside_support,
        degenerate_channel,
        argument_out_of_domain,
        bad_config,
    };

    validation_error(kind k, std::string field, const std::string& message)
        : error(message), kind_(k), field_(std::move(field)) {}

    kind which() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    kind kind_;
    std::string field_;
};

/// The global feasibility bound on Alice's transmit power fails; carries the
/// minimum power that would make the problem feasible.
class infeasible_error : public error {
public:
    infeasible_error(double required_p_a, const std::string& message)
        : error(message), required_p_a_(required_p_a) {}

    double required_p_a() const noexcept { return required_p_a_; }

private:
    double required_p_a_;
};

/// The covert-rate requirement is not in (0, r_ab).
class invalid_tau_error : public error {
public:
    using error::error;
};

/// No prior in [1/2, 1] can meet the rate requirement at the candidate P_max.
class rate_unreachable_error : public error {
public:
    rate_unreachable_error(double p_max, double required_pi1, const std::string& message)
        : error(message), p_max_(p_max), required_pi1_(required_pi1) {}

    double p_max() const noexcept { return p_max_; }
    double required_pi1() const noexcept { return required_pi1_; }

private:
    double p_max_;
    double required_pi1_;
};

/// Internal cross-check failed (e.g. a probability left [0,1] by more than
/// floating-point slack). Indicates a bug, not bad input.
class consistency_error : public error {
public:
    using error::error;
};

}  // namespace covert
