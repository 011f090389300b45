#include <cmath>

#include "covert/model.hpp"
#include "covert/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace covert;

TEST_SUITE_BEGIN("model");

TEST_CASE("db conversion anchors") {
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(db_to_linear(40.0) == doctest::Approx(1e4).epsilon(1e-15));
}

TEST_CASE("db round trip within 1e-12 relative over [1e-6, 1e9]") {
    CounterRng rng(20240, 0);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::exp(rng.next_uniform(std::log(1e-6), std::log(1e9)));
        const double back = db_to_linear(linear_to_db(x));
        CHECK(std::abs(back - x) <= 1e-12 * x);
    }
}

TEST_CASE("mu is derived from r_ab and p_a") {
    SystemParams p;  // r_ab = 1, p_a = 10
    CHECK(p.mu() == doctest::Approx(0.1).epsilon(1e-15));
    p.r_ab = 2.0;
    CHECK(p.mu() == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("priors store pi1 and derive pi0") {
    const Priors pr(0.3);
    CHECK(pr.pi1() == 0.3);
    CHECK(pr.pi0() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(pr.pi0() + pr.pi1() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pr.min_prior() == doctest::Approx(0.3));
    CHECK_FALSE(pr.transmission_favoured());
    CHECK(Priors(0.5).transmission_favoured());  // tie lands on the pi1 branch
}

TEST_CASE("default parameter set validates") {
    const SystemParams params;
    const AnPowerPolicy policy{0.0, 2e4, testsupport::default_p_avg};
    CHECK_NOTHROW(validate(params, policy, Priors(0.5)));
}

TEST_CASE("inverted support is rejected") {
    const AnPowerPolicy policy{5.0, 3.0, testsupport::default_p_avg};
    CHECK_THROWS_WITH_AS(validate(policy), doctest::Contains("inverted"), validation_error);
    try {
        validate(policy);
    } catch (const validation_error& e) {
        CHECK(e.which() == validation_error::kind::inverted_support);
    }
}

TEST_CASE("average power cap is enforced") {
    const AnPowerPolicy policy{1e4, 1.5e4, 1e4};  // sum 2.5e4 > 2e4
    try {
        validate(policy);
        FAIL("expected power_cap_exceeded");
    } catch (const validation_error& e) {
        CHECK(e.which() == validation_error::kind::power_cap_exceeded);
    }
}

TEST_CASE("each invariant has its own error variant") {
    SystemParams p;

    p.lambda_aw = -1.0;
    try {
        validate(p);
        FAIL("expected lambda_not_positive");
    } catch (const validation_error& e) {
        CHECK(e.which() == validation_error::kind::lambda_not_positive);
        CHECK(e.field() == "lambda_aw");
    }

    p = SystemParams{};
    p.phi = 0.0;
    try {
        validate(p);
        FAIL("expected phi_out_of_range");
    } catch (const validation_error& e) {
        CHECK(e.which() == validation_error::kind::phi_out_of_range);
    }
    p.phi = 1.0;
    CHECK_NOTHROW(validate(p));
    p.phi = 1.0 + 1e-12;
    CHECK_THROWS_AS(validate(p), validation_error);

    p = SystemParams{};
    p.r_ab = 0.0;
    CHECK_THROWS_AS(validate(p), validation_error);

    p = SystemParams{};
    p.p_a = 0.0;
    CHECK_THROWS_AS(validate(p), validation_error);

    CHECK_THROWS_AS(validate(Priors(1.5)), validation_error);
    CHECK_THROWS_AS(validate(Priors(-0.1)), validation_error);
    CHECK_NOTHROW(validate(Priors(0.0)));
    CHECK_NOTHROW(validate(Priors(1.0)));

    AnPowerPolicy pol{-1.0, 3.0, 10.0};
    CHECK_THROWS_AS(validate(pol), validation_error);
}

TEST_CASE("validate accepts exactly the invariant region") {
    // Randomized parameter vectors, some fields deliberately pushed out of
    // range; acceptance must equal the conjunction of the type invariants.
    CounterRng rng(77, 0);
    int invalid_seen = 0;
    for (int i = 0; i < 4000; ++i) {
        const auto field = [&](double lo, double hi, double bad_prob) {
            if (rng.next_unit() < bad_prob) return rng.next_uniform(-1.0, 0.0);
            return rng.next_uniform(lo, hi);
        };
        SystemParams p;
        p.lambda_ab = field(0.1, 5.0, 0.05);
        p.lambda_aw = field(0.1, 5.0, 0.05);
        p.lambda_bw = field(0.1, 5.0, 0.05);
        p.lambda_bb = field(0.1, 5.0, 0.05);
        p.p_a = field(0.1, 100.0, 0.05);
        p.sigma_b2 = field(0.01, 1.0, 0.05);
        p.sigma_w2 = field(0.01, 1.0, 0.05);
        p.phi = rng.next_unit() < 0.1 ? rng.next_uniform(1.0, 2.0) : rng.next_uniform(0.001, 1.0);
        p.r_ab = field(0.1, 4.0, 0.05);
        AnPowerPolicy pol;
        pol.p_min = rng.next_uniform(-1.0, 50.0);
        pol.p_max = rng.next_uniform(-1.0, 200.0);
        pol.p_avg = rng.next_uniform(-1.0, 150.0);
        const double pi1 = rng.next_uniform(-0.2, 1.2);

        const bool params_ok = p.lambda_ab > 0 && p.lambda_aw > 0 && p.lambda_bw > 0 &&
                               p.lambda_bb > 0 && p.p_a > 0 && p.sigma_b2 > 0 && p.sigma_w2 > 0 &&
                               p.phi > 0 && p.phi <= 1.0 && p.r_ab > 0;
        const bool policy_ok = pol.p_min >= 0 && pol.p_max >= pol.p_min && pol.p_avg > 0 &&
                               pol.p_min + pol.p_max <= 2 * pol.p_avg;
        const bool priors_ok = pi1 >= 0.0 && pi1 <= 1.0;
        const bool expect_ok = params_ok && policy_ok && priors_ok;
        if (!expect_ok) ++invalid_seen;

        bool threw = false;
        try {
            validate(p, pol, Priors(pi1));
        } catch (const validation_error&) {
            threw = true;
        }
        CHECK(threw == !expect_ok);
    }
    CHECK(invalid_seen > 500);  // the generator actually exercises both sides
}

TEST_CASE("slot realization invariants") {
    const AnPowerPolicy pol{1.0, 5.0, 10.0};
    SlotRealization slot{1.0, 1.0, 1.0, 1.0, 3.0, true};
    CHECK_NOTHROW(validate(slot, pol));
    slot.p_b = 6.0;
    CHECK_THROWS_AS(validate(slot, pol), validation_error);
    slot.p_b = 3.0;
    slot.g_aw = -0.5;
    CHECK_THROWS_AS(validate(slot, pol), validation_error);
}

TEST_SUITE_END();
