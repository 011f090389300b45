#include <cmath>
#include <cstdint>

#include "covert/analytics.hpp"
#include "covert/simulator.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace covert;

TEST_SUITE_BEGIN("simulator");

TEST_CASE("sample_slot moments match the sampling distributions") {
    SystemParams p = testsupport::default_params();
    p.lambda_ab = 2.0;
    p.lambda_aw = 0.5;
    const AnPowerPolicy pol{10.0, 30.0, 1e4};
    const Priors priors(0.3);

    const int n = 200'000;
    double sum_ab = 0.0, sum_aw = 0.0, sum_pb = 0.0;
    int h1 = 0;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(42, static_cast<std::uint64_t>(i));
        const SlotRealization s = sample_slot(rng, p, pol, priors);
        CHECK_NOTHROW(validate(s, pol));
        sum_ab += s.g_ab;
        sum_aw += s.g_aw;
        sum_pb += s.p_b;
        h1 += s.alice_transmits ? 1 : 0;
    }
    // exponential: mean 1/lambda, sd 1/lambda
    CHECK(std::abs(sum_ab / n - 0.5) <= 3.0 * 0.5 / std::sqrt(n));
    CHECK(std::abs(sum_aw / n - 2.0) <= 3.0 * 2.0 / std::sqrt(n));
    // uniform: mean (lo+hi)/2, sd span/sqrt(12)
    CHECK(std::abs(sum_pb / n - 20.0) <= 3.0 * 20.0 / std::sqrt(12.0) / std::sqrt(n));
    // Bernoulli(0.3)
    CHECK(std::abs(static_cast<double>(h1) / n - 0.3) <=
          3.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST_CASE("received power at Willie under each hypothesis") {
    const SystemParams p = testsupport::default_params();  // sigma_w2 = 0.1
    SlotRealization slot{0.5, 2.0, 1.0, 0.7, 5.0, false};
    CHECK(willie_received_power(slot, p) == doctest::Approx(5.1).epsilon(1e-15));
    slot.alice_transmits = true;
    CHECK(willie_received_power(slot, p) ==
          doctest::Approx(5.1 + 2.0 * 10.0).epsilon(1e-15));
}

TEST_CASE("finite blocklength multiplier concentrates on the limit value") {
    const SystemParams p = testsupport::default_params();
    const SlotRealization slot{0.5, 2.0, 1.0, 0.7, 5.0, true};
    const double limit = willie_received_power(slot, p);

    const std::uint64_t n_sym = 10'000;
    const int m = 20'000;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        CounterRng rng(7, static_cast<std::uint64_t>(i));
        sum += willie_received_power(slot, p, n_sym, rng);
    }
    // sd of one sample is limit / sqrt(n_sym)
    const double se = limit / std::sqrt(static_cast<double>(n_sym)) / std::sqrt(m);
    CHECK(std::abs(sum / m - limit) <= 3.0 * se);
}

TEST_CASE("outage event uses a strict capacity shortfall") {
    SystemParams p = testsupport::default_params();
    p.p_a = 2.0;
    p.phi = 0.5;
    p.sigma_b2 = 0.5;
    SlotRealization slot{0.5, 1.0, 1.0, 1.0, 1.0, true};
    // SINR = (0.5*2) / (0.5*1*1 + 0.5) = 1 exactly; capacity == r_ab: no outage
    CHECK_FALSE(bob_outage_event(slot, p));
    slot.g_ab = 0.5 - 1e-12;
    CHECK(bob_outage_event(slot, p));
    slot.g_ab = 0.0;
    CHECK(bob_outage_event(slot, p));
    slot.g_ab = 1e300;
    CHECK_FALSE(bob_outage_event(slot, p));
}

TEST_CASE("reports are bit-identical across reruns, chunkings and threads") {
    const SystemParams p = testsupport::default_params();
    const AnPowerPolicy pol{0.0, 2e4, testsupport::default_p_avg};
    const Priors priors(0.5);

    const SimConfig base{60'000, 99, {}, 4096};
    const SimReport a = run(p, pol, priors, base);
    const SimReport b = run(p, pol, priors, base);

    SimConfig tiny_chunks = base;
    tiny_chunks.chunk_size = 1;
    const SimReport c = run(p, pol, priors, tiny_chunks);

    SimConfig one_chunk = base;
    one_chunk.chunk_size = 1'000'000;
    const SimReport d = run(p, pol, priors, one_chunk);

    const SimReport e = run(p, pol, priors, base, 4);

    const auto same = [](const SimReport& x, const SimReport& y) {
        CHECK(x.empirical_pfa == y.empirical_pfa);
        CHECK(x.empirical_pmd == y.empirical_pmd);
        CHECK(x.empirical_pe == y.empirical_pe);
        CHECK(x.empirical_outage == y.empirical_outage);
        CHECK(x.se_pe == y.se_pe);
        CHECK(x.slot_count_h0 == y.slot_count_h0);
        CHECK(x.slot_count_h1 == y.slot_count_h1);
    };
    same(a, b);
    same(a, c);
    same(a, d);
    same(a, e);
    CHECK(a.slot_count_h0 + a.slot_count_h1 == base.n_slots);
}

TEST_CASE("without power randomization Willie never errs") {
    const SystemParams p = testsupport::default_params();
    const AnPowerPolicy pol{100.0, 100.0, 1e4};
    const SimReport r = run(p, pol, Priors(0.5), SimConfig{50'000, 5, {}, 8192});
    CHECK(r.empirical_pe == 0.0);
    CHECK(r.empirical_pfa == 0.0);
    CHECK(r.empirical_pmd == 0.0);
}

TEST_CASE("empirical error rate matches the true fading average") {
    // E over gains of the per-realization optimum: with t = 1/2 this is
    // 0.5 * (1 + t ln(t)/(1-t)) = 0.15342640972002736. (The kappa-form
    // closed form reports 0.201713 here; see the analytics suite, which
    // pins the gap between the two.)
    SystemParams p = testsupport::default_params();
    p.p_a = 1.0;
    const AnPowerPolicy pol{0.0, 1.0, 1e4};
    const Priors priors(0.5);
    const SimReport r = run(p, pol, priors, SimConfig{400'000, 2024, {}, 65'536});
    CHECK(std::abs(r.empirical_pe - 0.15342640972002736) <= 3.0 * r.se_pe);
}

TEST_CASE("error-free slots never contribute errors") {
    const SystemParams p = testsupport::default_params();
    const AnPowerPolicy pol{0.0, 20.0, 1e4};  // condition fails when g_aw/g_bw > 2
    const Priors priors(0.5);
    int error_free_slots = 0;
    for (std::uint64_t i = 0; i < 5000; ++i) {
        CounterRng rng(13, i);
        const SlotRealization slot = sample_slot(rng, p, pol, priors);
        const auto opt = optimal_threshold({slot.g_aw, slot.g_bw}, p, pol, priors);
        const double pw = willie_received_power(slot, p);
        const bool alarm = pw > opt.gamma_star;
        const bool error = slot.alice_transmits ? !alarm : alarm;
        if (opt.regime == ThresholdRegime::error_free) {
            ++error_free_slots;
            CHECK_FALSE(error);
        }
    }
    CHECK(error_free_slots > 500);
}

TEST_CASE("standard errors shrink like one over sqrt(slots)") {
    const SystemParams p = testsupport::default_params();
    const AnPowerPolicy pol{0.0, 2e4, testsupport::default_p_avg};
    const Priors priors(0.5);
    const SimReport small = run(p, pol, priors, SimConfig{10'000, 31, {}, 65'536});
    const SimReport large = run(p, pol, priors, SimConfig{1'000'000, 31, {}, 65'536});
    const double ratio = large.se_pe / small.se_pe;
    CHECK(ratio > 0.05);
    CHECK(ratio < 0.2);  // nominal 0.1
}

TEST_CASE("finite-n runs converge to the infinite-n run") {
    const SystemParams p = testsupport::default_params();
    const AnPowerPolicy pol{0.0, 200.0, 1e4};
    const Priors priors(0.5);

    SimConfig cfg{30'000, 321, {}, 65'536};
    const double exact = run(p, pol, priors, cfg).empirical_pe;

    double prev_gap = 1.0;
    for (const std::uint64_t n : {std::uint64_t{100}, std::uint64_t{1000}, std::uint64_t{10'000}}) {
        cfg.finite_n = n;
        const double gap = std::abs(run(p, pol, priors, cfg).empirical_pe - exact);
        CHECK(gap <= prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("config invariants are enforced") {
    const SystemParams p = testsupport::default_params();
    const AnPowerPolicy pol{0.0, 100.0, 1e4};
    CHECK_THROWS_AS(run(p, pol, Priors(0.5), SimConfig{0, 1, {}, 64}), validation_error);
    CHECK_THROWS_AS(run(p, pol, Priors(0.5), SimConfig{10, 1, {}, 0}), validation_error);
    CHECK_THROWS_AS(run(p, pol, Priors(0.5), SimConfig{10, 1, std::uint64_t{0}, 64}),
                    validation_error);
}

TEST_SUITE_END();
