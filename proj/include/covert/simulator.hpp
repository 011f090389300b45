#pragma once

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "covert/detector.hpp"
#include "covert/model.hpp"
#include "covert/rng.hpp"

namespace covert {

/// Monte-Carlo run settings. Slot i always consumes RNG stream (seed, i), so
/// reports are bit-identical for any chunking or thread count.
struct SimConfig {
    std::uint64_t n_slots{100'000};
    std::uint64_t seed{1};
    /// If set, per-slot received power carries the finite-blocklength
    /// chi-squared jitter instead of the infinite-n deterministic limit.
    std::optional<std::uint64_t> finite_n{};
    std::uint64_t chunk_size{65'536};

    bool operator==(const SimConfig&) const = default;
};

inline void validate(const SimConfig& cfg) {
    if (cfg.n_slots < 1)
        throw validation_error(validation_error::kind::bad_config, "n_slots",
                               "n_slots must be at least 1");
    if (cfg.chunk_size < 1)
        throw validation_error(validation_error::kind::bad_config, "chunk_size",
                               "chunk_size must be at least 1");
    if (cfg.finite_n && *cfg.finite_n < 1)
        throw validation_error(validation_error::kind::bad_config, "finite_n",
                               "finite_n must be at least 1 when set");
}

/// Empirical estimates with standard errors. Proportions are exact integer
/// ratios, so equal tallies render to equal bytes.
struct SimReport {
    double empirical_pfa;
    double se_pfa;
    double empirical_pmd;
    double se_pmd;
    double empirical_pe;  ///< (false alarms + missed detections) / n_slots
    double se_pe;
    double empirical_outage;  ///< H1-conditioned decoding outage at Bob
    double se_outage;
    std::uint64_t slot_count_h0;
    std::uint64_t slot_count_h1;
};

/// Draws one slot: four exponential gains (inverse-CDF), uniform AN power,
/// Bernoulli(pi1) hypothesis. Draw order is part of the determinism contract.
inline SlotRealization sample_slot(CounterRng& rng, const SystemParams& p,
                                   const AnPowerPolicy& pol, const Priors& priors) {
    SlotRealization slot;
    slot.g_ab = rng.next_exponential(p.lambda_ab);
    slot.g_aw = rng.next_exponential(p.lambda_aw);
    slot.g_bw = rng.next_exponential(p.lambda_bw);
    slot.g_bb = rng.next_exponential(p.lambda_bb);
    slot.p_b = rng.next_uniform(pol.p_min, pol.p_max);
    slot.alice_transmits = rng.next_bernoulli(priors.pi1());
    return slot;
}

namespace detail {

/// chi^2_{2n} / (2n): the mean-one multiplier a length-n complex-sample
/// average applies to its true power. Sampled exactly; each pair of squared
/// standard normals collapses to one exponential draw. n is capped at 1e6 per
/// slot to bound the cost.
inline double chi2_mean_one_multiplier(CounterRng& rng, std::uint64_t n) {
    n = std::min<std::uint64_t>(n, 1'000'000);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) acc -= std::log(rng.next_unit());
    return acc / static_cast<double>(n);
}

}  // namespace detail

/// Average power at Willie's radiometer in the infinite-n limit.
inline double willie_received_power(const SlotRealization& slot, const SystemParams& p) {
    double power = slot.g_bw * slot.p_b + p.sigma_w2;
    if (slot.alice_transmits) power += slot.g_aw * p.p_a;
    return power;
}

/// Finite-blocklength variant: the limit value times a chi^2_{2n}/(2n) draw.
inline double willie_received_power(const SlotRealization& slot, const SystemParams& p,
                                    std::uint64_t finite_n, CounterRng& rng) {
    return willie_received_power(slot, p) * detail::chi2_mean_one_multiplier(rng, finite_n);
}

/// Decoding outage at Bob: capacity under self-interference falls below r_ab.
/// Equality is not an outage.
inline bool bob_outage_event(const SlotRealization& slot, const SystemParams& p) {
    const double sinr = slot.g_ab * p.p_a / (p.phi * slot.g_bb * slot.p_b + p.sigma_b2);
    return sinr < std::exp2(p.r_ab) - 1.0;
}

namespace detail {

struct Tally {
    std::uint64_t h0 = 0;
    std::uint64_t h1 = 0;
    std::uint64_t false_alarms = 0;
    std::uint64_t missed = 0;
    std::uint64_t outages = 0;

    void merge(const Tally& o) {
        h0 += o.h0;
        h1 += o.h1;
        false_alarms += o.false_alarms;
        missed += o.missed;
        outages += o.outages;
    }
};

inline Tally run_slots(const SystemParams& p, const AnPowerPolicy& pol, const Priors& priors,
                       const SimConfig& cfg, std::uint64_t first, std::uint64_t last) {
    Tally tally;
    for (std::uint64_t i = first; i < last; ++i) {
        CounterRng rng(cfg.seed, i);
        const SlotRealization slot = sample_slot(rng, p, pol, priors);
        const OptimalThreshold opt =
            optimal_threshold({slot.g_aw, slot.g_bw}, p, pol, priors);
        const double pw = cfg.finite_n
                              ? willie_received_power(slot, p, *cfg.finite_n, rng)
                              : willie_received_power(slot, p);
        const bool alarm = pw > opt.gamma_star;
        if (slot.alice_transmits) {
            ++tally.h1;
            if (!alarm) ++tally.missed;
            if (bob_outage_event(slot, p)) ++tally.outages;
        } else {
            ++tally.h0;
            if (alarm) ++tally.false_alarms;
        }
    }
    return tally;
}

inline double proportion(std::uint64_t hits, std::uint64_t n) {
    return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
}

inline double standard_error(double p_hat, std::uint64_t n) {
    return n == 0 ? 0.0 : std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

}  // namespace detail

/// Replays Willie's optimal radiometer and Bob's decoder over cfg.n_slots
/// independent slots. Willie recomputes his threshold from the realized
/// (g_aw, g_bw) each slot, since he knows his instantaneous channels.
/// Identical (seed, parameters) give bit-identical reports for any thread
/// count or chunk size.
inline SimReport run(const SystemParams& p, const AnPowerPolicy& pol, const Priors& priors,
                     const SimConfig& cfg, unsigned threads = 1) {
    validate(p, pol, priors);
    validate(cfg);

    detail::Tally total;
    const std::uint64_t n_chunks = (cfg.n_slots + cfg.chunk_size - 1) / cfg.chunk_size;
    if (threads <= 1 || n_chunks <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            const std::uint64_t first = c * cfg.chunk_size;
            const std::uint64_t last = std::min(first + cfg.chunk_size, cfg.n_slots);
            total.merge(detail::run_slots(p, pol, priors, cfg, first, last));
        }
    } else {
        std::mutex merge_mutex;
        std::vector<std::thread> pool;
        std::uint64_t next_chunk = 0;
        std::mutex chunk_mutex;
        const unsigned n_threads =
            static_cast<unsigned>(std::min<std::uint64_t>(threads, n_chunks));
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                detail::Tally local;
                for (;;) {
                    std::uint64_t c;
                    {
                        std::lock_guard lock(chunk_mutex);
                        if (next_chunk >= n_chunks) break;
                        c = next_chunk++;
                    }
                    const std::uint64_t first = c * cfg.chunk_size;
                    const std::uint64_t last = std::min(first + cfg.chunk_size, cfg.n_slots);
                    local.merge(detail::run_slots(p, pol, priors, cfg, first, last));
                }
                std::lock_guard lock(merge_mutex);
                total.merge(local);
            });
        }
        for (auto& th : pool) th.join();
    }

    SimReport report;
    report.empirical_pfa = detail::proportion(total.false_alarms, total.h0);
    report.se_pfa = detail::standard_error(report.empirical_pfa, total.h0);
    report.empirical_pmd = detail::proportion(total.missed, total.h1);
    report.se_pmd = detail::standard_error(report.empirical_pmd, total.h1);
    report.empirical_pe =
        detail::proportion(total.false_alarms + total.missed, cfg.n_slots);
    report.se_pe = detail::standard_error(report.empirical_pe, cfg.n_slots);
    report.empirical_outage = detail::proportion(total.outages, total.h1);
    report.se_outage = detail::standard_error(report.empirical_outage, total.h1);
    report.slot_count_h0 = total.h0;
    report.slot_count_h1 = total.h1;
    return report;
}

}  // namespace covert
