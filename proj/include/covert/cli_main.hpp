#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "covert/experiment.hpp"

namespace covert::cli {

namespace detail {

inline void print_error_record(const char* kind, const std::string& message) {
    nlohmann::ordered_json rec;
    rec["error"]["kind"] = kind;
    rec["error"]["message"] = message;
    std::cerr << rec.dump() << '\n';
}

inline std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad_config("config", "cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

}  // namespace detail

/// The covertfd entry point, callable from tests. Exit codes: 0 success,
/// 2 invalid input, 3 infeasible problem, 4 internal failure.
inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Covert-link analysis toolkit: closed-form detection/outage analysis, "
                 "AN power-range and prior optimization, and a Monte-Carlo validator."};
    app.require_subcommand(1);

    std::string config_path;
    unsigned threads = 1;
    std::vector<std::pair<std::string, std::string>> overrides;
    const auto key_option = [&](CLI::App* cmd, const char* flag, const char* key,
                                const char* help) {
        cmd->add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
            help);
    };

    const char* const mode_help[] = {
        "Closed-form outage/covertness summary per sweep point",
        "Solve the joint (pi1, P_min, P_max) design per sweep point",
        "Monte-Carlo validation run with closed-form columns side by side",
        "Emit deterministic figure datasets (figures 3..9)",
    };
    std::vector<CLI::App*> commands;
    int mode_index = 0;
    for (const char* name : {"analyze", "optimize", "simulate", "reproduce"}) {
        CLI::App* cmd = app.add_subcommand(name, mode_help[mode_index++]);
        cmd->add_option("--config", config_path, "Config file (key = value lines)");
        cmd->add_option("--threads", threads, "Worker threads (does not affect results)");
        key_option(cmd, "--out", "output.path", "Output file path");
        key_option(cmd, "--format", "output.format", "csv or json");
        key_option(cmd, "--seed", "sim.seed", "Monte-Carlo master seed");
        key_option(cmd, "--slots", "sim.slots", "Monte-Carlo slots per point");
        key_option(cmd, "--chunk-size", "sim.chunk_size", "Slots per deterministic chunk");
        key_option(cmd, "--finite-n", "sim.finite_n", "Finite blocklength (0 = infinite)");
        key_option(cmd, "--figure", "figure", "Figure id for reproduce (3..9)");
        key_option(cmd, "--p-a-db", "base.p_a_db", "Alice transmit power [dB]");
        key_option(cmd, "--p-a", "base.p_a", "Alice transmit power [linear]");
        key_option(cmd, "--sigma-b2-db", "base.sigma_b2_db", "Bob noise power [dB]");
        key_option(cmd, "--sigma-w2-db", "base.sigma_w2_db", "Willie noise power [dB]");
        key_option(cmd, "--phi", "base.phi", "Self-interference coefficient (0,1]");
        key_option(cmd, "--r-ab", "base.r_ab", "Alice->Bob rate [bits/use]");
        key_option(cmd, "--p-avg-db", "base.p_avg_db", "AN average power cap [dB]");
        key_option(cmd, "--p-avg", "base.p_avg", "AN average power cap [linear]");
        key_option(cmd, "--lambda-ab", "base.lambda_ab", "Alice->Bob fading rate");
        key_option(cmd, "--lambda-aw", "base.lambda_aw", "Alice->Willie fading rate");
        key_option(cmd, "--lambda-bw", "base.lambda_bw", "Bob->Willie fading rate");
        key_option(cmd, "--lambda-bb", "base.lambda_bb", "Bob self-interference fading rate");
        key_option(cmd, "--p-min", "policy.p_min", "AN power floor [linear]");
        key_option(cmd, "--p-max", "policy.p_max", "AN power ceiling [linear]");
        key_option(cmd, "--p-max-db", "policy.p_max_db", "AN power ceiling [dB]");
        key_option(cmd, "--pi1", "priors.pi1", "Prior transmission probability");
        key_option(cmd, "--tau", "problem.tau", "Required effective covert rate");
        key_option(cmd, "--sweep", "sweep.variable", "Sweep variable (tau|p_a|phi|p_max|pi1)");
        key_option(cmd, "--sweep-start", "sweep.start", "Sweep start (linear units)");
        key_option(cmd, "--sweep-stop", "sweep.stop", "Sweep stop (linear units)");
        key_option(cmd, "--sweep-points", "sweep.points", "Sweep point count (>= 2)");
        key_option(cmd, "--sweep-scale", "sweep.scale", "linear or log");
        commands.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        detail::print_error_record("invalid_input", e.what());
        return 2;
    }

    try {
        ExperimentSpec spec;
        if (!config_path.empty()) apply_config_text(spec, detail::slurp_file(config_path));
        for (std::size_t i = 0; i < commands.size(); ++i)
            if (commands[i]->parsed())
                spec.mode = static_cast<Mode>(i);
        for (const auto& [key, value] : overrides) apply_key(spec, key, value);
        finalize(spec);
        return run_experiment(spec, threads);
    } catch (const validation_error& e) {
        detail::print_error_record("invalid_input", std::string(e.field()) + ": " + e.what());
        return 2;
    } catch (const invalid_tau_error& e) {
        detail::print_error_record("invalid_input", e.what());
        return 2;
    } catch (const infeasible_error& e) {
        detail::print_error_record("infeasible", e.what());
        return 3;
    } catch (const rate_unreachable_error& e) {
        detail::print_error_record("rate_unreachable", e.what());
        return 3;
    } catch (const consistency_error& e) {
        detail::print_error_record("internal", e.what());
        return 4;
    } catch (const std::exception& e) {
        detail::print_error_record("internal", e.what());
        return 4;
    }
}

}  // namespace covert::cli
