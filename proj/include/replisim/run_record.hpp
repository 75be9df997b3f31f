#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "replisim/classical_assembly.hpp"
#include "replisim/core_model.hpp"
#include "replisim/csv_io.hpp"
#include "replisim/discrimination.hpp"
#include "replisim/grover_engine.hpp"
#include "replisim/isotope_tracker.hpp"
#include "replisim/rng.hpp"

namespace replisim {

// Insertion-ordered JSON keeps records diff-friendly and their serialization
// deterministic.
using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

// Run-record schema: tool_version, command, config_echo, rng_algorithm,
// master_seed, started, finished, results. Re-executing config_echo must
// reproduce the results payload byte for byte; only the timestamps may
// differ between a run and its replay.

inline std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

inline RateLaw parse_rate_law(const std::string& name) {
    if (name == "classical") return RateLaw::Classical;
    if (name == "quantum") return RateLaw::Quantum;
    throw std::invalid_argument("unknown rate law '" + name + "' (expected classical|quantum)");
}

inline QuantumMode parse_quantum_mode(const std::string& name) {
    if (name == "idealized") return QuantumMode::Idealized;
    if (name == "physical") return QuantumMode::Physical;
    throw std::invalid_argument("unknown quantum mode '" + name +
                                "' (expected idealized|physical)");
}

namespace detail {

inline std::uint64_t seed_of(const json& config) {
    return config.value("master_seed", std::uint64_t{0});
}

inline json execute_coefficients(const json& config) {
    const int a_min = config.at("a_min").get<int>();
    const int a_max = config.at("a_max").get<int>();
    if (a_min < 2 || a_min > a_max)
        throw std::invalid_argument("coefficients: need 2 <= a_min <= a_max");
    json rows = json::array();
    for (int a = a_min; a <= a_max; ++a) {
        const int iterations = iterations_required(a);
        json row;
        row["a"] = a;
        row["classical_coefficient"] = classical_coefficient(static_cast<double>(a));
        row["grover_iterations"] = iterations;
        row["quantum_coefficient"] =
            static_cast<double>(iterations) / std::log(static_cast<double>(a));
        rows.push_back(std::move(row));
    }
    json payload;
    payload["rows"] = std::move(rows);
    return payload;
}

inline json execute_simulate(const json& config) {
    const std::string kind = config.at("kind").get<std::string>();
    const int a = config.at("a").get<int>();
    const int n = config.at("n").get<int>();
    const std::uint64_t seed = seed_of(config);
    const AlphabetSpec alphabet = make_alphabet(a);
    const ChainTask task = make_chain_task(alphabet, n);

    json payload;
    payload["kind"] = kind;
    payload["a"] = a;
    payload["n"] = n;

    if (kind == "classical") {
        const double t_d = config.at("t_d").get<double>();
        const int replicates = config.at("replicates").get<int>();
        const TimingParams timing = make_timing(t_d, 1.0);
        const SimResult result = simulate_classical(alphabet, task, timing, seed, replicates);
        payload["t_d"] = t_d;
        payload["seed"] = result.seed;
        payload["replicates"] = result.replicates;
        payload["total_time"] = result.total_time;
        payload["attempts_per_base"] = result.attempts_per_base;
        payload["expected_total_time"] = expected_classical_time(alphabet, task, timing);
        return payload;
    }
    if (kind == "quantum-ideal") {
        const double t_r = config.at("t_r").get<double>();
        const double total_time = quantum_assembly_time(a, n, t_r);
        payload["t_r"] = t_r;
        payload["grover_iterations"] = iterations_required(a);
        payload["total_time"] = total_time;
        payload["rate"] = static_cast<double>(n) / total_time;
        return payload;
    }
    if (kind == "quantum-imperfect") {
        const double t_d = config.value("t_d", 1.0);
        const double t_r = config.at("t_r").get<double>();
        const int replicates = config.at("replicates").get<int>();
        ImperfectQuantumConfig quantum_config;
        quantum_config.p_coherence = config.at("p_coherence").get<double>();
        quantum_config.t_r_over_t_d = t_r / t_d;
        quantum_config.mode = parse_quantum_mode(config.value("quantum_mode", "idealized"));
        const TimingParams timing = make_timing(t_d, t_r);
        const SimResult result =
            simulate_imperfect_quantum(alphabet, task, timing, quantum_config, seed, replicates);
        payload["t_r"] = t_r;
        payload["p_coherence"] = quantum_config.p_coherence;
        payload["quantum_mode"] = to_string(quantum_config.mode);
        payload["p_eff"] = effective_success_probability(a, quantum_config);
        payload["seed"] = result.seed;
        payload["replicates"] = result.replicates;
        payload["total_time"] = result.total_time;
        payload["attempts_per_base"] = result.attempts_per_base;
        return payload;
    }
    throw std::invalid_argument("unknown simulate kind '" + kind +
                                "' (expected classical|quantum-ideal|quantum-imperfect)");
}

inline std::vector<RateSample> samples_from_json(const json& array) {
    std::vector<RateSample> samples;
    samples.reserve(array.size());
    for (const auto& item : array) {
        RateSample s;
        s.a = item.at("a").get<int>();
        s.observed_rate = item.at("observed_rate").get<double>();
        s.sigma_rel = item.at("sigma_rel").get<double>();
        samples.push_back(s);
    }
    return samples;
}

inline json execute_discriminate(const json& config) {
    const auto samples = samples_from_json(config.at("samples"));
    const int bootstrap_B = config.at("bootstrap_B").get<int>();
    const Verdict verdict = discriminate(samples, bootstrap_B, seed_of(config));
    json payload;
    payload["chosen_model"] = to_string(verdict.chosen_model);
    payload["statistic"] = verdict.statistic;
    payload["p_value"] = verdict.p_value;
    payload["fitted_scale_classical"] = verdict.fitted_scale_classical;
    payload["fitted_scale_quantum"] = verdict.fitted_scale_quantum;
    payload["bootstrap_B"] = verdict.bootstrap_B;
    payload["seed"] = verdict.seed;
    payload["n_samples"] = samples.size();
    return payload;
}

inline json execute_power(const json& config) {
    const RateLaw model = parse_rate_law(config.at("model").get<std::string>());
    const auto sigma_levels = config.at("sigma_levels").get<std::vector<double>>();
    const int repeats_per_a = config.at("repeats_per_a").get<int>();
    const int trials = config.at("trials").get<int>();
    const int bootstrap_B = config.at("bootstrap_B").get<int>();
    const auto points =
        power_curve(model, sigma_levels, repeats_per_a, trials, bootstrap_B, seed_of(config));
    json rows = json::array();
    for (const auto& p : points) {
        json row;
        row["sigma_rel"] = p.sigma_rel;
        row["fraction_correct"] = p.fraction_correct;
        rows.push_back(std::move(row));
    }
    json payload;
    payload["model"] = to_string(model);
    payload["repeats_per_a"] = repeats_per_a;
    payload["trials"] = trials;
    payload["bootstrap_B"] = bootstrap_B;
    payload["points"] = std::move(rows);
    return payload;
}

inline json execute_isotope(const json& config) {
    const int a = config.at("a").get<int>();
    const int n = config.at("n").get<int>();
    const AlphabetSpec alphabet = make_alphabet(a);
    const ChainTask task = make_chain_task(alphabet, n);
    ExchangeConfig exchange;
    exchange.exchange_prob = config.at("exchange_prob").get<double>();
    exchange.enzyme_weight = config.value("enzyme_weight", 0.0);
    const double tagged_fraction = config.at("tagged_fraction").get<double>();
    const int replicates = config.at("replicates").get<int>();
    const TagReport report =
        run_tagged_assembly(alphabet, task, tagged_fraction, exchange, seed_of(config), replicates);

    json payload;
    payload["total_tagged_incorporations"] = report.total_tagged_incorporations;
    payload["separated_count"] = report.separated_count;
    payload["destinations"] = json{{"same_base", report.destinations.same_base},
                                   {"other_base_in_strand", report.destinations.other_base_in_strand},
                                   {"enzyme_pool", report.destinations.enzyme_pool}};
    if (report.total_tagged_incorporations > 0)
        payload["separation_fraction"] = separation_fraction(report);
    else
        payload["separation_fraction"] = nullptr;
    payload["seed"] = report.seed;
    return payload;
}

inline json execute_threshold(const json& config) {
    const double t_r = config.at("t_r").get<double>();
    const double t_d = config.at("t_d").get<double>();
    json payload;
    payload["t_r"] = t_r;
    payload["t_d"] = t_d;
    payload["t_r_over_t_d"] = t_r / t_d;
    payload["threshold"] = coherence_threshold(t_r, t_d);
    return payload;
}

}  // namespace detail

// Executes a run configuration and returns the results payload. Pure given
// the config (all randomness flows from master_seed), which is what makes
// run records replayable.
inline json execute_command(const json& config) {
    const std::string command = config.at("command").get<std::string>();
    if (command == "coefficients") return detail::execute_coefficients(config);
    if (command == "simulate") return detail::execute_simulate(config);
    if (command == "discriminate") return detail::execute_discriminate(config);
    if (command == "power") return detail::execute_power(config);
    if (command == "isotope") return detail::execute_isotope(config);
    if (command == "threshold") return detail::execute_threshold(config);
    throw std::invalid_argument("unknown command '" + command + "'");
}

inline json make_run_record(const json& config, const json& results, const std::string& started,
                            const std::string& finished) {
    json record;
    record["tool_version"] = kToolVersion;
    record["command"] = config.at("command");
    record["config_echo"] = config;
    record["rng_algorithm"] = std::string(kRngAlgorithm);
    record["master_seed"] = detail::seed_of(config);
    record["started"] = started;
    record["finished"] = finished;
    record["results"] = results;
    return record;
}

inline json run_command_with_record(const json& config) {
    const std::string started = iso8601_utc_now();
    const json results = execute_command(config);
    return make_run_record(config, results, started, iso8601_utc_now());
}

// True when re-executing the record's config_echo reproduces its results
// payload byte for byte.
inline bool replay_matches(const json& run_record) {
    const json replayed = execute_command(run_record.at("config_echo"));
    return replayed.dump() == run_record.at("results").dump();
}

// Plot-ready CSV rendering of a results payload. Column names and order are
// fixed per command (and per simulate kind); golden tests pin them.
inline std::string payload_to_csv(const std::string& command, const json& payload) {
    std::ostringstream out;
    const auto num = [](const json& value) { return format_double(value.get<double>()); };

    if (command == "coefficients") {
        out << "a,classical_coefficient,grover_iterations,quantum_coefficient\n";
        for (const auto& row : payload.at("rows"))
            out << row.at("a").get<int>() << ',' << num(row.at("classical_coefficient")) << ','
                << row.at("grover_iterations").get<int>() << ','
                << num(row.at("quantum_coefficient")) << '\n';
        return out.str();
    }
    if (command == "simulate") {
        const std::string kind = payload.at("kind").get<std::string>();
        if (kind == "classical") {
            out << "kind,a,n,t_d,seed,replicates,total_time,attempts_per_base,expected_total_time\n";
            out << kind << ',' << payload.at("a").get<int>() << ',' << payload.at("n").get<int>()
                << ',' << num(payload.at("t_d")) << ',' << payload.at("seed").get<std::uint64_t>()
                << ',' << payload.at("replicates").get<int>() << ',' << num(payload.at("total_time"))
                << ',' << num(payload.at("attempts_per_base")) << ','
                << num(payload.at("expected_total_time")) << '\n';
        } else if (kind == "quantum-ideal") {
            out << "kind,a,n,t_r,grover_iterations,total_time,rate\n";
            out << kind << ',' << payload.at("a").get<int>() << ',' << payload.at("n").get<int>()
                << ',' << num(payload.at("t_r")) << ',' << payload.at("grover_iterations").get<int>()
                << ',' << num(payload.at("total_time")) << ',' << num(payload.at("rate")) << '\n';
        } else {
            out << "kind,a,n,t_r,p_coherence,quantum_mode,p_eff,seed,replicates,total_time,"
                   "attempts_per_base\n";
            out << kind << ',' << payload.at("a").get<int>() << ',' << payload.at("n").get<int>()
                << ',' << num(payload.at("t_r")) << ',' << num(payload.at("p_coherence")) << ','
                << payload.at("quantum_mode").get<std::string>() << ',' << num(payload.at("p_eff"))
                << ',' << payload.at("seed").get<std::uint64_t>() << ','
                << payload.at("replicates").get<int>() << ',' << num(payload.at("total_time")) << ','
                << num(payload.at("attempts_per_base")) << '\n';
        }
        return out.str();
    }
    if (command == "discriminate") {
        out << "chosen_model,statistic,p_value,fitted_scale_classical,fitted_scale_quantum,"
               "bootstrap_B,seed\n";
        out << payload.at("chosen_model").get<std::string>() << ',' << num(payload.at("statistic"))
            << ',' << num(payload.at("p_value")) << ',' << num(payload.at("fitted_scale_classical"))
            << ',' << num(payload.at("fitted_scale_quantum")) << ','
            << payload.at("bootstrap_B").get<int>() << ',' << payload.at("seed").get<std::uint64_t>()
            << '\n';
        return out.str();
    }
    if (command == "power") {
        out << "sigma_rel,fraction_correct\n";
        for (const auto& row : payload.at("points"))
            out << num(row.at("sigma_rel")) << ',' << num(row.at("fraction_correct")) << '\n';
        return out.str();
    }
    if (command == "isotope") {
        out << "total_tagged_incorporations,separated_count,same_base,other_base_in_strand,"
               "enzyme_pool,separation_fraction,seed\n";
        const auto& destinations = payload.at("destinations");
        out << payload.at("total_tagged_incorporations").get<std::uint64_t>() << ','
            << payload.at("separated_count").get<std::uint64_t>() << ','
            << destinations.at("same_base").get<std::uint64_t>() << ','
            << destinations.at("other_base_in_strand").get<std::uint64_t>() << ','
            << destinations.at("enzyme_pool").get<std::uint64_t>() << ','
            << (payload.at("separation_fraction").is_null() ? std::string()
                                                            : num(payload.at("separation_fraction")))
            << ',' << payload.at("seed").get<std::uint64_t>() << '\n';
        return out.str();
    }
    if (command == "threshold") {
        out << "t_r,t_d,t_r_over_t_d,threshold\n";
        out << num(payload.at("t_r")) << ',' << num(payload.at("t_d")) << ','
            << num(payload.at("t_r_over_t_d")) << ',' << num(payload.at("threshold")) << '\n';
        return out.str();
    }
    throw std::invalid_argument("no CSV rendering for command '" + command + "'");
}

}  // namespace replisim
