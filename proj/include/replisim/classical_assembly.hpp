#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "replisim/core_model.hpp"
#include "replisim/rng.hpp"

namespace replisim {

enum class ModelKind { Classical, QuantumIdeal, QuantumImperfect };

inline const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Classical: return "classical";
        case ModelKind::QuantumIdeal: return "quantum-ideal";
        case ModelKind::QuantumImperfect: return "quantum-imperfect";
    }
    return "?";
}

struct RatePrediction {
    ModelKind model = ModelKind::Classical;
    int a = 0;
    double rate = 0.0;  // bases per unit time
    std::map<std::string, double> params_echo;
};

// Aggregate of a seeded simulation run. total_time and attempts_per_base are
// means over replicates; attempt counts are accumulated as integers, so the
// aggregate is independent of summation order.
struct SimResult {
    double total_time = 0.0;
    double attempts_per_base = 0.0;
    int n_assembled = 0;
    std::uint64_t seed = 0;
    int replicates = 0;
};

// Expected classical assembly time t_d * a * n. Each position needs a
// geometric number of picks with success probability 1/a, mean a; at a=1
// every pick succeeds and the formula degenerates to t_d * n.
inline double expected_classical_time(const AlphabetSpec& alphabet, const ChainTask& task,
                                      const TimingParams& timing) {
    if (alphabet.a < 1) throw std::invalid_argument("alphabet size must be >= 1");
    if (!(timing.t_d > 0.0)) throw std::invalid_argument("t_d must be positive");
    return timing.t_d * static_cast<double>(alphabet.a) * static_cast<double>(task.n);
}

// Classical rate law R_c(a) = 1 / (a * t_d).
inline RatePrediction classical_rate(int a, double t_d) {
    if (a < 1) throw std::invalid_argument("classical_rate: a must be >= 1");
    if (!(t_d > 0.0)) throw std::invalid_argument("classical_rate: t_d must be positive");
    RatePrediction prediction;
    prediction.model = ModelKind::Classical;
    prediction.a = a;
    prediction.rate = 1.0 / (static_cast<double>(a) * t_d);
    prediction.params_echo = {{"t_d", t_d}};
    return prediction;
}

// Memoryless pick-check-discard assembly. Every position draws uniform picks
// over the a symbols until the pick matches the target; each pick costs t_d.
// Discarded picks return to the pool, so trials are geometric with p = 1/a.
inline SimResult simulate_classical(const AlphabetSpec& alphabet, const ChainTask& task,
                                    const TimingParams& timing, std::uint64_t seed,
                                    int replicates) {
    if (alphabet.a < 1) throw std::invalid_argument("alphabet size must be >= 1");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (!(timing.t_d > 0.0)) throw std::invalid_argument("t_d must be positive");
    for (int s : task.target)
        if (s < 0 || s >= alphabet.a)
            throw std::invalid_argument("task target does not fit the alphabet");

    const auto a = static_cast<std::uint64_t>(alphabet.a);
    std::uint64_t total_attempts = 0;
    for (int r = 0; r < replicates; ++r) {
        Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(r)));
        for (int i = 0; i < task.n; ++i) {
            const auto want = static_cast<std::uint64_t>(task.target[static_cast<std::size_t>(i)]);
            std::uint64_t picks = 1;
            while (rng.uniform_below(a) != want) ++picks;
            total_attempts += picks;
        }
    }

    SimResult result;
    result.n_assembled = task.n;
    result.seed = seed;
    result.replicates = replicates;
    result.attempts_per_base = static_cast<double>(total_attempts) /
                               (static_cast<double>(replicates) * static_cast<double>(task.n));
    result.total_time = timing.t_d * static_cast<double>(total_attempts) /
                        static_cast<double>(replicates);
    return result;
}

struct RateRatio {
    int a_numerator = 0;
    int a_denominator = 0;
    double ratio = 0.0;
};

// R_c(a_i) / R_c(a_j) for all ordered pairs i < j. t_d cancels, which is the
// point: ratios are free of the unknown systematic scale.
inline std::vector<RateRatio> rate_ratio_table(double t_d, const std::vector<int>& a_values) {
    if (a_values.empty()) throw std::invalid_argument("rate_ratio_table: empty alphabet list");
    std::vector<double> rates;
    rates.reserve(a_values.size());
    for (int a : a_values) rates.push_back(classical_rate(a, t_d).rate);

    std::vector<RateRatio> table;
    for (std::size_t i = 0; i < a_values.size(); ++i)
        for (std::size_t j = i + 1; j < a_values.size(); ++j)
            table.push_back(RateRatio{a_values[i], a_values[j], rates[i] / rates[j]});
    return table;
}

}  // namespace replisim
