#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "replisim/classical_assembly.hpp"
#include "replisim/core_model.hpp"
#include "replisim/rng.hpp"

namespace replisim {

// Real amplitude vector over the a symbols. The search never leaves the real
// plane spanned by the target state and the uniform state, so no complex
// arithmetic and no entanglement enter anywhere.
struct GroverState {
    std::vector<double> amplitudes;
    int target = 0;
    int iterations_applied = 0;
};

inline void validate_alphabet_target(int a, int target) {
    if (a < 1) throw std::invalid_argument("alphabet size must be >= 1");
    if (target < 0 || target >= a) throw std::invalid_argument("target index out of range");
}

inline GroverState uniform_state(int a, int target) {
    validate_alphabet_target(a, target);
    GroverState state;
    state.amplitudes.assign(static_cast<std::size_t>(a),
                            1.0 / std::sqrt(static_cast<double>(a)));
    state.target = target;
    return state;
}

// theta = arcsin(1/sqrt(a)), the rotation per iteration. theta(1) = pi/2.
inline double grover_angle(int a) {
    if (a < 1) throw std::invalid_argument("grover_angle: a must be >= 1");
    return std::asin(1.0 / std::sqrt(static_cast<double>(a)));
}

// Real-valued solution of (2Q+1)*theta = pi/2.
inline double grover_iterations_exact(int a) {
    const double theta = grover_angle(a);
    return 0.5 * (std::numbers::pi / (2.0 * theta) - 1.0);
}

// Iteration count: Q itself when integral, otherwise the next integer up.
// The snap tolerance matters: in double arithmetic Q(4) lands at 1 - 2e-16
// and must be recognized as the exact integer 1.
inline int iterations_required(int a) {
    const double q = grover_iterations_exact(a);
    const double nearest = std::round(q);
    if (std::abs(q - nearest) <= 1e-9) return static_cast<int>(nearest);
    return static_cast<int>(std::ceil(q));
}

// Step (i): the property check flips the sign of the target amplitude.
inline GroverState oracle_flip(GroverState state) {
    state.amplitudes[static_cast<std::size_t>(state.target)] =
        -state.amplitudes[static_cast<std::size_t>(state.target)];
    return state;
}

// Step (ii): every amplitude is reflected about the mean, x -> 2*mean - x.
inline GroverState inversion_about_mean(GroverState state) {
    double mean = 0.0;
    for (double x : state.amplitudes) mean += x;
    mean /= static_cast<double>(state.amplitudes.size());
    for (double& x : state.amplitudes) x = 2.0 * mean - x;
    return state;
}

// k rounds of flip-and-reflect from the uniform state. Returns the final
// state and the squared target amplitude.
inline std::pair<GroverState, double> grover_search(int a, int target, int k) {
    if (k < 0) throw std::invalid_argument("grover_search: iteration count must be >= 0");
    GroverState state = uniform_state(a, target);
    for (int i = 0; i < k; ++i) state = inversion_about_mean(oracle_flip(std::move(state)));
    state.iterations_applied = k;
    const double amp = state.amplitudes[static_cast<std::size_t>(target)];
    return {std::move(state), amp * amp};
}

// sin^2((2k+1)*arcsin(1/sqrt(a))): the closed form the state-vector walk must
// reproduce. Kept as an independent route for cross-checking the iteration.
inline double success_probability_closed_form(int a, int k) {
    if (a < 1) throw std::invalid_argument("a must be >= 1");
    if (k < 0) throw std::invalid_argument("iteration count must be >= 0");
    const double s = std::sin((2.0 * k + 1.0) * grover_angle(a));
    return s * s;
}

// T_q = Q(a) * t_r * n, one t_r per Grover block. With Q(a)=1 for a in
// {2,3,4} and Q=2 for a in {5..10} this reproduces both quantum time bands.
// a=1 needs no search (Q=0) but the base must still be picked and attached,
// so its time is pinned to t_r * n to keep the control strand measurable.
inline double quantum_assembly_time(int a, int n, double t_r) {
    if (a < 1) throw std::invalid_argument("quantum_assembly_time: a must be >= 1");
    if (n < 1) throw std::invalid_argument("quantum_assembly_time: n must be >= 1");
    if (!(t_r > 0.0)) throw std::invalid_argument("quantum_assembly_time: t_r must be positive");
    const int blocks = (a == 1) ? 1 : iterations_required(a);
    return static_cast<double>(blocks) * t_r * static_cast<double>(n);
}

// Quantum rate law R_q = 1/t_r for a <= 4, independent of a. Larger a falls
// outside the single-iteration band; use quantum_assembly_time instead.
inline RatePrediction quantum_rate(int a, double t_r) {
    if (a < 1 || a > 4)
        throw std::invalid_argument("quantum_rate: defined for 1 <= a <= 4 only");
    if (!(t_r > 0.0)) throw std::invalid_argument("quantum_rate: t_r must be positive");
    RatePrediction prediction;
    prediction.model = ModelKind::QuantumIdeal;
    prediction.a = a;
    prediction.rate = 1.0 / t_r;
    prediction.params_echo = {{"t_r", t_r}};
    return prediction;
}

// Minimum per-attempt success probability at which imperfect quantum assembly
// still beats the best classical alternative (a=3), at equal information:
//   threshold = [Q(4)/ln 4] / [3/ln 3] * (t_r/t_d)
// Derived from the two time laws, never from the printed 0.264.
inline double coherence_threshold(double t_r, double t_d) {
    if (!(t_r > 0.0)) throw std::invalid_argument("coherence_threshold: t_r must be positive");
    if (!(t_d > 0.0)) throw std::invalid_argument("coherence_threshold: t_d must be positive");
    const double quantum_coefficient =
        static_cast<double>(iterations_required(4)) / std::log(4.0);
    return (quantum_coefficient / classical_coefficient(3.0)) * (t_r / t_d);
}

// Idealized: a completed (undisrupted) Grover block is treated as certain to
// select the right base, matching the quantum time/rate laws verbatim.
// Physical: a completed block succeeds with its actual amplitude-squared
// probability (1/2 for a=2, 25/27 for a=3, 1 for a=4).
enum class QuantumMode { Idealized, Physical };

inline const char* to_string(QuantumMode mode) {
    return mode == QuantumMode::Idealized ? "idealized" : "physical";
}

struct ImperfectQuantumConfig {
    double p_coherence = 1.0;   // probability an attempt completes undisrupted
    double t_r_over_t_d = 1.0;  // ratio entering the coherence threshold
    QuantumMode mode = QuantumMode::Idealized;
};

inline double effective_success_probability(int a, const ImperfectQuantumConfig& config) {
    const double algorithmic = config.mode == QuantumMode::Physical
                                   ? success_probability_closed_form(a, iterations_required(a))
                                   : 1.0;
    return config.p_coherence * algorithmic;
}

// Decoherence-disrupted assembly: each per-base attempt costs one t_r block
// and succeeds with p_eff = p_coherence * P(algorithm); failed attempts
// restart, giving geometric retries with expected per-base time t_r / p_eff.
inline SimResult simulate_imperfect_quantum(const AlphabetSpec& alphabet, const ChainTask& task,
                                            const TimingParams& timing,
                                            const ImperfectQuantumConfig& config,
                                            std::uint64_t seed, int replicates) {
    if (alphabet.a < 1 || alphabet.a > 4)
        throw std::invalid_argument("simulate_imperfect_quantum: requires 1 <= a <= 4");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (!(timing.t_r > 0.0)) throw std::invalid_argument("t_r must be positive");
    if (config.p_coherence < 0.0 || config.p_coherence > 1.0)
        throw std::invalid_argument("p_coherence must lie in [0, 1]");

    const double p_eff = effective_success_probability(alphabet.a, config);
    if (!(p_eff > 0.0))
        throw std::invalid_argument("effective success probability is zero; assembly would never finish");

    std::uint64_t total_attempts = 0;
    for (int r = 0; r < replicates; ++r) {
        Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(r)));
        for (int i = 0; i < task.n; ++i) {
            std::uint64_t attempts = 1;
            while (!(rng.uniform01() < p_eff)) ++attempts;
            total_attempts += attempts;
        }
    }

    SimResult result;
    result.n_assembled = task.n;
    result.seed = seed;
    result.replicates = replicates;
    result.attempts_per_base = static_cast<double>(total_attempts) /
                               (static_cast<double>(replicates) * static_cast<double>(task.n));
    result.total_time = timing.t_r * static_cast<double>(total_attempts) /
                        static_cast<double>(replicates);
    return result;
}

}  // namespace replisim
