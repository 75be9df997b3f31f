#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace replisim {

// Symbol set of size a. Models the building-block repertoire of a
// template-directed chain (a=4 for natural DNA).
struct AlphabetSpec {
    int a = 0;
    std::vector<std::string> labels;
};

// Target chain of length n over an alphabet. The count of distinct chains
// a^n is never materialized; only ln(a^n) = n*ln(a) is kept, since n can be
// genome-sized.
struct ChainTask {
    int n = 0;
    std::vector<int> target;
    double ln_information = 0.0;
};

// The two time scales of the assembly models, in abstract units.
// t_d: classical pick-and-check time per attempt. t_r: quantum per-base time.
// The classical per-base time t_a = a*t_d is derived, never stored.
struct TimingParams {
    double t_d = 1.0;
    double t_r = 1.0;
    std::string time_unit = "arb";
};

namespace detail {

inline std::vector<std::string> preset_labels(int a) {
    switch (a) {
        case 1: return {"A"};
        case 2: return {"A", "T"};
        case 3: return {"A", "C", "G"};
        case 4: return {"A", "C", "G", "T"};
        default: break;
    }
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(a));
    for (int i = 1; i <= a; ++i) labels.push_back("B" + std::to_string(i));
    return labels;
}

}  // namespace detail

inline AlphabetSpec make_alphabet(int a, std::vector<std::string> labels = {}) {
    if (a < 1) throw std::invalid_argument("alphabet size must be >= 1");
    if (labels.empty()) {
        labels = detail::preset_labels(a);
    } else {
        if (static_cast<int>(labels.size()) != a)
            throw std::invalid_argument("label count must equal alphabet size");
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                if (labels[i] == labels[j])
                    throw std::invalid_argument("alphabet labels must be distinct");
    }
    return AlphabetSpec{a, std::move(labels)};
}

// Information content of the chain: ln(a^n) = n*ln(a). Zero for a=1, which
// carries no information but still has a measurable assembly rate.
inline double ln_information(int a, int n) {
    if (a < 1) throw std::invalid_argument("ln_information: a must be >= 1");
    if (n < 1) throw std::invalid_argument("ln_information: n must be >= 1");
    return static_cast<double>(n) * std::log(static_cast<double>(a));
}

inline ChainTask make_chain_task(const AlphabetSpec& alphabet, std::vector<int> target) {
    if (target.empty()) throw std::invalid_argument("chain task needs length >= 1");
    for (int s : target)
        if (s < 0 || s >= alphabet.a)
            throw std::invalid_argument("target symbol index out of alphabet range");
    const int n = static_cast<int>(target.size());
    return ChainTask{n, std::move(target), ln_information(alphabet.a, n)};
}

// Default target: the repeating cycle 0,1,...,a-1. Attempt statistics are
// target-independent under uniform picks, so any pattern serves.
inline ChainTask make_chain_task(const AlphabetSpec& alphabet, int n) {
    if (n < 1) throw std::invalid_argument("chain task needs length >= 1");
    std::vector<int> target(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) target[static_cast<std::size_t>(i)] = i % alphabet.a;
    return make_chain_task(alphabet, std::move(target));
}

inline TimingParams make_timing(double t_d, double t_r, std::string time_unit = "arb") {
    if (!(t_d > 0.0)) throw std::invalid_argument("t_d must be positive");
    if (!(t_r > 0.0)) throw std::invalid_argument("t_r must be positive");
    return TimingParams{t_d, t_r, std::move(time_unit)};
}

// Coefficient of t_d*ln(N) in the classical assembly time: a/ln(a).
// Diverges as a -> 1+, so a=1 is rejected here and handled by the rate law
// directly.
inline double classical_coefficient(double a) {
    if (!(a > 1.0))
        throw std::domain_error("classical_coefficient: defined only for a > 1");
    return a / std::log(a);
}

// Real-valued minimizer of a/ln(a), found by golden-section search rather
// than hard-coding the known answer e.
inline double optimal_alphabet_real() {
    constexpr double tol = 1e-9;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1.0 + 1e-9;
    double hi = 10.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = classical_coefficient(x1);
    double f2 = classical_coefficient(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = classical_coefficient(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = classical_coefficient(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// Best integer alphabet size in [2, a_max]. Ties would break toward the
// smaller a; a/ln(a) has none on the integers.
inline int optimal_alphabet_integer(int a_max) {
    if (a_max < 2) throw std::invalid_argument("optimal_alphabet_integer: a_max must be >= 2");
    int best_a = 2;
    double best = classical_coefficient(2.0);
    for (int a = 3; a <= a_max; ++a) {
        const double value = classical_coefficient(static_cast<double>(a));
        if (value < best) {
            best = value;
            best_a = a;
        }
    }
    return best_a;
}

}  // namespace replisim
