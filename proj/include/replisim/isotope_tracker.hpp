#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "replisim/core_model.hpp"
#include "replisim/rng.hpp"

namespace replisim {

// A base carrying optional isotope tags on its two atom groups: the large
// group common to all base types and the small group that tells them apart.
struct TaggedBase {
    int base_index = 0;
    std::optional<std::uint64_t> large_tag;
    std::optional<std::uint64_t> small_tag;
};

// Where a small-group tag ends up after incorporation.
enum class TagDestination : std::uint8_t { SameBase, OtherBaseInStrand, EnzymePool };

struct ExchangeConfig {
    double exchange_prob = 0.0;  // per incorporation event
    double enzyme_weight = 0.0;  // P(exchange partner = enzyme); else another base
};

struct DestinationCounts {
    std::uint64_t same_base = 0;
    std::uint64_t other_base_in_strand = 0;
    std::uint64_t enzyme_pool = 0;
};

struct TagReport {
    std::uint64_t total_tagged_incorporations = 0;
    std::uint64_t separated_count = 0;
    DestinationCounts destinations;
    std::uint64_t seed = 0;
};

namespace detail {

inline void validate_exchange_inputs(const ChainTask& task, double tagged_fraction,
                                     const ExchangeConfig& config, int replicates) {
    if (task.n < 1) throw std::invalid_argument("isotope run: task length must be >= 1");
    if (!(tagged_fraction > 0.0) || tagged_fraction > 1.0)
        throw std::invalid_argument("isotope run: tagged_fraction must lie in (0, 1]");
    if (config.exchange_prob < 0.0 || config.exchange_prob > 1.0)
        throw std::invalid_argument("isotope run: exchange_prob must lie in [0, 1]");
    if (config.enzyme_weight < 0.0 || config.enzyme_weight > 1.0)
        throw std::invalid_argument("isotope run: enzyme_weight must lie in [0, 1]");
    if (replicates < 1) throw std::invalid_argument("isotope run: replicates must be >= 1");
}

}  // namespace detail

// Assembly with an isotopically tagged base supply. Each incorporated base is
// tagged with probability tagged_fraction (one fresh id pair on its large and
// small groups); with probability exchange_prob the small group is swapped out
// during incorporation, landing in the enzyme pool or on another base bound
// for the strand. The ledger records one final destination per tag id, so
// conservation is checkable tag by tag.
inline TagReport run_tagged_assembly_with_ledger(const AlphabetSpec& alphabet,
                                                 const ChainTask& task, double tagged_fraction,
                                                 const ExchangeConfig& config, std::uint64_t seed,
                                                 int replicates,
                                                 std::vector<TagDestination>* ledger_out) {
    detail::validate_exchange_inputs(task, tagged_fraction, config, replicates);
    if (alphabet.a < 1) throw std::invalid_argument("isotope run: alphabet size must be >= 1");

    std::vector<TagDestination> ledger;
    TagReport report;
    report.seed = seed;

    std::vector<TaggedBase> strand(static_cast<std::size_t>(task.n));
    for (int r = 0; r < replicates; ++r) {
        Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(r)));
        for (int i = 0; i < task.n; ++i) {
            auto& base = strand[static_cast<std::size_t>(i)];
            base = TaggedBase{task.target[static_cast<std::size_t>(i)], std::nullopt, std::nullopt};
            if (!(rng.uniform01() < tagged_fraction)) continue;

            const std::uint64_t tag_id = ledger.size();
            base.large_tag = tag_id;
            TagDestination destination;
            if (rng.uniform01() < config.exchange_prob) {
                // Swapped-in small group is untagged; ours moves to the partner.
                destination = rng.uniform01() < config.enzyme_weight
                                  ? TagDestination::EnzymePool
                                  : TagDestination::OtherBaseInStrand;
            } else {
                base.small_tag = tag_id;
                destination = TagDestination::SameBase;
            }
            ledger.push_back(destination);
        }
    }

    report.total_tagged_incorporations = ledger.size();
    for (TagDestination d : ledger) {
        switch (d) {
            case TagDestination::SameBase: ++report.destinations.same_base; break;
            case TagDestination::OtherBaseInStrand: ++report.destinations.other_base_in_strand; break;
            case TagDestination::EnzymePool: ++report.destinations.enzyme_pool; break;
        }
    }
    report.separated_count =
        report.destinations.other_base_in_strand + report.destinations.enzyme_pool;
    if (ledger_out) *ledger_out = std::move(ledger);
    return report;
}

inline TagReport run_tagged_assembly(const AlphabetSpec& alphabet, const ChainTask& task,
                                     double tagged_fraction, const ExchangeConfig& config,
                                     std::uint64_t seed, int replicates) {
    return run_tagged_assembly_with_ledger(alphabet, task, tagged_fraction, config, seed,
                                           replicates, nullptr);
}

inline double separation_fraction(const TagReport& report) {
    if (report.total_tagged_incorporations == 0)
        throw std::invalid_argument("separation_fraction: no tagged incorporations");
    return static_cast<double>(report.separated_count) /
           static_cast<double>(report.total_tagged_incorporations);
}

}  // namespace replisim
