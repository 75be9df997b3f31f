// replisim — command-line front end.
//
// Every run is executed from a JSON run configuration and emitted either as a
// full run record (--format json: tool version, config echo, RNG algorithm,
// seed, timestamps, results) or as a plot-ready table (--format csv). Replaying
// a record's config_echo reproduces its results payload byte for byte.
//
// Exit codes: 0 success, 2 validation error, 3 input-parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <replisim/replisim.hpp>

namespace {

using replisim::json;

struct OutputOptions {
    std::string out_path;  // empty = stdout
    std::string format = "json";
};

void add_output_options(CLI::App* cmd, OutputOptions* output, const std::string& default_format) {
    output->format = default_format;
    cmd->add_option("--out", output->out_path, "Write output to this file instead of stdout");
    cmd->add_option("--format", output->format,
                    "Output format: json = full run record, csv = plot-ready table")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

int emit(const json& config, const OutputOptions& output) {
    const json record = replisim::run_command_with_record(config);
    std::string text;
    if (output.format == "csv")
        text = replisim::payload_to_csv(config.at("command").get<std::string>(),
                                        record.at("results"));
    else
        text = record.dump(2) + "\n";

    if (output.out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream file(output.out_path, std::ios::binary);
    file << text;
    if (!file.good()) throw std::invalid_argument("cannot write output file '" + output.out_path + "'");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chain-replication rate laws: simulation and model discrimination"};
    app.require_subcommand(1);

    // --- coefficients ---------------------------------------------------
    auto* coefficients = app.add_subcommand(
        "coefficients", "Per-alphabet assembly-time coefficients and search iteration counts");
    int a_min = 0;
    int a_max = 0;
    std::uint64_t coefficients_seed = 0;
    OutputOptions coefficients_output;
    coefficients->add_option("a_min", a_min, "Smallest alphabet size (>= 2)")->required();
    coefficients->add_option("a_max", a_max, "Largest alphabet size")->required();
    coefficients->add_option("--seed", coefficients_seed, "Master seed (unused; echoed in record)");
    add_output_options(coefficients, &coefficients_output, "csv");

    // --- simulate --------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Simulate chain assembly under one model");
    std::string simulate_kind;
    int simulate_a = 4;
    int simulate_n = 100;
    double simulate_t_d = 1.0;
    double simulate_t_r = 1.0;
    double simulate_p_coherence = 1.0;
    std::string simulate_quantum_mode = "idealized";
    int simulate_replicates = 8;
    std::uint64_t simulate_seed = 0;
    OutputOptions simulate_output;
    simulate
        ->add_option("--kind", simulate_kind,
                     "Assembly model: classical | quantum-ideal | quantum-imperfect")
        ->required()
        ->check(CLI::IsMember({"classical", "quantum-ideal", "quantum-imperfect"}));
    simulate->add_option("--a", simulate_a, "Alphabet size")->capture_default_str();
    simulate->add_option("--n", simulate_n, "Chain length")->capture_default_str();
    simulate->add_option("--t-d", simulate_t_d, "Classical pick-and-check time per attempt")
        ->capture_default_str();
    simulate->add_option("--t-r", simulate_t_r, "Quantum per-base relaxation time")
        ->capture_default_str();
    simulate
        ->add_option("--p-coherence", simulate_p_coherence,
                     "Probability a quantum attempt completes undisrupted (quantum-imperfect)")
        ->capture_default_str();
    simulate
        ->add_option("--quantum-mode", simulate_quantum_mode,
                     "Per-attempt success model: idealized | physical")
        ->check(CLI::IsMember({"idealized", "physical"}))
        ->capture_default_str();
    simulate->add_option("--replicates", simulate_replicates, "Monte Carlo replicates")
        ->capture_default_str();
    simulate->add_option("--seed", simulate_seed, "Master seed")->capture_default_str();
    add_output_options(simulate, &simulate_output, "json");

    // --- discriminate ------------------------------------------------------
    auto* discriminate =
        app.add_subcommand("discriminate", "Decide between the 1/a and constant rate laws");
    std::string discriminate_input;
    int discriminate_bootstrap = 1000;
    std::uint64_t discriminate_seed = 0;
    OutputOptions discriminate_output;
    discriminate
        ->add_option("input", discriminate_input,
                     "CSV of rate samples with header a,observed_rate,sigma_rel")
        ->required();
    discriminate->add_option("--bootstrap", discriminate_bootstrap, "Parametric bootstrap rounds")
        ->capture_default_str();
    discriminate->add_option("--seed", discriminate_seed, "Master seed")->capture_default_str();
    add_output_options(discriminate, &discriminate_output, "json");

    // --- power -------------------------------------------------------------
    auto* power =
        app.add_subcommand("power", "Fraction of correct verdicts as a function of noise");
    std::string power_model;
    std::vector<double> power_sigma_levels;
    int power_repeats = 10;
    int power_trials = 100;
    int power_bootstrap = 500;
    std::uint64_t power_seed = 0;
    OutputOptions power_output;
    power->add_option("--model", power_model, "True data-generating law: classical | quantum")
        ->required()
        ->check(CLI::IsMember({"classical", "quantum"}));
    power->add_option("--sigma", power_sigma_levels, "Relative noise level (repeatable)")
        ->required()
        ->expected(1, -1);
    power->add_option("--repeats", power_repeats, "Rate samples per alphabet size")
        ->capture_default_str();
    power->add_option("--trials", power_trials, "Generate+discriminate rounds per sigma")
        ->capture_default_str();
    power->add_option("--bootstrap", power_bootstrap, "Bootstrap rounds inside each verdict")
        ->capture_default_str();
    power->add_option("--seed", power_seed, "Master seed")->capture_default_str();
    add_output_options(power, &power_output, "json");

    // --- isotope -------------------------------------------------------------
    auto* isotope = app.add_subcommand(
        "isotope", "Tag-exchange assembly: do tagged atom groups separate during incorporation?");
    int isotope_a = 4;
    int isotope_n = 250;
    double isotope_tagged_fraction = 1.0;
    double isotope_exchange_prob = 0.0;
    double isotope_enzyme_weight = 0.0;
    int isotope_replicates = 8;
    std::uint64_t isotope_seed = 0;
    OutputOptions isotope_output;
    isotope->add_option("--a", isotope_a, "Alphabet size")->capture_default_str();
    isotope->add_option("--n", isotope_n, "Chain length")->capture_default_str();
    isotope
        ->add_option("--tagged-fraction", isotope_tagged_fraction,
                     "Probability an incorporated base carries tags")
        ->capture_default_str();
    isotope
        ->add_option("--exchange-prob", isotope_exchange_prob,
                     "Probability an incorporation swaps the small-group tag")
        ->required();
    isotope
        ->add_option("--enzyme-weight", isotope_enzyme_weight,
                     "Fraction of exchanges that deposit the tag in the enzyme pool")
        ->capture_default_str();
    isotope->add_option("--replicates", isotope_replicates, "Monte Carlo replicates")
        ->capture_default_str();
    isotope->add_option("--seed", isotope_seed, "Master seed")->capture_default_str();
    add_output_options(isotope, &isotope_output, "json");

    // --- threshold -----------------------------------------------------------
    auto* threshold = app.add_subcommand(
        "threshold", "Minimum per-attempt success probability for a quantum advantage");
    double threshold_t_r = 1.0;
    double threshold_t_d = 1.0;
    std::uint64_t threshold_seed = 0;
    OutputOptions threshold_output;
    threshold->add_option("--t-r", threshold_t_r, "Quantum per-base relaxation time")
        ->capture_default_str();
    threshold->add_option("--t-d", threshold_t_d, "Classical pick-and-check time per attempt")
        ->capture_default_str();
    threshold->add_option("--seed", threshold_seed, "Master seed (unused; echoed in record)");
    add_output_options(threshold, &threshold_output, "json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "replisim: error: validation: " << e.what() << "\n";
        return 2;
    }

    try {
        if (coefficients->parsed()) {
            json config;
            config["command"] = "coefficients";
            config["master_seed"] = coefficients_seed;
            config["a_min"] = a_min;
            config["a_max"] = a_max;
            return emit(config, coefficients_output);
        }
        if (simulate->parsed()) {
            json config;
            config["command"] = "simulate";
            config["master_seed"] = simulate_seed;
            config["kind"] = simulate_kind;
            config["a"] = simulate_a;
            config["n"] = simulate_n;
            if (simulate_kind == "classical") {
                config["t_d"] = simulate_t_d;
                config["replicates"] = simulate_replicates;
            } else if (simulate_kind == "quantum-ideal") {
                config["t_r"] = simulate_t_r;
            } else {
                config["t_d"] = simulate_t_d;
                config["t_r"] = simulate_t_r;
                config["p_coherence"] = simulate_p_coherence;
                config["quantum_mode"] = simulate_quantum_mode;
                config["replicates"] = simulate_replicates;
            }
            return emit(config, simulate_output);
        }
        if (discriminate->parsed()) {
            const auto samples = replisim::read_rate_samples_csv_file(discriminate_input);
            json sample_rows = json::array();
            for (const auto& s : samples) {
                json row;
                row["a"] = s.a;
                row["observed_rate"] = s.observed_rate;
                row["sigma_rel"] = s.sigma_rel;
                sample_rows.push_back(std::move(row));
            }
            json config;
            config["command"] = "discriminate";
            config["master_seed"] = discriminate_seed;
            config["input_path"] = discriminate_input;
            config["samples"] = std::move(sample_rows);  // inline: records replay standalone
            config["bootstrap_B"] = discriminate_bootstrap;
            return emit(config, discriminate_output);
        }
        if (power->parsed()) {
            json config;
            config["command"] = "power";
            config["master_seed"] = power_seed;
            config["model"] = power_model;
            config["sigma_levels"] = power_sigma_levels;
            config["repeats_per_a"] = power_repeats;
            config["trials"] = power_trials;
            config["bootstrap_B"] = power_bootstrap;
            return emit(config, power_output);
        }
        if (isotope->parsed()) {
            json config;
            config["command"] = "isotope";
            config["master_seed"] = isotope_seed;
            config["a"] = isotope_a;
            config["n"] = isotope_n;
            config["tagged_fraction"] = isotope_tagged_fraction;
            config["exchange_prob"] = isotope_exchange_prob;
            config["enzyme_weight"] = isotope_enzyme_weight;
            config["replicates"] = isotope_replicates;
            return emit(config, isotope_output);
        }
        json config;
        config["command"] = "threshold";
        config["master_seed"] = threshold_seed;
        config["t_r"] = threshold_t_r;
        config["t_d"] = threshold_t_d;
        return emit(config, threshold_output);
    } catch (const replisim::CsvParseError& e) {
        std::cerr << "replisim: error: parse: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "replisim: error: validation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "replisim: error: validation: " << e.what() << "\n";
        return 2;
    }
}
