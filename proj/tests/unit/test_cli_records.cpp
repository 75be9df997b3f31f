#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <replisim/replisim.hpp>

using namespace replisim;

namespace {

struct CliRun {
    int exit_code = -1;
    std::string out;  // stdout
    std::string err;  // stderr
};

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("replisim_unit_" + name);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CliRun run_cli(const std::string& args) {
    const auto err_path = temp_path("stderr.txt");
    const std::string command =
        std::string(REPLISIM_CLI_PATH) + " " + args + " 2>" + err_path.string();
    CliRun result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.err = slurp(err_path);
    return result;
}

double parse_double_exact(const std::string& text) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    REQUIRE(result.ec == std::errc{});
    return value;
}

}  // namespace

TEST_CASE("17-digit doubles survive the text round trip") {
    for (double value : {1.0 / 3.0, 0.1, 0.05, 2.8853900817779268, 1e-300, 6.02214076e23, 1.0}) {
        const std::string text = format_double(value);
        REQUIRE(parse_double_exact(text) == value);
    }
    REQUIRE(format_double(0.25) == "0.25");
    REQUIRE(format_double(1.0) == "1");
    REQUIRE(format_double(0.05) == "0.050000000000000003");
}

TEST_CASE("rate sample CSV format") {
    const std::vector<RateSample> samples = {RateSample{1, 1.0, 0.05}, RateSample{4, 0.25, 0.1}};

    SECTION("golden serialization") {
        std::ostringstream out;
        write_rate_samples_csv(out, samples);
        REQUIRE(out.str() ==
                "a,observed_rate,sigma_rel\n"
                "1,1,0.050000000000000003\n"
                "4,0.25,0.10000000000000001\n");
    }
    SECTION("round trip preserves every bit") {
        std::stringstream stream;
        write_rate_samples_csv(stream, samples);
        const auto back = read_rate_samples_csv(stream);
        REQUIRE(back.size() == samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            REQUIRE(back[i].a == samples[i].a);
            REQUIRE(back[i].observed_rate == samples[i].observed_rate);
            REQUIRE(back[i].sigma_rel == samples[i].sigma_rel);
        }
    }
    SECTION("carriage returns and a trailing blank line are tolerated") {
        std::istringstream in("a,observed_rate,sigma_rel\r\n2,0.5,0.1\r\n\n");
        const auto rows = read_rate_samples_csv(in);
        REQUIRE(rows.size() == 1);
        REQUIRE(rows[0].a == 2);
        REQUIRE(rows[0].observed_rate == 0.5);
    }
}

TEST_CASE("CSV parse errors name the offending line") {
    const auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_rate_samples_csv(in);
        } catch (const CsvParseError& e) {
            return e.line;
        }
        return std::size_t(-1);
    };

    REQUIRE(line_of("wrong,header,row\n1,1,0.1\n") == 1);
    REQUIRE(line_of("") == 1);
    REQUIRE(line_of("a,observed_rate,sigma_rel\n1,1\n") == 2);
    REQUIRE(line_of("a,observed_rate,sigma_rel\n1,1,0.1\n2,x,0.1\n") == 3);
    REQUIRE(line_of("a,observed_rate,sigma_rel\n5,1,0.1\n") == 2);
    REQUIRE(line_of("a,observed_rate,sigma_rel\n2,-1,0.1\n") == 2);
    REQUIRE(line_of("a,observed_rate,sigma_rel\n2,1,0\n") == 2);

    try {
        read_rate_samples_csv_file("/nonexistent/replisim.csv");
        FAIL("expected CsvParseError");
    } catch (const CsvParseError& e) {
        REQUIRE(e.line == 0);
    }
}

namespace {

std::vector<json> sample_configs() {
    json coefficients;
    coefficients["command"] = "coefficients";
    coefficients["master_seed"] = 0;
    coefficients["a_min"] = 2;
    coefficients["a_max"] = 6;

    json classical;
    classical["command"] = "simulate";
    classical["master_seed"] = 9;
    classical["kind"] = "classical";
    classical["a"] = 3;
    classical["n"] = 50;
    classical["t_d"] = 1.0;
    classical["replicates"] = 4;

    json ideal;
    ideal["command"] = "simulate";
    ideal["master_seed"] = 0;
    ideal["kind"] = "quantum-ideal";
    ideal["a"] = 7;
    ideal["n"] = 30;
    ideal["t_r"] = 0.5;

    json imperfect;
    imperfect["command"] = "simulate";
    imperfect["master_seed"] = 11;
    imperfect["kind"] = "quantum-imperfect";
    imperfect["a"] = 4;
    imperfect["n"] = 40;
    imperfect["t_d"] = 1.0;
    imperfect["t_r"] = 1.0;
    imperfect["p_coherence"] = 0.4;
    imperfect["quantum_mode"] = "physical";
    imperfect["replicates"] = 3;

    json discriminate;
    discriminate["command"] = "discriminate";
    discriminate["master_seed"] = 3;
    discriminate["bootstrap_B"] = 150;
    json rows = json::array();
    for (int a = 1; a <= 4; ++a)
        for (int j = 0; j < 3; ++j) {
            json row;
            row["a"] = a;
            row["observed_rate"] = 1.0 / a;
            row["sigma_rel"] = 0.05;
            rows.push_back(row);
        }
    discriminate["samples"] = rows;

    json power;
    power["command"] = "power";
    power["master_seed"] = 2;
    power["model"] = "quantum";
    power["sigma_levels"] = std::vector<double>{0.1};
    power["repeats_per_a"] = 5;
    power["trials"] = 10;
    power["bootstrap_B"] = 100;

    json isotope;
    isotope["command"] = "isotope";
    isotope["master_seed"] = 6;
    isotope["a"] = 4;
    isotope["n"] = 100;
    isotope["tagged_fraction"] = 0.5;
    isotope["exchange_prob"] = 0.3;
    isotope["enzyme_weight"] = 0.5;
    isotope["replicates"] = 3;

    json threshold;
    threshold["command"] = "threshold";
    threshold["master_seed"] = 0;
    threshold["t_r"] = 1.0;
    threshold["t_d"] = 2.0;

    return {coefficients, classical, ideal, imperfect, discriminate, power, isotope, threshold};
}

}  // namespace

TEST_CASE("command execution payloads") {
    SECTION("coefficients rows mirror the library functions") {
        json config;
        config["command"] = "coefficients";
        config["a_min"] = 2;
        config["a_max"] = 10;
        const json payload = execute_command(config);
        REQUIRE(payload.at("rows").size() == 9);
        for (const auto& row : payload.at("rows")) {
            const int a = row.at("a").get<int>();
            REQUIRE(row.at("classical_coefficient").get<double>() == classical_coefficient(a));
            REQUIRE(row.at("grover_iterations").get<int>() == iterations_required(a));
        }
    }
    SECTION("threshold payload matches the library") {
        json config;
        config["command"] = "threshold";
        config["t_r"] = 1.0;
        config["t_d"] = 1.0;
        const json payload = execute_command(config);
        REQUIRE(payload.at("threshold").get<double>() == coherence_threshold(1.0, 1.0));
    }
    SECTION("quantum-ideal simulate is the two-band time law") {
        json config;
        config["command"] = "simulate";
        config["kind"] = "quantum-ideal";
        config["a"] = 6;
        config["n"] = 100;
        config["t_r"] = 1.0;
        const json payload = execute_command(config);
        REQUIRE(payload.at("total_time").get<double>() == 200.0);
        REQUIRE(payload.at("grover_iterations").get<int>() == 2);
        REQUIRE(payload.at("rate").get<double>() == 0.5);
    }
}

TEST_CASE("every command replays bit for bit") {
    for (const auto& config : sample_configs()) {
        INFO("command " << config.at("command").get<std::string>());
        const json record = run_command_with_record(config);
        REQUIRE(record.at("tool_version") == kToolVersion);
        REQUIRE(record.at("command") == config.at("command"));
        REQUIRE(record.at("config_echo") == config);
        REQUIRE(record.at("rng_algorithm").get<std::string>() == std::string(kRngAlgorithm));
        REQUIRE(record.at("master_seed") == config.value("master_seed", std::uint64_t{0}));
        REQUIRE(record.at("started").get<std::string>().size() == 20);
        REQUIRE(record.at("finished").get<std::string>().back() == 'Z');
        REQUIRE(replay_matches(record));
        REQUIRE(execute_command(config).dump() == record.at("results").dump());
    }
}

TEST_CASE("plot tables carry pinned headers") {
    const auto first_line = [](const std::string& text) {
        return text.substr(0, text.find('\n'));
    };
    for (const auto& config : sample_configs()) {
        const std::string command = config.at("command").get<std::string>();
        const json payload = execute_command(config);
        const std::string csv = payload_to_csv(command, payload);
        if (command == "coefficients")
            REQUIRE(first_line(csv) ==
                    "a,classical_coefficient,grover_iterations,quantum_coefficient");
        else if (command == "discriminate")
            REQUIRE(first_line(csv) ==
                    "chosen_model,statistic,p_value,fitted_scale_classical,fitted_scale_quantum,"
                    "bootstrap_B,seed");
        else if (command == "power")
            REQUIRE(first_line(csv) == "sigma_rel,fraction_correct");
        else if (command == "isotope")
            REQUIRE(first_line(csv) ==
                    "total_tagged_incorporations,separated_count,same_base,"
                    "other_base_in_strand,enzyme_pool,separation_fraction,seed");
        else if (command == "threshold")
            REQUIRE(first_line(csv) == "t_r,t_d,t_r_over_t_d,threshold");
        else if (command == "simulate") {
            const std::string kind = config.at("kind").get<std::string>();
            if (kind == "classical")
                REQUIRE(first_line(csv) ==
                        "kind,a,n,t_d,seed,replicates,total_time,attempts_per_base,"
                        "expected_total_time");
            else if (kind == "quantum-ideal")
                REQUIRE(first_line(csv) == "kind,a,n,t_r,grover_iterations,total_time,rate");
            else
                REQUIRE(first_line(csv) ==
                        "kind,a,n,t_r,p_coherence,quantum_mode,p_eff,seed,replicates,"
                        "total_time,attempts_per_base");
        }
        // Header plus at least one data row, newline terminated.
        REQUIRE(csv.back() == '\n');
        REQUIRE(csv.find('\n') < csv.size() - 1);
    }

    SECTION("isotope with no tagged incorporations leaves the fraction empty") {
        json payload;
        payload["total_tagged_incorporations"] = 0;
        payload["separated_count"] = 0;
        payload["destinations"] = json{{"same_base", 0}, {"other_base_in_strand", 0},
                                       {"enzyme_pool", 0}};
        payload["separation_fraction"] = nullptr;
        payload["seed"] = 1;
        const std::string csv = payload_to_csv("isotope", payload);
        REQUIRE(csv.find("0,0,0,0,0,,1") != std::string::npos);
    }
}

TEST_CASE("execution rejects malformed configurations") {
    json unknown;
    unknown["command"] = "frobnicate";
    REQUIRE_THROWS_AS(execute_command(unknown), std::invalid_argument);

    json missing;
    missing["command"] = "coefficients";
    REQUIRE_THROWS(execute_command(missing));  // a_min absent

    json bad_kind;
    bad_kind["command"] = "simulate";
    bad_kind["kind"] = "warp";
    bad_kind["a"] = 4;
    bad_kind["n"] = 10;
    REQUIRE_THROWS_AS(execute_command(bad_kind), std::invalid_argument);

    REQUIRE_THROWS_AS(parse_rate_law("semiclassical"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_quantum_mode("noisy"), std::invalid_argument);
    REQUIRE_THROWS_AS(payload_to_csv("frobnicate", json::object()), std::invalid_argument);
}

TEST_CASE("command line end to end") {
    SECTION("coefficients table") {
        const auto run = run_cli("coefficients 2 4");
        REQUIRE(run.exit_code == 0);
        REQUIRE(run.out.rfind("a,classical_coefficient,grover_iterations,quantum_coefficient\n",
                              0) == 0);
        REQUIRE(run.out.find("\n2,2.8853900817779268,1,") != std::string::npos);
        REQUIRE(run.out.find("\n3,2.7307176798805122,1,") != std::string::npos);
    }
    SECTION("threshold run record") {
        const auto run = run_cli("threshold --t-r 1 --t-d 1 --format json");
        REQUIRE(run.exit_code == 0);
        const json record = json::parse(run.out);
        REQUIRE(record.at("tool_version") == "1.0.0");
        REQUIRE(record.at("results").at("threshold").get<double>() ==
                Catch::Approx(0.2641604167868594).margin(1e-12));
        REQUIRE(replay_matches(record));
    }
    SECTION("seeded simulate is reproducible across invocations") {
        const std::string args =
            "simulate --kind classical --a 3 --n 40 --replicates 3 --seed 5 --format json";
        const auto first = run_cli(args);
        const auto again = run_cli(args);
        REQUIRE(first.exit_code == 0);
        const json record1 = json::parse(first.out);
        const json record2 = json::parse(again.out);
        REQUIRE(record1.at("results").dump() == record2.at("results").dump());
        REQUIRE(replay_matches(record1));
    }
    SECTION("--out writes the record to a file") {
        const auto out_path = temp_path("isotope.json");
        const auto run = run_cli("isotope --exchange-prob 0.3 --n 200 --seed 8 --out " +
                                 out_path.string());
        REQUIRE(run.exit_code == 0);
        REQUIRE(run.out.empty());
        const json record = json::parse(slurp(out_path));
        REQUIRE(record.at("command") == "isotope");
        REQUIRE(replay_matches(record));
        std::filesystem::remove(out_path);
    }
    SECTION("discriminate on a clean classical table") {
        const auto csv_path = temp_path("classical.csv");
        std::vector<RateSample> samples;
        for (int a = 1; a <= 4; ++a)
            for (int j = 0; j < 3; ++j) samples.push_back(RateSample{a, 1.0 / a, 0.05});
        write_rate_samples_csv_file(csv_path.string(), samples);
        const auto run =
            run_cli("discriminate " + csv_path.string() + " --bootstrap 200 --seed 4 --format csv");
        REQUIRE(run.exit_code == 0);
        REQUIRE(run.out.rfind("chosen_model,", 0) == 0);
        REQUIRE(run.out.find("\nclassical,") != std::string::npos);
        std::filesystem::remove(csv_path);
    }
    SECTION("validation failures exit with 2") {
        const auto dead = run_cli(
            "simulate --kind quantum-imperfect --a 4 --n 5 --replicates 2 --p-coherence 0");
        REQUIRE(dead.exit_code == 2);
        REQUIRE(dead.err.rfind("replisim: error: validation:", 0) == 0);

        const auto bad_flag = run_cli("coefficients 2 4 --bogus");
        REQUIRE(bad_flag.exit_code == 2);

        const auto bad_range = run_cli("coefficients 7 4");
        REQUIRE(bad_range.exit_code == 2);
    }
    SECTION("single-alphabet data is a validation failure, not a parse failure") {
        const auto csv_path = temp_path("single_a.csv");
        write_rate_samples_csv_file(csv_path.string(),
                                    {RateSample{2, 0.5, 0.1}, RateSample{2, 0.51, 0.1}});
        const auto run = run_cli("discriminate " + csv_path.string());
        REQUIRE(run.exit_code == 2);
        REQUIRE(run.err.rfind("replisim: error: validation:", 0) == 0);
        std::filesystem::remove(csv_path);
    }
    SECTION("parse failures exit with 3 and name the line") {
        const auto csv_path = temp_path("broken.csv");
        std::ofstream(csv_path) << "a,observed_rate,sigma_rel\n2,oops,0.1\n";
        const auto run = run_cli("discriminate " + csv_path.string());
        REQUIRE(run.exit_code == 3);
        REQUIRE(run.err.rfind("replisim: error: parse:", 0) == 0);
        REQUIRE(run.err.find("line 2") != std::string::npos);
        std::filesystem::remove(csv_path);

        const auto missing = run_cli("discriminate /nonexistent/readings.csv");
        REQUIRE(missing.exit_code == 3);
    }
    SECTION("help exits cleanly") {
        REQUIRE(run_cli("--help").exit_code == 0);
        REQUIRE(run_cli("simulate --help").exit_code == 0);
    }
}
