#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "replisim/discrimination.hpp"

namespace replisim {

struct CsvParseError : std::runtime_error {
    std::size_t line;
    CsvParseError(std::size_t line_number, const std::string& what_happened)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + what_happened),
          line(line_number) {}
};

// 17 significant digits: enough for any double to survive a text round trip.
inline std::string format_double(double value) {
    char buffer[64];
    const auto result =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

inline constexpr const char* kRateSampleCsvHeader = "a,observed_rate,sigma_rel";

inline void write_rate_samples_csv(std::ostream& out, const std::vector<RateSample>& samples) {
    out << kRateSampleCsvHeader << '\n';
    for (const auto& s : samples)
        out << s.a << ',' << format_double(s.observed_rate) << ',' << format_double(s.sigma_rel)
            << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_double_field(const std::string& field, std::size_t line,
                                 const char* column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw CsvParseError(line, std::string("cannot parse ") + column + " from '" + field + "'");
    return value;
}

inline int parse_int_field(const std::string& field, std::size_t line, const char* column) {
    int value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw CsvParseError(line, std::string("cannot parse ") + column + " from '" + field + "'");
    return value;
}

}  // namespace detail

inline std::vector<RateSample> read_rate_samples_csv(std::istream& in) {
    std::string line;
    std::size_t line_number = 0;

    if (!std::getline(in, line)) throw CsvParseError(1, "empty input, expected header");
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRateSampleCsvHeader)
        throw CsvParseError(1, std::string("header must be exactly '") + kRateSampleCsvHeader + "'");

    std::vector<RateSample> samples;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // tolerate a blank trailing line
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 3)
            throw CsvParseError(line_number,
                                "expected 3 fields, got " + std::to_string(fields.size()));
        RateSample sample;
        sample.a = detail::parse_int_field(fields[0], line_number, "a");
        sample.observed_rate = detail::parse_double_field(fields[1], line_number, "observed_rate");
        sample.sigma_rel = detail::parse_double_field(fields[2], line_number, "sigma_rel");
        if (sample.a < 1 || sample.a > 4)
            throw CsvParseError(line_number, "a must lie in [1, 4]");
        if (!(sample.observed_rate > 0.0))
            throw CsvParseError(line_number, "observed_rate must be positive");
        if (!(sample.sigma_rel > 0.0))
            throw CsvParseError(line_number, "sigma_rel must be positive");
        samples.push_back(sample);
    }
    return samples;
}

inline std::vector<RateSample> read_rate_samples_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError(0, "cannot open '" + path + "'");
    return read_rate_samples_csv(in);
}

inline void write_rate_samples_csv_file(const std::string& path,
                                        const std::vector<RateSample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_rate_samples_csv(out, samples);
}

}  // namespace replisim
