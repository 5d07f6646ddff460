#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mtme::csv {

/// Marker written for undefined values (e.g. the mean of an empty archive).
inline constexpr std::string_view kUndefined = "NA";

/// Shortest-safe decimal with 17 significant digits; parses back bit-exactly.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

double parse_double(std::string_view s);
std::optional<double> parse_optional(std::string_view s);
std::uint64_t parse_uint(std::string_view s);

std::vector<std::string> split_line(std::string_view line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in the header; throws std::runtime_error if absent.
    std::size_t column(std::string_view name) const;
};

/// Reads a header + rows file. Throws std::runtime_error on I/O errors or
/// rows whose width differs from the header.
Table read_table(const std::filesystem::path& path);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace mtme::csv
