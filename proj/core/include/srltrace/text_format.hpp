#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srltrace::text {

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

std::optional<std::int64_t> parse_int64(std::string_view text);
std::optional<double> parse_double(std::string_view text);  // finite decimals only

// Splits on ',' without quote handling; identifiers in our CSVs never
// contain commas or quotes.
std::vector<std::string_view> split_csv_line(std::string_view line);

std::string_view strip_cr(std::string_view line);
bool is_blank(std::string_view line);

}  // namespace srltrace::text
