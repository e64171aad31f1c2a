#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hotspot::csv {

// Splits one CSV record. Supports double-quoted fields with "" escapes; no
// embedded newlines.
std::vector<std::string> split(std::string_view line);

// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string quote(std::string_view field);

std::string join(const std::vector<std::string>& fields);

// Reads the next line, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

// FNV-1a 64-bit over a byte string, rendered as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex_digest(std::string_view bytes);

}  // namespace hotspot::csv
