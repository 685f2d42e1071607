#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eventbn {

// Minimal RFC 4180-style CSV handling: quoted fields may contain commas,
// doubled quotes and (when pre-joined) newlines.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);
std::string join_csv(const std::vector<std::string>& fields);

// ISO-8601 timestamps, seconds resolution. Accepts "YYYY-MM-DD HH:MM:SS"
// or "YYYY-MM-DDTHH:MM:SS", optionally followed by "Z" or a "+HH:MM" /
// "-HH:MM" / "+HHMM" offset. Offset-less inputs are taken as UTC.
std::optional<std::int64_t> parse_timestamp_utc(std::string_view text);
std::string format_timestamp_utc(std::int64_t unix_seconds);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace eventbn
