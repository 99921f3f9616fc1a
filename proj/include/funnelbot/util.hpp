#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace funnelbot {

// ASCII-only lowercase fold. Forge logins are ASCII; anything else passes
// through unchanged.
std::string ascii_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

// Replaces every occurrence of `needle` in `haystack`.
std::string replace_all(std::string haystack, std::string_view needle,
                        std::string_view replacement);

// Standard base64 with padding.
std::string base64_encode(std::string_view data);
std::optional<std::string> base64_decode(std::string_view data);

// RFC 3339 timestamps at seconds precision, UTC only ("2021-03-02T10:07:00Z").
// This is the only shape forge payloads and timeline files carry.
std::string format_rfc3339(std::int64_t epoch_seconds);
std::int64_t parse_rfc3339(std::string_view text);  // throws std::invalid_argument

// Cuts `s` to at most `max_bytes` without splitting a UTF-8 sequence.
std::string utf8_truncate(std::string_view s, std::size_t max_bytes);

}  // namespace funnelbot
