#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace unicrawl {

std::string sha256_hex(std::string_view data);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool iequals(std::string_view a, std::string_view b);

// Three lowercase ASCII letters, e.g. "amh". We validate the shape, not
// membership in the full ISO-639-3 registry.
bool is_iso639_3(std::string_view code);

// CC-MAIN-YYYY-WW
bool is_crawl_id(std::string_view id);

// Counts Unicode scalar values in well-formed UTF-8 (continuation bytes
// are not counted).
std::size_t utf8_length(std::string_view s);

// True if position i is on a UTF-8 sequence boundary of s (0 and size()
// are boundaries).
bool utf8_boundary(std::string_view s, std::size_t i);

// Re-encodes arbitrary bytes as valid UTF-8. Every byte that cannot start
// or continue a well-formed sequence becomes U+FFFD and increments
// *replacements.
std::string sanitize_utf8(std::string_view bytes, std::size_t* replacements = nullptr);

std::string latin1_to_utf8(std::string_view bytes);
std::string windows1252_to_utf8(std::string_view bytes);

// "2023-03-20T10:11:12Z" from seconds since epoch.
std::string format_utc(std::int64_t epoch_seconds);
std::int64_t now_epoch_seconds();

std::string join_url(std::string_view base, std::string_view relative);

} // namespace unicrawl
