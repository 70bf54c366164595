#pragma once

#include <cstdint>
#include <string>

namespace unicrawl {

// One extracted page of plain text with provenance.
struct document {
    std::string id;         // sha256 over url + text, stable across runs
    std::string url;
    std::string crawl_id;
    std::string record_date; // "YYYY-MM-DDTHH:MM:SSZ"
    std::string text;        // valid UTF-8, no markup
    std::size_t char_len = 0; // Unicode scalar count of text
};

// Digest used for document ids; recomputed whenever text changes.
std::string document_id(std::string_view url, std::string_view text);

} // namespace unicrawl
