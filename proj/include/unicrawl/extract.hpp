#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unicrawl/document.hpp"
#include "unicrawl/warc.hpp"

namespace unicrawl {

// A run of visible text between block-level tag boundaries, the unit the
// boilerplate heuristics classify.
struct text_block {
    std::string text;
    std::string tag_path;     // enclosing structural tags, e.g. "body/div/p"
    double link_density = 0;  // anchored scalar values / total scalar values
    std::size_t char_count = 0;
};

struct extract_config {
    std::size_t min_block_chars = 25;
    double max_link_density = 0.33;
};

// Tag-soup tolerant: never throws on malformed input. Script, style,
// noscript, template and comment content is discarded, as is everything
// under nav/header/footer/aside. Entities are decoded and whitespace runs
// collapse to single spaces.
std::vector<text_block> html_to_blocks(const html_page& page);
std::vector<text_block> html_to_blocks(std::string_view html);

// Keeps blocks that are long enough and not link-dominated, joined with
// single newlines in document order. Returns nothing when no block
// survives.
std::optional<document> extract_main_text(const html_page& page, const extract_config& cfg = {});

} // namespace unicrawl
