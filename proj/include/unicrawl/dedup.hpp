#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "unicrawl/document.hpp"

namespace unicrawl {

// 0xFF never occurs in valid UTF-8, so it cleanly separates documents in
// the concatenated buffer.
inline constexpr char corpus_separator = '\xFF';

struct doc_boundary {
    std::string doc_id;
    std::size_t begin = 0; // offset of first text byte
    std::size_t end = 0;   // one past last text byte
};

struct corpus {
    std::string buffer;
    std::vector<doc_boundary> boundaries;
};

// Half-open byte range in the corpus buffer marked for removal. Always
// lies inside a single document and on UTF-8 sequence boundaries.
struct duplicate_span {
    std::size_t begin = 0;
    std::size_t end = 0;
    friend bool operator==(const duplicate_span&, const duplicate_span&) = default;
};

corpus build_corpus(const std::vector<document>& docs);

// Suffix array via SA-IS: linear time, indices sorted by lexicographic
// order of the suffixes they start.
std::vector<std::uint32_t> build_suffix_array(std::string_view buffer);

// Marks every byte position that belongs to a non-first occurrence of any
// substring of length >= min_len occurring at two or more positions in the
// buffer. The lowest-offset occurrence of every duplicated substring is
// kept. Marked positions are merged into maximal runs, clipped to document
// boundaries, then snapped inward to UTF-8 boundaries.
std::vector<duplicate_span> find_duplicate_spans(const corpus& c,
                                                 const std::vector<std::uint32_t>& sa,
                                                 std::size_t min_len);

// Excises the spans from their documents, keeping the remaining pieces in
// order. Ids and char_len are recomputed for changed documents. `docs`
// must be the same sequence the corpus was built from.
std::vector<document> remove_spans(const corpus& c,
                                   const std::vector<duplicate_span>& spans,
                                   const std::vector<document>& docs);

std::vector<document> filter_short(std::vector<document> docs, std::size_t min_chars);

struct dedup_config {
    std::size_t min_len = 50;     // duplicate window threshold, UTF-8 bytes
    std::size_t min_chars = 100;  // short-document threshold, scalar values
    // Corpora above this byte budget are deduped in chunks against a
    // rolling reservoir; exact dedup is then guaranteed only within a
    // chunk pair.
    std::size_t corpus_budget_bytes = 256ull << 20;
};

struct dedup_stats {
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
    std::uint64_t docs_in = 0;
    std::uint64_t docs_out = 0;
    std::uint64_t spans = 0;
    std::uint64_t docs_dropped_short = 0;
};

struct dedup_result {
    std::vector<document> docs;
    dedup_stats stats;
};

// One pass of build_corpus -> build_suffix_array -> find_duplicate_spans
// -> remove_spans -> filter_short. Newly adjacent text created by excision
// is not re-deduped. span_sink, when set, observes every span batch before
// removal (the audit dump).
using span_sink = std::function<void(const corpus&, const std::vector<duplicate_span>&)>;
dedup_result dedup_stage(std::vector<document> docs, const dedup_config& cfg,
                         const span_sink& sink = {});

// Newline-delimited "<doc_id>\t<start>\t<end>" audit dump, offsets
// relative to each document's text.
std::string format_span_dump(const corpus& c, const std::vector<duplicate_span>& spans);

} // namespace unicrawl
