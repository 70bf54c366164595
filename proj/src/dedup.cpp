#include "unicrawl/dedup.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <limits>
#include <stdexcept>

#include "unicrawl/util.hpp"

namespace unicrawl {

std::string document_id(std::string_view url, std::string_view text) {
    std::string keyed;
    keyed.reserve(url.size() + 1 + text.size());
    keyed.append(url);
    keyed.push_back('\0');
    keyed.append(text);
    return sha256_hex(keyed);
}

corpus build_corpus(const std::vector<document>& docs) {
    corpus c;
    std::size_t total = 0;
    for (const auto& d : docs) total += d.text.size() + 1;
    if (total > 0) c.buffer.reserve(total - 1);
    c.boundaries.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) c.buffer.push_back(corpus_separator);
        std::size_t begin = c.buffer.size();
        c.buffer.append(docs[i].text);
        c.boundaries.push_back({docs[i].id, begin, c.buffer.size()});
    }
    return c;
}

// ---------------------------------------------------------------------------
// SA-IS suffix array construction.
//
// Works on a copy of the input with all values shifted up by one and a
// unique smallest sentinel (0) appended, which keeps the induction logic
// free of end-of-string special cases. The recursion operates on int32
// alphabets; buffers above 2^31-1 bytes are rejected (the dedup stage
// chunks long corpora well below that).
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void sais_core(const T* s, std::int32_t n, std::int32_t sigma, std::int32_t* sa) {
    // s[n-1] is the unique smallest sentinel; n >= 1.
    if (n == 1) {
        sa[0] = 0;
        return;
    }

    std::vector<bool> is_s(n);
    is_s[n - 1] = true;
    for (std::int32_t i = n - 2; i >= 0; --i) {
        is_s[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && is_s[i + 1]);
    }
    auto is_lms = [&](std::int32_t i) {
        return i > 0 && is_s[i] && !is_s[i - 1];
    };

    std::vector<std::int32_t> bucket_count(sigma, 0);
    for (std::int32_t i = 0; i < n; ++i) bucket_count[s[i]]++;
    std::vector<std::int32_t> bucket_head(sigma), bucket_tail(sigma);
    auto reset_heads = [&] {
        std::int32_t sum = 0;
        for (std::int32_t v = 0; v < sigma; ++v) {
            bucket_head[v] = sum;
            sum += bucket_count[v];
        }
    };
    auto reset_tails = [&] {
        std::int32_t sum = 0;
        for (std::int32_t v = 0; v < sigma; ++v) {
            sum += bucket_count[v];
            bucket_tail[v] = sum - 1;
        }
    };

    auto induce = [&] {
        // L-type from bucket heads, left to right.
        reset_heads();
        for (std::int32_t i = 0; i < n; ++i) {
            std::int32_t j = sa[i] - 1;
            if (sa[i] > 0 && !is_s[j]) sa[bucket_head[s[j]]++] = j;
        }
        // S-type from bucket tails, right to left.
        reset_tails();
        for (std::int32_t i = n - 1; i >= 0; --i) {
            std::int32_t j = sa[i] - 1;
            if (sa[i] > 0 && is_s[j]) sa[bucket_tail[s[j]]--] = j;
        }
    };

    std::vector<std::int32_t> lms; // LMS positions in text order
    for (std::int32_t i = 1; i < n; ++i) {
        if (is_lms(i)) lms.push_back(i);
    }
    const std::int32_t m = static_cast<std::int32_t>(lms.size());

    // Round one: sort LMS substrings by placing them unsorted and inducing.
    std::fill(sa, sa + n, -1);
    reset_tails();
    for (std::int32_t i = m - 1; i >= 0; --i) {
        sa[bucket_tail[s[lms[i]]]--] = lms[i];
    }
    induce();

    // Name LMS substrings in their sorted order.
    auto lms_equal = [&](std::int32_t a, std::int32_t b) {
        for (std::int32_t k = 0;; ++k) {
            bool a_end = is_lms(a + k);
            bool b_end = is_lms(b + k);
            if (k > 0 && a_end && b_end) return true;
            if (a_end != b_end) return false;
            if (s[a + k] != s[b + k]) return false;
        }
    };
    // LMS positions are never adjacent, so p/2 indexes them uniquely.
    std::vector<std::int32_t> name_at(n / 2 + 1, -1);
    std::int32_t names = 0;
    std::int32_t prev = -1;
    for (std::int32_t i = 0; i < n; ++i) {
        std::int32_t p = sa[i];
        if (p <= 0 || !is_lms(p)) continue;
        if (prev >= 0 && !lms_equal(prev, p)) ++names;
        name_at[p / 2] = names;
        prev = p;
    }
    ++names; // count, not max index

    // Order the LMS suffixes, recursing when substring names collide.
    std::vector<std::int32_t> lms_order(m);
    if (names == m) {
        std::vector<std::int32_t> reduced(m);
        for (std::int32_t i = 0; i < m; ++i) reduced[i] = name_at[lms[i] / 2];
        for (std::int32_t i = 0; i < m; ++i) lms_order[reduced[i]] = i;
    } else {
        std::vector<std::int32_t> reduced(m);
        for (std::int32_t i = 0; i < m; ++i) reduced[i] = name_at[lms[i] / 2];
        // The sentinel's LMS substring is unique and smallest, so the
        // reduced string already ends in its own sentinel (name 0).
        sais_core(reduced.data(), m, names, lms_order.data());
    }

    // Round two: place LMS suffixes in sorted order and induce the rest.
    std::fill(sa, sa + n, -1);
    reset_tails();
    for (std::int32_t i = m - 1; i >= 0; --i) {
        std::int32_t p = lms[lms_order[i]];
        sa[bucket_tail[s[p]]--] = p;
    }
    induce();
}

} // namespace

std::vector<std::uint32_t> build_suffix_array(std::string_view buffer) {
    const std::size_t n = buffer.size();
    if (n == 0) return {};
    if (n > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()) - 2) {
        throw std::length_error("buffer too large for suffix array construction");
    }
    std::vector<std::uint16_t> padded(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        padded[i] = static_cast<std::uint16_t>(static_cast<unsigned char>(buffer[i]) + 1);
    }
    padded[n] = 0;
    std::vector<std::int32_t> sa(n + 1);
    sais_core(padded.data(), static_cast<std::int32_t>(n + 1), 257, sa.data());
    // Drop the sentinel suffix (always first).
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint32_t>(sa[i + 1]);
    return out;
}

namespace {

// Kasai LCP: lcp[i] = common prefix length of suffixes sa[i-1] and sa[i].
std::vector<std::uint32_t> build_lcp(std::string_view buf, const std::vector<std::uint32_t>& sa) {
    const std::size_t n = buf.size();
    std::vector<std::uint32_t> rank(n), lcp(n, 0);
    for (std::size_t i = 0; i < n; ++i) rank[sa[i]] = static_cast<std::uint32_t>(i);
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rank[i] == 0) {
            h = 0;
            continue;
        }
        std::size_t j = sa[rank[i] - 1];
        while (i + h < n && j + h < n && buf[i + h] == buf[j + h]) ++h;
        lcp[rank[i]] = static_cast<std::uint32_t>(h);
        if (h > 0) --h;
    }
    return lcp;
}

} // namespace

std::vector<duplicate_span> find_duplicate_spans(const corpus& c,
                                                 const std::vector<std::uint32_t>& sa,
                                                 std::size_t min_len) {
    const std::string_view buf = c.buffer;
    const std::size_t n = buf.size();
    if (min_len == 0) throw std::invalid_argument("min_len must be >= 1");
    if (n < min_len || sa.size() != n) return {};

    std::vector<std::uint32_t> lcp = build_lcp(buf, sa);

    // Equal windows of length min_len form maximal runs of consecutive
    // suffix-array entries whose adjacent lcp stays >= min_len. The
    // lowest-offset member of each run is the occurrence we keep; every
    // other member starts a covered window.
    std::vector<std::uint8_t> window_start((n + 7) / 8, 0);
    auto mark = [&](std::size_t p) { window_start[p >> 3] |= (1u << (p & 7)); };
    auto marked = [&](std::size_t p) { return (window_start[p >> 3] >> (p & 7)) & 1u; };

    std::size_t i = 1;
    while (i < n) {
        if (lcp[i] < min_len) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::uint32_t first = std::min(sa[i - 1], sa[i]);
        while (j < n && lcp[j] >= min_len) {
            first = std::min(first, sa[j]);
            ++j;
        }
        for (std::size_t k = i - 1; k < j; ++k) {
            if (sa[k] != first) mark(sa[k]);
        }
        i = j + 1;
    }

    // Sweep: position p is covered when some marked window start lies in
    // (p - min_len, p]. Emit maximal covered runs, clip them to document
    // boundaries, then snap inward to UTF-8 boundaries.
    std::vector<duplicate_span> spans;
    std::size_t doc = 0;
    auto emit = [&](std::size_t b, std::size_t e) {
        while (doc < c.boundaries.size() && c.boundaries[doc].end <= b) ++doc;
        for (std::size_t d = doc; d < c.boundaries.size() && c.boundaries[d].begin < e; ++d) {
            std::size_t sb = std::max(b, c.boundaries[d].begin);
            std::size_t se = std::min(e, c.boundaries[d].end);
            while (sb < se && !utf8_boundary(buf, sb)) ++sb;
            while (se > sb && !utf8_boundary(buf, se)) --se;
            if (sb < se) spans.push_back({sb, se});
        }
    };

    std::size_t active = 0;
    std::size_t run_begin = 0;
    bool in_run = false;
    for (std::size_t p = 0; p < n; ++p) {
        active += marked(p);
        if (p >= min_len) active -= marked(p - min_len);
        bool covered = active > 0;
        if (covered && !in_run) {
            run_begin = p;
            in_run = true;
        } else if (!covered && in_run) {
            emit(run_begin, p);
            in_run = false;
        }
    }
    if (in_run) emit(run_begin, n);
    return spans;
}

std::vector<document> remove_spans(const corpus& c,
                                   const std::vector<duplicate_span>& spans,
                                   const std::vector<document>& docs) {
    if (docs.size() != c.boundaries.size()) {
        throw std::invalid_argument("document count does not match corpus boundaries");
    }
    std::vector<document> out;
    out.reserve(docs.size());
    std::size_t si = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const auto& bound = c.boundaries[d];
        std::string text;
        std::size_t cursor = bound.begin;
        bool changed = false;
        while (si < spans.size() && spans[si].begin < bound.end) {
            assert(spans[si].begin >= bound.begin && spans[si].end <= bound.end);
            text.append(c.buffer, cursor, spans[si].begin - cursor);
            cursor = spans[si].end;
            changed = true;
            ++si;
        }
        text.append(c.buffer, cursor, bound.end - cursor);
        document doc = docs[d];
        if (changed) {
            doc.text = std::move(text);
            doc.char_len = utf8_length(doc.text);
            doc.id = document_id(doc.url, doc.text);
        }
        out.push_back(std::move(doc));
    }
    return out;
}

std::vector<document> filter_short(std::vector<document> docs, std::size_t min_chars) {
    std::erase_if(docs, [&](const document& d) { return d.char_len < min_chars; });
    return docs;
}

namespace {

dedup_result dedup_single(std::vector<document> docs, const dedup_config& cfg,
                          std::size_t context_docs, const span_sink& sink) {
    // The first context_docs documents only anchor keep-first decisions;
    // they are not re-emitted.
    dedup_result r;
    corpus c = build_corpus(docs);
    auto sa = build_suffix_array(c.buffer);
    auto spans = find_duplicate_spans(c, sa, cfg.min_len);
    std::size_t context_end = context_docs == 0 ? 0 : c.boundaries[context_docs - 1].end;
    std::erase_if(spans, [&](const duplicate_span& s) { return s.begin < context_end; });
    if (sink) sink(c, spans);
    r.stats.spans = spans.size();
    auto removed = remove_spans(c, spans, docs);
    removed.erase(removed.begin(), removed.begin() + static_cast<std::ptrdiff_t>(context_docs));
    std::size_t before_filter = removed.size();
    r.docs = filter_short(std::move(removed), cfg.min_chars);
    r.stats.docs_dropped_short = before_filter - r.docs.size();
    return r;
}

} // namespace

dedup_result dedup_stage(std::vector<document> docs, const dedup_config& cfg,
                         const span_sink& sink) {
    dedup_result result;
    result.stats.docs_in = docs.size();
    for (const auto& d : docs) result.stats.bytes_in += d.text.size();

    std::size_t total = result.stats.bytes_in + (docs.empty() ? 0 : docs.size() - 1);
    if (total <= cfg.corpus_budget_bytes) {
        dedup_result pass = dedup_single(std::move(docs), cfg, 0, sink);
        result.docs = std::move(pass.docs);
        result.stats.spans = pass.stats.spans;
        result.stats.docs_dropped_short = pass.stats.docs_dropped_short;
    } else {
        // Chunked mode: each chunk is deduped against itself and a rolling
        // reservoir of recently surviving text. Exact dedup holds within a
        // chunk pair only.
        const std::size_t chunk_budget = std::max<std::size_t>(cfg.corpus_budget_bytes / 2, 1);
        std::deque<document> reservoir;
        std::size_t reservoir_bytes = 0;
        std::size_t pos = 0;
        while (pos < docs.size()) {
            std::vector<document> batch(reservoir.begin(), reservoir.end());
            std::size_t context = batch.size();
            std::size_t chunk_bytes = 0;
            while (pos < docs.size() &&
                   (chunk_bytes == 0 || chunk_bytes + docs[pos].text.size() <= chunk_budget)) {
                chunk_bytes += docs[pos].text.size();
                batch.push_back(std::move(docs[pos]));
                ++pos;
            }
            dedup_result pass = dedup_single(std::move(batch), cfg, context, sink);
            result.stats.spans += pass.stats.spans;
            result.stats.docs_dropped_short += pass.stats.docs_dropped_short;
            for (auto& d : pass.docs) {
                reservoir_bytes += d.text.size();
                reservoir.push_back(d);
                result.docs.push_back(std::move(d));
            }
            while (reservoir_bytes > chunk_budget && !reservoir.empty()) {
                reservoir_bytes -= reservoir.front().text.size();
                reservoir.pop_front();
            }
        }
    }

    result.stats.docs_out = result.docs.size();
    for (const auto& d : result.docs) result.stats.bytes_out += d.text.size();
    return result;
}

std::string format_span_dump(const corpus& c, const std::vector<duplicate_span>& spans) {
    std::string out;
    std::size_t doc = 0;
    for (const auto& s : spans) {
        while (doc < c.boundaries.size() && c.boundaries[doc].end <= s.begin) ++doc;
        const auto& b = c.boundaries[doc];
        out += b.doc_id;
        out += '\t';
        out += std::to_string(s.begin - b.begin);
        out += '\t';
        out += std::to_string(s.end - b.begin);
        out += '\n';
    }
    return out;
}

} // namespace unicrawl
