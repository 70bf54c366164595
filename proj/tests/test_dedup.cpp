#include <doctest.h>

#include <random>

#include "support/dup_oracle.hpp"
#include "unicrawl/dedup.hpp"
#include "unicrawl/util.hpp"

using namespace unicrawl;
using testsupport::brute_suffix_array;
using testsupport::oracle_duplicate_spans;

namespace {

document make_doc(std::size_t i, std::string text) {
    document d;
    d.url = "https://example.org/" + std::to_string(i);
    d.crawl_id = "CC-MAIN-2023-14";
    d.record_date = "2023-03-20T01:02:03Z";
    d.text = std::move(text);
    d.char_len = utf8_length(d.text);
    d.id = document_id(d.url, d.text);
    return d;
}

std::vector<document> make_docs(const std::vector<std::string>& texts) {
    std::vector<document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back(make_doc(i, texts[i]));
    return docs;
}

std::string random_text(std::mt19937_64& rng, std::size_t len, int alphabet) {
    std::uniform_int_distribution<int> dist(0, alphabet - 1);
    std::string s;
    s.reserve(len);
    for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>('a' + dist(rng)));
    return s;
}

std::vector<duplicate_span> spans_for(const std::vector<std::string>& texts,
                                      std::size_t min_len) {
    auto docs = make_docs(texts);
    corpus c = build_corpus(docs);
    auto sa = build_suffix_array(c.buffer);
    return find_duplicate_spans(c, sa, min_len);
}

} // namespace

TEST_CASE("suffix array: fixed examples") {
    // Expected values frozen from the brute-force sort.
    CHECK(build_suffix_array("banana") == std::vector<std::uint32_t>{5, 3, 1, 0, 4, 2});
    CHECK(build_suffix_array("aaaa") == std::vector<std::uint32_t>{3, 2, 1, 0});
    CHECK(build_suffix_array("x") == std::vector<std::uint32_t>{0});
    CHECK(build_suffix_array("").empty());
    CHECK(build_suffix_array("banana") == brute_suffix_array("banana"));
    CHECK(build_suffix_array("aaaa") == brute_suffix_array("aaaa"));
    CHECK(build_suffix_array("mississippi") == brute_suffix_array("mississippi"));
}

TEST_CASE("suffix array: random buffers match brute force") {
    std::mt19937_64 rng(7);
    for (int alphabet : {1, 2, 4, 26}) {
        for (int round = 0; round < 50; ++round) {
            std::uniform_int_distribution<std::size_t> len(1, 300);
            std::string s = random_text(rng, len(rng), alphabet);
            auto got = build_suffix_array(s);
            auto want = brute_suffix_array(s);
            REQUIRE_MESSAGE(got == want, "alphabet=", alphabet, " input=", s);
        }
    }
}

TEST_CASE("suffix array: high bytes (separator range) sort after ASCII") {
    std::string s = "ab\xFF" "ab";
    auto got = build_suffix_array(s);
    CHECK(got == brute_suffix_array(s));
}

TEST_CASE("build_corpus layout") {
    auto docs = make_docs({"ab", "cd"});
    corpus c = build_corpus(docs);
    CHECK(c.buffer == std::string("ab\xFF" "cd"));
    REQUIRE(c.boundaries.size() == 2);
    CHECK(c.boundaries[0].begin == 0);
    CHECK(c.boundaries[0].end == 2);
    CHECK(c.boundaries[1].begin == 3);
    CHECK(c.boundaries[1].end == 5);

    corpus empty = build_corpus({});
    CHECK(empty.buffer.empty());
    CHECK(empty.boundaries.empty());
}

TEST_CASE("build_corpus round trips documents") {
    std::mt19937_64 rng(11);
    std::vector<std::string> texts;
    for (int i = 0; i < 1000; ++i) {
        std::uniform_int_distribution<std::size_t> len(0, 40);
        texts.push_back(random_text(rng, len(rng), 26));
    }
    auto docs = make_docs(texts);
    corpus c = build_corpus(docs);
    REQUIRE(c.boundaries.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& b = c.boundaries[i];
        CHECK(c.buffer.substr(b.begin, b.end - b.begin) == texts[i]);
    }
}

TEST_CASE("find_duplicate_spans: single doc abcabc") {
    auto spans = spans_for({"abcabc"}, 3);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0] == duplicate_span{3, 6});
}

TEST_CASE("find_duplicate_spans: no duplicated window") {
    CHECK(spans_for({"abcdefgh"}, 3).empty());
    CHECK(spans_for({"abcdefgh", "ijklmnop"}, 3).empty());
}

TEST_CASE("find_duplicate_spans: identical documents") {
    std::mt19937_64 rng(3);
    std::string text = random_text(rng, 200, 26);
    auto docs = make_docs({text, text});
    corpus c = build_corpus(docs);
    auto sa = build_suffix_array(c.buffer);
    auto spans = find_duplicate_spans(c, sa, 50);
    REQUIRE(spans.size() == 1);
    // The entire second document is covered; the first is untouched.
    CHECK(spans[0].begin == c.boundaries[1].begin);
    CHECK(spans[0].end == c.boundaries[1].end);
}

TEST_CASE("spans never cross the separator or document bounds") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 30; ++round) {
        std::vector<std::string> texts;
        std::uniform_int_distribution<std::size_t> len(0, 60);
        for (int d = 0; d < 6; ++d) texts.push_back(random_text(rng, len(rng), 3));
        auto docs = make_docs(texts);
        corpus c = build_corpus(docs);
        auto sa = build_suffix_array(c.buffer);
        for (std::size_t min_len : {2u, 3u, 5u}) {
            auto spans = find_duplicate_spans(c, sa, min_len);
            for (const auto& s : spans) {
                bool inside = false;
                for (const auto& b : c.boundaries) {
                    if (s.begin >= b.begin && s.end <= b.end) inside = true;
                }
                REQUIRE(inside);
                for (std::size_t p = s.begin; p < s.end; ++p) {
                    REQUIRE(c.buffer[p] != corpus_separator);
                }
            }
        }
    }
}

TEST_CASE("oracle equivalence on random corpora") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 100; ++round) {
        std::uniform_int_distribution<int> alpha_dist(2, 26);
        std::uniform_int_distribution<int> docs_dist(1, 8);
        int alphabet = alpha_dist(rng);
        std::vector<std::string> texts;
        int ndocs = docs_dist(rng);
        std::uniform_int_distribution<std::size_t> len(0, 500);
        for (int d = 0; d < ndocs; ++d) texts.push_back(random_text(rng, len(rng), alphabet));
        for (std::size_t min_len : {2u, 3u, 5u, 8u}) {
            auto got = spans_for(texts, min_len);
            auto want = oracle_duplicate_spans(texts, min_len);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                REQUIRE(got[i].begin == want[i].begin);
                REQUIRE(got[i].end == want[i].end);
            }
        }
    }
}

TEST_CASE("keep-first: lowest-offset occurrence survives") {
    std::mt19937_64 rng(23);
    std::string planted = random_text(rng, 80, 26);
    std::string filler1 = random_text(rng, 120, 26);
    std::string filler2 = random_text(rng, 120, 26);
    std::vector<std::string> texts = {
        filler1 + planted,          // first occurrence: must survive
        planted + filler2,          // later occurrence: excised
        random_text(rng, 90, 26) + planted, // later again
    };
    auto docs = make_docs(texts);
    corpus c = build_corpus(docs);
    auto sa = build_suffix_array(c.buffer);
    auto spans = find_duplicate_spans(c, sa, 50);
    auto out = remove_spans(c, spans, docs);
    CHECK(out[0].text == texts[0]);
    CHECK(out[1].text == filler2);
    CHECK(out[2].text.find(planted) == std::string::npos);
}

TEST_CASE("remove_spans examples") {
    auto docs = make_docs({"abcabc"});
    corpus c = build_corpus(docs);
    auto out = remove_spans(c, {{3, 6}}, docs);
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "abc");
    CHECK(out[0].char_len == 3);
    CHECK(out[0].id == document_id(out[0].url, "abc"));

    // No spans: byte-identical documents.
    auto same = remove_spans(c, {}, docs);
    CHECK(same[0].text == "abcabc");
    CHECK(same[0].id == docs[0].id);

    // A span covering a whole doc leaves an empty-text document.
    auto gone = remove_spans(c, {{0, 6}}, docs);
    CHECK(gone[0].text.empty());
    CHECK(gone[0].char_len == 0);
}

TEST_CASE("filter_short boundary") {
    std::string s99(99, 'x');
    std::string s100(100, 'x');
    auto out = filter_short(make_docs({s99, s100}), 100);
    REQUIRE(out.size() == 1);
    CHECK(out[0].char_len == 100);

    CHECK(filter_short(make_docs({s99, s100}), 0).size() == 2);
}

TEST_CASE("filter_short counts characters, not bytes") {
    // 99 Ethiopic scalars = 297 bytes; still shorter than 100 chars.
    std::string ethiopic;
    for (int i = 0; i < 99; ++i) ethiopic += "ሀ";
    CHECK(ethiopic.size() == 297);
    CHECK(filter_short(make_docs({ethiopic}), 100).empty());
    ethiopic += "ሀ";
    CHECK(filter_short(make_docs({ethiopic}), 100).size() == 1);
}

TEST_CASE("utf8 snapping never splits a scalar") {
    // Two docs sharing one long non-self-repetitive Ethiopic block; the
    // block must survive in the first doc and vanish from the second, and
    // every output must stay valid UTF-8.
    const char* syllables[] = {"ሀ", "ለ", "ሐ", "መ", "ሠ", "ረ", "ሰ", "ሸ", "ቀ", "በ",
                               "ተ", "ቸ", "ኀ", "ነ", "ኘ", "አ", "ከ", "ኸ", "ወ", "ዐ",
                               "ዘ", "ዠ", "የ", "ደ", "ጀ", "ገ", "ጠ", "ጨ", "ጰ", "ጸ"};
    std::mt19937_64 srng(97);
    auto ethiopic_text = [&](int chars) {
        std::uniform_int_distribution<std::size_t> pick(0, std::size(syllables) - 1);
        std::string s;
        for (int i = 0; i < chars; ++i) s += syllables[pick(srng)];
        return s;
    };
    std::string shared = ethiopic_text(60); // 180 bytes
    std::string a = ethiopic_text(30) + shared;
    std::string b = shared + ethiopic_text(30);
    auto docs = make_docs({a, b});
    corpus c = build_corpus(docs);
    auto sa = build_suffix_array(c.buffer);
    auto spans = find_duplicate_spans(c, sa, 50);
    CHECK(!spans.empty());
    auto out = remove_spans(c, spans, docs);
    for (const auto& d : out) {
        std::size_t replaced = 0;
        std::string sanitized = sanitize_utf8(d.text, &replaced);
        CHECK(replaced == 0);
        CHECK(sanitized == d.text);
    }
    CHECK(out[0].text == a);
}

TEST_CASE("dedup_stage: unique corpus passes through") {
    std::mt19937_64 rng(31);
    std::vector<std::string> texts;
    for (int i = 0; i < 10; ++i) texts.push_back(random_text(rng, 300, 26));
    auto docs = make_docs(texts);
    dedup_config cfg;
    cfg.min_len = 50;
    cfg.min_chars = 100;
    auto result = dedup_stage(docs, cfg);
    REQUIRE(result.docs.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(result.docs[i].text == docs[i].text);
    }
    CHECK(result.stats.bytes_in == result.stats.bytes_out);
    CHECK(result.stats.spans == 0);
}

TEST_CASE("dedup_stage: threshold is exact in bytes") {
    std::mt19937_64 rng(37);
    std::string pad1 = random_text(rng, 150, 26);
    std::string pad2 = random_text(rng, 150, 26);
    std::string dup49 = random_text(rng, 49, 26);
    std::string dup50 = random_text(rng, 50, 26);

    dedup_config cfg;
    cfg.min_len = 50;
    cfg.min_chars = 0;

    auto kept = dedup_stage(make_docs({pad1 + dup49, dup49 + pad2}), cfg);
    CHECK(kept.docs[1].text == dup49 + pad2); // 49-byte repeat survives

    auto removed = dedup_stage(make_docs({pad1 + dup50, dup50 + pad2}), cfg);
    CHECK(removed.docs[1].text == pad2); // 50-byte repeat excised
}

TEST_CASE("dedup_stage: chunked mode collapses repeated documents") {
    // Exact dedup is only guaranteed within a chunk pair, which covers
    // the common case of duplicates close to each other: twenty copies of
    // one document collapse to the first.
    std::mt19937_64 rng(41);
    std::string text = random_text(rng, 600, 26);
    std::vector<std::string> texts(20, text);
    auto docs = make_docs(texts);
    dedup_config cfg;
    cfg.min_len = 50;
    cfg.min_chars = 1;
    cfg.corpus_budget_bytes = 2048; // force many chunks
    auto result = dedup_stage(docs, cfg);
    REQUIRE(result.docs.size() == 1);
    CHECK(result.docs[0].text == text);
}

TEST_CASE("dedup_stage: adjacent cross-chunk duplicates are removed") {
    std::mt19937_64 rng(43);
    std::string shared = random_text(rng, 200, 26);
    std::vector<std::string> texts;
    for (int i = 0; i < 8; ++i) {
        // Every doc repeats the previous doc's tail, so the duplicate is
        // always within reach of the rolling reservoir.
        texts.push_back(random_text(rng, 300, 26) + shared);
    }
    auto docs = make_docs(texts);
    dedup_config cfg;
    cfg.min_len = 50;
    cfg.min_chars = 1;
    cfg.corpus_budget_bytes = 4096; // chunk budget 2048: two docs + reservoir
    auto result = dedup_stage(docs, cfg);
    REQUIRE(result.docs.size() == 8);
    CHECK(result.docs[0].text.find(shared) != std::string::npos);
    // The copy adjacent to a surviving occurrence is always excised.
    CHECK(result.docs[1].text.find(shared) == std::string::npos);
}

TEST_CASE("span dump format") {
    auto docs = make_docs({"abcabc"});
    corpus c = build_corpus(docs);
    auto sa = build_suffix_array(c.buffer);
    auto spans = find_duplicate_spans(c, sa, 3);
    std::string dump = format_span_dump(c, spans);
    CHECK(dump == docs[0].id + "\t3\t6\n");
}
