#include <doctest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "support/dir_locator.hpp"
#include "support/temp_dir.hpp"
#include "unicrawl/errors.hpp"
#include "unicrawl/index.hpp"
#include "unicrawl/mockcc.hpp"

using namespace unicrawl;
using testsupport::dir_locator;
using testsupport::temp_dir;

TEST_CASE("language_predicate semantics") {
    using v = std::vector<std::string>;
    CHECK(language_predicate(v{"amh"}, "amh", filter_mode::strict));
    CHECK_FALSE(language_predicate(v{"amh", "eng"}, "amh", filter_mode::strict));
    CHECK(language_predicate(v{"amh", "eng"}, "amh", filter_mode::lenient));
    CHECK_FALSE(language_predicate(v{"eng"}, "amh", filter_mode::lenient));
    CHECK_FALSE(language_predicate(v{"eng", "amh"}, "amh", filter_mode::lenient));
    CHECK_FALSE(language_predicate(v{}, "amh", filter_mode::strict));
    CHECK_FALSE(language_predicate(v{}, "amh", filter_mode::lenient));
}

TEST_CASE("strict implies lenient") {
    std::mt19937_64 rng(13);
    const char* codes[] = {"amh", "eng", "fra", "deu", "yor"};
    for (int round = 0; round < 2000; ++round) {
        std::vector<std::string> langs;
        std::uniform_int_distribution<int> n(0, 3);
        std::uniform_int_distribution<std::size_t> pick(0, std::size(codes) - 1);
        int count = n(rng);
        for (int i = 0; i < count; ++i) langs.emplace_back(codes[pick(rng)]);
        if (language_predicate(langs, "amh", filter_mode::strict)) {
            CHECK(language_predicate(langs, "amh", filter_mode::lenient));
        }
    }
}

TEST_CASE("estimate_filtered_size") {
    CHECK(estimate_filtered_size(0.000036, 250e9) == doctest::Approx(9.0e6).epsilon(1e-12));
    CHECK(estimate_filtered_size(0.0, 123456.0) == 0.0);
    CHECK(estimate_filtered_size(1.0, 250e9) == 250e9);
    CHECK_THROWS_AS(estimate_filtered_size(-0.1, 1), config_error);
    CHECK_THROWS_AS(estimate_filtered_size(1.1, 1), config_error);
}

TEST_CASE("parse_filter_mode") {
    CHECK(parse_filter_mode("strict") == filter_mode::strict);
    CHECK(parse_filter_mode("lenient") == filter_mode::lenient);
    CHECK_THROWS_AS(parse_filter_mode("fuzzy"), config_error);
}

namespace {

synth_archive make_fixture(const temp_dir& dir, int strict_pages = 15, int mixed_pages = 5) {
    synth_archive_config cfg;
    cfg.crawl_id = "CC-MAIN-2023-14";
    cfg.target_language = "amh";
    cfg.seed = 1234;
    cfg.target_pages = strict_pages;
    cfg.mixed_pages = mixed_pages;
    cfg.other_pages = 12;
    cfg.unannotated_pages = 3;
    cfg.index_shards = 3;
    return write_synth_archive(dir.str(), cfg);
}

} // namespace

TEST_CASE("list_index_shards returns every listed shard") {
    temp_dir dir;
    make_fixture(dir);
    dir_locator locator(dir.str());
    auto uris = list_index_shards("CC-MAIN-2023-14", locator);
    CHECK(uris.size() == 3);
    for (const auto& u : uris) {
        CHECK(u.ends_with(".parquet"));
        CHECK(std::filesystem::exists(u));
    }
    CHECK_THROWS_AS(list_index_shards("CC-MAIN-1999-01", locator), fatal_error);
    CHECK_THROWS_AS(list_index_shards("not-a-crawl", locator), config_error);
}

TEST_CASE("filter_archive_index matches a reference scan and sorts by locator") {
    temp_dir dir;
    synth_archive fixture = make_fixture(dir);
    dir_locator locator(dir.str());

    index_filter_options options;
    options.mode = filter_mode::strict;
    options.workers = 4;
    index_scan_stats scan;
    filtered_index got = filter_archive_index("CC-MAIN-2023-14", "amh", locator, options, &scan);

    CHECK(got.records == fixture.expected_strict);
    CHECK(scan.shards == 3);
    CHECK(scan.rows_scanned == fixture.all_rows.size());
    CHECK(scan.shard_bytes > 0);

    options.mode = filter_mode::lenient;
    filtered_index lenient =
        filter_archive_index("CC-MAIN-2023-14", "amh", locator, options);
    CHECK(lenient.records == fixture.expected_lenient);

    // strict output is a subset of lenient output
    for (const auto& rec : got.records) {
        CHECK(std::find(lenient.records.begin(), lenient.records.end(), rec) !=
              lenient.records.end());
    }

    // no row without language annotations survives
    for (const auto& rec : lenient.records) {
        CHECK(!rec.content_languages.empty());
    }
}

TEST_CASE("filter output is byte-deterministic across worker counts") {
    temp_dir dir;
    make_fixture(dir);
    dir_locator locator(dir.str());

    auto run = [&](int workers) {
        index_filter_options options;
        options.mode = filter_mode::lenient;
        options.workers = workers;
        filtered_index idx = filter_archive_index("CC-MAIN-2023-14", "amh", locator, options);
        temp_dir out;
        std::string path = out.sub("idx.jsonl");
        write_filtered_index(idx, path);
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    std::string one = run(1);
    CHECK(one == run(8));
    CHECK(!one.empty());
}

TEST_CASE("a failing shard aborts the archive") {
    temp_dir dir;
    make_fixture(dir);
    dir_locator locator(dir.str());
    locator.fail_shards_containing("part-00001");
    index_filter_options options;
    CHECK_THROWS_WITH_AS(
        filter_archive_index("CC-MAIN-2023-14", "amh", locator, options),
        doctest::Contains("partial index"), fatal_error);
}

TEST_CASE("invalid target language is rejected before any work") {
    temp_dir dir;
    dir_locator locator(dir.str());
    index_filter_options options;
    CHECK_THROWS_AS(filter_archive_index("CC-MAIN-2023-14", "Amharic", locator, options),
                    config_error);
}

TEST_CASE("filtered index serialization uses the exact key set") {
    temp_dir dir;
    filtered_index idx;
    idx.crawl_id = "CC-MAIN-2023-14";
    idx.target_language = "amh";
    index_record rec;
    rec.url = "https://example.org/x";
    rec.crawl_id = "CC-MAIN-2023-14";
    rec.content_languages = {"amh", "eng"};
    rec.warc_filename = "crawl-data/CC-MAIN-2023-14/segments/1/warc/a.warc.gz";
    rec.warc_record_offset = 12345;
    rec.warc_record_length = 678;
    idx.records.push_back(rec);

    for (bool gz : {false, true}) {
        std::string path = dir.sub(gz ? "i.jsonl.gz" : "i.jsonl");
        write_filtered_index(idx, path);
        filtered_index back = read_filtered_index(path);
        REQUIRE(back.records.size() == 1);
        CHECK(back.records[0] == rec);
    }

    std::ifstream in(dir.sub("i.jsonl"));
    std::string line;
    std::getline(in, line);
    auto j = nlohmann::json::parse(line);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    std::sort(keys.begin(), keys.end());
    CHECK(keys == std::vector<std::string>{"crawl", "filename", "languages", "length", "offset",
                                           "url"});
}

TEST_CASE("filtered_index_path pattern") {
    CHECK(filtered_index_path("out", "CC-MAIN-2023-14", "amh") ==
          "out/index/CC-MAIN-2023-14.amh.jsonl.gz");
    CHECK(filtered_index_path("out", "CC-MAIN-2023-14", "amh", false) ==
          "out/index/CC-MAIN-2023-14.amh.jsonl");
}

TEST_CASE("mixed-language fixture built at 3:1 lenient/strict ratio") {
    temp_dir dir;
    // 10 strict-only rows plus 20 mixed rows: lenient keeps 30, strict 10.
    synth_archive fixture = make_fixture(dir, 10, 20);
    CHECK(fixture.expected_strict.size() == 10);
    CHECK(fixture.expected_lenient.size() == 30);
    dir_locator locator(dir.str());
    index_filter_options options;
    options.mode = filter_mode::lenient;
    filtered_index lenient = filter_archive_index("CC-MAIN-2023-14", "amh", locator, options);
    options.mode = filter_mode::strict;
    filtered_index strict = filter_archive_index("CC-MAIN-2023-14", "amh", locator, options);
    CHECK(lenient.records.size() == 3 * strict.records.size());
}
