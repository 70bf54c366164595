#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "support/temp_dir.hpp"
#include "unicrawl/errors.hpp"
#include "unicrawl/mockcc.hpp"
#include "unicrawl/pipeline.hpp"
#include "unicrawl/store.hpp"

using namespace unicrawl;
using testsupport::temp_dir;
namespace fs = std::filesystem;

namespace {

struct fixture_env {
    temp_dir fixtures;
    std::unique_ptr<mock_cc_server> server;
    std::string base;
    std::vector<std::string> crawls{"CC-MAIN-2023-14", "CC-MAIN-2023-23"};

    fixture_env() {
        for (std::size_t i = 0; i < crawls.size(); ++i) {
            synth_archive_config cfg;
            cfg.crawl_id = crawls[i];
            cfg.seed = 1000 + i * 77;
            cfg.target_pages = 14;
            cfg.mixed_pages = 4;
            cfg.other_pages = 8;
            cfg.unannotated_pages = 2;
            write_synth_archive(fixtures.str(), cfg);
        }
        server = std::make_unique<mock_cc_server>(fixtures.str());
        base = server->start();
    }

    pipeline_config config(const std::string& out_dir) const {
        pipeline_config cfg;
        cfg.target_language = "amh";
        cfg.crawl_ids = crawls;
        cfg.mode = filter_mode::strict;
        cfg.min_dup_len = 50;
        cfg.min_doc_chars = 100;
        cfg.workers = 4;
        cfg.rate_limit = 0;
        cfg.out_dir = out_dir;
        cfg.cc_base = base;
        cfg.retry.attempts = 2;
        cfg.retry.initial_backoff = std::chrono::milliseconds(1);
        cfg.user_agent = "unicrawl-test";
        return cfg;
    }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Byte-wise comparison of the final shard files of two runs.
void check_same_final(const std::string& a, const std::string& b) {
    manifest ma = read_manifest(a + "/final/manifest.json");
    manifest mb = read_manifest(b + "/final/manifest.json");
    CHECK(ma.content_digest() == mb.content_digest());
    REQUIRE(ma.shards.size() == mb.shards.size());
    for (std::size_t i = 0; i < ma.shards.size(); ++i) {
        CHECK(read_file(a + "/final/" + ma.shards[i].path) ==
              read_file(b + "/final/" + mb.shards[i].path));
    }
}

} // namespace

TEST_CASE("config validation rejects bad inputs before any network use") {
    pipeline_config cfg;
    cfg.target_language = "amharic"; // not ISO-639-3
    cfg.crawl_ids = {"CC-MAIN-2023-14"};
    cfg.cc_base = "http://example.invalid/";
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg.target_language = "amh";
    cfg.crawl_ids.clear();
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg.crawl_ids = {"CC-MAIN-2023-14"};
    cfg.min_dup_len = 1;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg.min_dup_len = 50;
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg.workers = 2;
    cfg.validate();
}

TEST_CASE("full pipeline over the mock endpoint" * doctest::timeout(120)) {
    fixture_env env;
    temp_dir out;
    pipeline_config cfg = env.config(out.str());

    int code = run_pipeline(cfg);
    CHECK(code == exit_ok);

    // Outputs exist.
    CHECK(fs::exists(out.sub("index/CC-MAIN-2023-14.amh.jsonl.gz")));
    CHECK(fs::exists(out.sub("extracted/CC-MAIN-2023-14/manifest.json")));
    CHECK(fs::exists(out.sub("deduped/CC-MAIN-2023-23/manifest.json")));
    CHECK(fs::exists(out.sub("final/manifest.json")));
    CHECK(fs::exists(out.sub("report.json")));
    CHECK(fs::exists(out.sub("report.txt")));

    manifest final_m = read_manifest(out.sub("final/manifest.json"));
    CHECK(final_m.stage == "final");
    CHECK(final_m.total_docs() > 0);
    CHECK(validate_manifest(out.sub("final/manifest.json")).empty());

    // Stats conservation along the stage chain.
    auto j = nlohmann::json::parse(read_file(out.sub("report.json")));
    for (const auto& archive : j["archives"]) {
        REQUIRE(archive["failed"] == false);
        auto stages = archive["stages"];
        REQUIRE(stages.size() == 3);
        CHECK(stages[0]["stage"] == "index");
        CHECK(stages[1]["stage"] == "fetch_extract");
        CHECK(stages[2]["stage"] == "dedup_archive");
        CHECK(stages[0]["doc_count_out"] == stages[1]["doc_count_in"]);
        CHECK(stages[1]["doc_count_out"] == stages[2]["doc_count_in"]);

        // Every fetched record lands in exactly one bucket.
        std::uint64_t fetched = stages[1]["doc_count_in"].get<std::uint64_t>() -
                                stages[1]["records_failed"].get<std::uint64_t>();
        std::uint64_t docs = stages[1]["doc_count_out"].get<std::uint64_t>();
        std::uint64_t skips = 0;
        for (const auto& [k, v] : archive["skip_counts"].items()) {
            if (k != "fetch_failed") skips += v.get<std::uint64_t>();
        }
        CHECK(docs + skips == fetched);
    }
    // Dedup removed the shared boilerplate.
    auto dedup_in = j["archives"][0]["stages"][2]["bytes_in"].get<std::uint64_t>();
    auto dedup_out = j["archives"][0]["stages"][2]["bytes_out"].get<std::uint64_t>();
    CHECK(dedup_out < dedup_in);
    CHECK(j["global_stages"][0]["stage"] == "cross_dedup");
    CHECK(j["comparisons"].size() > 0);
}

TEST_CASE("determinism: two fresh runs produce byte-identical final shards" *
          doctest::timeout(240)) {
    fixture_env env;
    temp_dir out1, out2;
    CHECK(run_pipeline(env.config(out1.str())) == exit_ok);
    CHECK(run_pipeline(env.config(out2.str())) == exit_ok);
    check_same_final(out1.str(), out2.str());
}

TEST_CASE("resume: interrupted run completes to identical bytes" * doctest::timeout(240)) {
    fixture_env env;
    temp_dir full, resumed;

    CHECK(run_pipeline(env.config(full.str())) == exit_ok);

    // "Interrupt" after archive 1: run only its per-archive stages.
    pipeline_config cfg = env.config(resumed.str());
    archive_report first = run_archive(cfg, env.crawls[0]);
    REQUIRE_FALSE(first.failed);
    CHECK(fs::exists(resumed.sub("checkpoints/CC-MAIN-2023-14.json")));
    CHECK_FALSE(fs::exists(resumed.sub("final/manifest.json")));

    // Rerun end to end; archive 1 must be checkpoint-skipped.
    CHECK(run_pipeline(cfg) == exit_ok);
    check_same_final(full.str(), resumed.str());

    // The skipped archive kept its original stats in the report.
    auto j = nlohmann::json::parse(read_file(resumed.sub("report.json")));
    CHECK(j["archives"][0]["stages"].size() == 3);
}

TEST_CASE("checkpoint deletion only causes recomputation" * doctest::timeout(240)) {
    fixture_env env;
    temp_dir out;
    pipeline_config cfg = env.config(out.str());
    CHECK(run_pipeline(cfg) == exit_ok);
    std::string digest = read_manifest(out.sub("final/manifest.json")).content_digest();

    fs::remove(out.sub("checkpoints/CC-MAIN-2023-14.json"));
    CHECK(run_pipeline(cfg) == exit_ok);
    CHECK(read_manifest(out.sub("final/manifest.json")).content_digest() == digest);
}

TEST_CASE("tampered intermediate is recomputed, not trusted" * doctest::timeout(240)) {
    fixture_env env;
    temp_dir out;
    pipeline_config cfg = env.config(out.str());
    CHECK(run_pipeline(cfg) == exit_ok);
    std::string digest = read_manifest(out.sub("final/manifest.json")).content_digest();

    // Corrupt an extracted shard; its checkpoint digest no longer matches.
    {
        std::fstream f(out.sub("extracted/CC-MAIN-2023-14/data-00000.jsonl.gz"),
                       std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(16);
        f.put('\x00');
    }
    CHECK(run_pipeline(cfg) == exit_ok);
    CHECK(read_manifest(out.sub("final/manifest.json")).content_digest() == digest);
}

TEST_CASE("unknown crawl yields a partial run and exit 3" * doctest::timeout(240)) {
    fixture_env env;
    temp_dir out;
    pipeline_config cfg = env.config(out.str());
    cfg.crawl_ids.push_back("CC-MAIN-2019-04"); // not on the mock server
    int code = run_pipeline(cfg);
    CHECK(code == exit_partial);

    auto j = nlohmann::json::parse(read_file(out.sub("report.json")));
    int failed = 0;
    for (const auto& a : j["archives"]) {
        if (a["failed"].get<bool>()) ++failed;
    }
    CHECK(failed == 1);
    // The healthy archives still produced a final dataset.
    CHECK(fs::exists(out.sub("final/manifest.json")));
}

TEST_CASE("all archives failing is fatal" * doctest::timeout(120)) {
    fixture_env env;
    temp_dir out;
    pipeline_config cfg = env.config(out.str());
    cfg.crawl_ids = {"CC-MAIN-2019-04"};
    CHECK(run_pipeline(cfg) == exit_fatal);
}

TEST_CASE("stage_rank ordering") {
    CHECK(stage_rank("") == 0);
    CHECK(stage_rank("index") < stage_rank("fetch_extract"));
    CHECK(stage_rank("fetch_extract") < stage_rank("dedup_archive"));
}
