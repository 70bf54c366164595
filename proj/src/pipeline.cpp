#include "unicrawl/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "unicrawl/errors.hpp"
#include "unicrawl/fetch.hpp"
#include "unicrawl/gzip.hpp"
#include "unicrawl/store.hpp"
#include "unicrawl/util.hpp"
#include "unicrawl/version.hpp"
#include "unicrawl/warc.hpp"

namespace unicrawl {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string default_cc_base() {
    if (const char* env = std::getenv("UNICRAWL_CC_BASE"); env && *env) {
        return env;
    }
    return "https://data.commoncrawl.org/";
}

void pipeline_config::validate() const {
    if (!is_iso639_3(target_language)) {
        throw config_error("target language must be a three-letter ISO-639-3 code, got '" +
                           target_language + "'");
    }
    if (crawl_ids.empty()) {
        throw config_error("at least one crawl id is required");
    }
    for (const auto& id : crawl_ids) {
        if (!is_crawl_id(id)) {
            throw config_error("crawl id must match CC-MAIN-YYYY-WW, got '" + id + "'");
        }
    }
    if (min_dup_len < 2) {
        throw config_error("min-dup-len must be >= 2 bytes");
    }
    if (workers < 1) {
        throw config_error("workers must be >= 1");
    }
    if (rate_limit < 0) {
        throw config_error("rate-limit must be >= 0 (0 disables limiting)");
    }
    if (out_dir.empty()) {
        throw config_error("out dir must not be empty");
    }
    if (cc_base.empty()) {
        throw config_error("cc-base must not be empty");
    }
    if (extract.max_link_density < 0.0 || extract.max_link_density > 1.0) {
        throw config_error("max link density must be within [0, 1]");
    }
}

// ---------------------------------------------------------------------------
// Stage names, paths, checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kStageIndex = "index";
constexpr const char* kStageFetchExtract = "fetch_extract";
constexpr const char* kStageDedupArchive = "dedup_archive";

std::string extracted_dir(const pipeline_config& cfg, const std::string& crawl) {
    return cfg.out_dir + "/extracted/" + crawl;
}
std::string deduped_dir(const pipeline_config& cfg, const std::string& crawl) {
    return cfg.out_dir + "/deduped/" + crawl;
}
std::string final_dir(const pipeline_config& cfg) { return cfg.out_dir + "/final"; }
std::string checkpoint_path(const pipeline_config& cfg, const std::string& crawl) {
    return cfg.out_dir + "/checkpoints/" + crawl + ".json";
}
std::string failures_path(const pipeline_config& cfg, const std::string& crawl) {
    return cfg.out_dir + "/failures/" + crawl + ".jsonl";
}

// Configuration inputs a stage's cached output depends on; a change
// invalidates the checkpoint for that stage and everything after it.
std::string stage_fingerprint(const pipeline_config& cfg, std::string_view stage) {
    std::string key = std::string(stage) + "|" + cfg.target_language + "|" +
                      std::string(filter_mode_name(cfg.mode)) + "|" + cfg.cc_base;
    if (stage != kStageIndex) {
        key += "|" + std::to_string(cfg.extract.min_block_chars) + "|" +
               std::to_string(cfg.extract.max_link_density);
    }
    if (stage == kStageDedupArchive) {
        key += "|" + std::to_string(cfg.min_dup_len) + "|" + std::to_string(cfg.min_doc_chars) +
               "|" + std::to_string(cfg.dedup_budget_bytes);
    }
    return sha256_hex(key);
}

std::string file_sha256(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

// Digest of a stage's persisted output, empty when the output is absent
// or unreadable.
std::string compute_stage_digest(const pipeline_config& cfg, const std::string& crawl,
                                 std::string_view stage) {
    try {
        if (stage == kStageIndex) {
            std::string path = filtered_index_path(cfg.out_dir, crawl, cfg.target_language);
            if (!fs::exists(path)) return {};
            return file_sha256(path);
        }
        std::string dir = stage == kStageFetchExtract ? extracted_dir(cfg, crawl)
                                                      : deduped_dir(cfg, crawl);
        std::string mpath = dir + "/manifest.json";
        if (!fs::exists(mpath)) return {};
        return read_manifest(mpath).content_digest();
    } catch (const std::exception&) {
        return {};
    }
}

} // namespace

int stage_rank(std::string_view stage) {
    if (stage == kStageIndex) return 1;
    if (stage == kStageFetchExtract) return 2;
    if (stage == kStageDedupArchive) return 3;
    return 0;
}

namespace {

checkpoint load_checkpoint(const pipeline_config& cfg, const std::string& crawl) {
    checkpoint cp;
    cp.crawl_id = crawl;
    std::ifstream in(checkpoint_path(cfg, crawl), std::ios::binary);
    if (!in) return cp;
    try {
        ordered_json j;
        in >> j;
        cp.completed_stage = j.value("completed_stage", "");
        cp.content_digest = j.value("content_digest", "");
        ordered_json digests = j.value("stage_digests", ordered_json::object());
        for (const auto& [k, v] : digests.items()) {
            cp.stage_digests[k] = v.get<std::string>();
        }
        ordered_json skips = j.value("skip_counts", ordered_json::object());
        for (const auto& [k, v] : skips.items()) {
            cp.skip_counts[k] = v.get<std::uint64_t>();
        }
        ordered_json stats = j.value("stage_stats", ordered_json::object());
        for (const auto& [k, v] : stats.items()) {
            stage_stats s;
            s.stage = k;
            s.bytes_in = v.value("bytes_in", 0ull);
            s.bytes_out = v.value("bytes_out", 0ull);
            s.doc_count_in = v.value("doc_count_in", 0ull);
            s.doc_count_out = v.value("doc_count_out", 0ull);
            s.records_failed = v.value("records_failed", 0ull);
            s.wall_seconds = v.value("wall_seconds", 0.0);
            cp.stage_stats_by_name[k] = std::move(s);
        }
    } catch (const std::exception&) {
        // A corrupt checkpoint is the same as no checkpoint.
        return checkpoint{crawl, "", "", {}, {}, {}};
    }
    return cp;
}

void save_checkpoint(const pipeline_config& cfg, const checkpoint& cp) {
    ordered_json j;
    j["crawl_id"] = cp.crawl_id;
    j["completed_stage"] = cp.completed_stage;
    j["content_digest"] = cp.content_digest;
    j["stage_digests"] = cp.stage_digests;
    ordered_json stats = ordered_json::object();
    for (const auto& [k, s] : cp.stage_stats_by_name) {
        ordered_json v;
        v["bytes_in"] = s.bytes_in;
        v["bytes_out"] = s.bytes_out;
        v["doc_count_in"] = s.doc_count_in;
        v["doc_count_out"] = s.doc_count_out;
        v["records_failed"] = s.records_failed;
        v["wall_seconds"] = s.wall_seconds;
        stats[k] = std::move(v);
    }
    j["stage_stats"] = std::move(stats);
    j["skip_counts"] = cp.skip_counts;

    fs::path path = checkpoint_path(cfg, cp.crawl_id);
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << j.dump(2) << "\n";
        if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    }
    fs::rename(tmp, path);
}

// The digest key also pins the stage's config fingerprint.
std::string digest_key_value(const pipeline_config& cfg, const std::string& crawl,
                             std::string_view stage) {
    std::string out = compute_stage_digest(cfg, crawl, stage);
    if (out.empty()) return out;
    return out + ":" + stage_fingerprint(cfg, stage);
}

bool stage_is_valid(const pipeline_config& cfg, const checkpoint& cp, const std::string& crawl,
                    std::string_view stage) {
    if (stage_rank(cp.completed_stage) < stage_rank(stage)) return false;
    auto it = cp.stage_digests.find(std::string(stage));
    if (it == cp.stage_digests.end()) return false;
    std::string now = digest_key_value(cfg, crawl, stage);
    return !now.empty() && now == it->second;
}

class stage_timer {
public:
    stage_timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Stage bodies
// ---------------------------------------------------------------------------

stage_stats do_index_stage(const pipeline_config& cfg, const std::string& crawl) {
    stage_timer timer;
    auto locator = make_http_shard_locator(cfg.cc_base, cfg.retry, cfg.user_agent);
    index_filter_options options;
    options.mode = cfg.mode;
    options.workers = cfg.workers;
    index_scan_stats scan;
    filtered_index index =
        filter_archive_index(crawl, cfg.target_language, *locator, options, &scan);

    std::string path = filtered_index_path(cfg.out_dir, crawl, cfg.target_language);
    fs::create_directories(fs::path(path).parent_path());
    write_filtered_index(index, path);

    stage_stats stats;
    stats.stage = kStageIndex;
    stats.bytes_in = scan.shard_bytes;
    stats.bytes_out = fs::file_size(path);
    stats.doc_count_in = scan.rows_scanned;
    stats.doc_count_out = index.records.size();
    stats.wall_seconds = timer.seconds();
    return stats;
}

struct fetch_extract_result {
    stage_stats stats;
    std::map<std::string, std::uint64_t> skip_counts;
};

fetch_extract_result do_fetch_extract_stage(const pipeline_config& cfg, const std::string& crawl) {
    stage_timer timer;
    std::string index_path = filtered_index_path(cfg.out_dir, crawl, cfg.target_language);
    filtered_index index = read_filtered_index(index_path);
    index.crawl_id = crawl;
    index.target_language = cfg.target_language;

    std::vector<std::optional<document>> slots(index.records.size());
    std::vector<fetch_failure> failures;
    std::map<std::string, std::uint64_t> counts;
    std::atomic<std::uint64_t> bytes_fetched{0};
    std::mutex mu;

    fs::path spool_dir;
    if (cfg.spool) {
        spool_dir = fs::path(cfg.out_dir) / "spool" / crawl;
        fs::create_directories(spool_dir);
    }

    fetch_options options;
    options.base_url = cfg.cc_base;
    options.workers = cfg.workers;
    options.rate_limit = cfg.rate_limit;
    options.retry = cfg.retry;
    options.user_agent = cfg.user_agent;

    fetch_all(index, options, [&](fetch_outcome outcome) {
        if (outcome.failure) {
            std::lock_guard<std::mutex> lock(mu);
            ++counts["fetch_failed"];
            failures.push_back(std::move(*outcome.failure));
            return;
        }
        const fetched_record& fetched = *outcome.record;
        bytes_fetched += fetched.compressed_bytes.size();
        if (cfg.spool) {
            char name[32];
            std::snprintf(name, sizeof(name), "row-%06zu.warc.gz", outcome.row);
            std::ofstream f(spool_dir / name, std::ios::binary);
            f << fetched.compressed_bytes;
        }
        std::string counter;
        try {
            std::string raw = decompress_member(
                fetched.compressed_bytes,
                fetched.source.warc_filename + "@" +
                    std::to_string(fetched.source.warc_record_offset));
            warc_record record = parse_warc(raw);
            decode_options dopts;
            dopts.crawl_id = crawl;
            decode_outcome decoded = decode_html(record, dopts);
            if (decoded.skipped) {
                counter = std::string(skip_reason_name(*decoded.skipped));
            } else {
                auto doc = extract_main_text(*decoded.page, cfg.extract);
                if (!doc) {
                    counter = "extract_no_content";
                } else {
                    slots[outcome.row] = std::move(*doc); // row-exclusive, no lock
                }
            }
        } catch (const parse_error&) {
            counter = "parse_error";
        }
        if (!counter.empty()) {
            std::lock_guard<std::mutex> lock(mu);
            ++counts[counter];
        }
    });

    // Documents in locator order (the index file is already sorted).
    std::vector<document> docs;
    for (auto& slot : slots) {
        if (slot) docs.push_back(std::move(*slot));
    }

    if (!failures.empty()) {
        fs::path fpath = failures_path(cfg, crawl);
        fs::create_directories(fpath.parent_path());
        std::ofstream out(fpath, std::ios::binary);
        for (const auto& f : failures) {
            ordered_json j;
            j["url"] = f.source.url;
            j["filename"] = f.source.warc_filename;
            j["offset"] = f.source.warc_record_offset;
            j["length"] = f.source.warc_record_length;
            j["error"] = f.error;
            out << j.dump() << "\n";
        }
    }

    stage_stats stats;
    stats.stage = kStageFetchExtract;
    stats.doc_count_in = index.records.size();
    stats.doc_count_out = docs.size();
    stats.bytes_in = bytes_fetched.load();
    for (const auto& d : docs) stats.bytes_out += d.text.size();
    stats.records_failed = failures.size();
    stats.wall_seconds = timer.seconds();

    write_shards(docs, extracted_dir(cfg, crawl), cfg.target_language, "extracted", stats,
                 cfg.max_shard_bytes);
    return {std::move(stats), std::move(counts)};
}

stage_stats do_dedup_archive_stage(const pipeline_config& cfg, const std::string& crawl) {
    stage_timer timer;
    std::vector<document> docs = read_all_documents(extracted_dir(cfg, crawl) + "/manifest.json");

    dedup_config dcfg;
    dcfg.min_len = cfg.min_dup_len;
    dcfg.min_chars = cfg.min_doc_chars;
    dcfg.corpus_budget_bytes = cfg.dedup_budget_bytes;

    span_sink sink;
    std::unique_ptr<std::ofstream> dump;
    if (cfg.span_dump) {
        fs::path dir = fs::path(cfg.out_dir) / "spans";
        fs::create_directories(dir);
        dump = std::make_unique<std::ofstream>(dir / (crawl + ".tsv"), std::ios::binary);
        sink = [&dump](const corpus& c, const std::vector<duplicate_span>& spans) {
            *dump << format_span_dump(c, spans);
        };
    }

    dedup_result result = dedup_stage(std::move(docs), dcfg, sink);

    stage_stats stats;
    stats.stage = kStageDedupArchive;
    stats.bytes_in = result.stats.bytes_in;
    stats.bytes_out = result.stats.bytes_out;
    stats.doc_count_in = result.stats.docs_in;
    stats.doc_count_out = result.stats.docs_out;
    stats.wall_seconds = timer.seconds();

    write_shards(result.docs, deduped_dir(cfg, crawl), cfg.target_language, "deduped-archive",
                 stats, cfg.max_shard_bytes);
    return stats;
}

} // namespace

archive_report run_archive(const pipeline_config& cfg, const std::string& crawl_id) {
    archive_report report;
    report.crawl_id = crawl_id;

    checkpoint cp = cfg.resume ? load_checkpoint(cfg, crawl_id)
                               : checkpoint{crawl_id, "", "", {}, {}, {}};

    auto complete_stage = [&](const std::string& stage, stage_stats stats) {
        report.stages.push_back(stats);
        cp.stage_stats_by_name[stage] = std::move(stats);
        cp.stage_digests[stage] = digest_key_value(cfg, crawl_id, stage);
        cp.completed_stage = stage;
        cp.content_digest = cp.stage_digests[stage];
        cp.skip_counts = report.skip_counts;
        save_checkpoint(cfg, cp);
    };

    try {
        if (cfg.resume && stage_is_valid(cfg, cp, crawl_id, kStageIndex)) {
            report.stages.push_back(cp.stage_stats_by_name[kStageIndex]);
        } else {
            complete_stage(kStageIndex, do_index_stage(cfg, crawl_id));
        }

        if (cfg.resume && stage_is_valid(cfg, cp, crawl_id, kStageFetchExtract)) {
            report.stages.push_back(cp.stage_stats_by_name[kStageFetchExtract]);
            report.skip_counts = cp.skip_counts;
        } else {
            fetch_extract_result r = do_fetch_extract_stage(cfg, crawl_id);
            report.skip_counts = std::move(r.skip_counts);
            complete_stage(kStageFetchExtract, std::move(r.stats));
        }

        if (cfg.resume && stage_is_valid(cfg, cp, crawl_id, kStageDedupArchive)) {
            report.stages.push_back(cp.stage_stats_by_name[kStageDedupArchive]);
        } else {
            complete_stage(kStageDedupArchive, do_dedup_archive_stage(cfg, crawl_id));
        }
    } catch (const std::exception& e) {
        report.failed = true;
        report.error = e.what();
    }
    return report;
}

namespace {

pipeline_report make_pipeline_report(const pipeline_config& cfg,
                                     std::vector<archive_report> archives) {
    pipeline_report report;
    report.target_language = cfg.target_language;
    report.archives = std::move(archives);
    return report;
}

void finish_report(const pipeline_config& cfg, pipeline_report& report) {
    if (report.final_size_mb) {
        std::vector<prior_work_row> prior = cfg.compare_csv.empty()
                                                ? bundled_prior_works()
                                                : load_prior_works_csv(cfg.compare_csv);
        std::erase_if(prior, [&](const prior_work_row& r) {
            return r.language != cfg.target_language;
        });
        report.comparisons = compare_with_prior(*report.final_size_mb, prior);
    }
    auto warnings = check_against_reference(report);
    report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());
    write_reports(report, cfg.out_dir);
}

} // namespace

int run_pipeline(const pipeline_config& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);

    // Archives run concurrently; each archive's stages stay sequential.
    std::vector<archive_report> archives(cfg.crawl_ids.size());
    std::atomic<std::size_t> next{0};
    std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers),
                                             cfg.crawl_ids.size());
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < pool; ++t) {
        threads.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= cfg.crawl_ids.size()) return;
                archives[i] = run_archive(cfg, cfg.crawl_ids[i]);
            }
        });
    }
    for (auto& t : threads) t.join();

    pipeline_report report = make_pipeline_report(cfg, std::move(archives));

    std::vector<const archive_report*> ok;
    for (const auto& a : report.archives) {
        if (!a.failed) ok.push_back(&a);
    }
    if (ok.empty()) {
        finish_report(cfg, report);
        return exit_fatal;
    }

    try {
        // Cross-archive dedup: one logical corpus over every archive's
        // survivors, in configured archive order.
        stage_timer timer;
        std::vector<document> all;
        for (const auto* a : ok) {
            std::vector<document> docs =
                read_all_documents(deduped_dir(cfg, a->crawl_id) + "/manifest.json");
            std::move(docs.begin(), docs.end(), std::back_inserter(all));
        }

        dedup_config dcfg;
        dcfg.min_len = cfg.min_dup_len;
        dcfg.min_chars = cfg.min_doc_chars;
        dcfg.corpus_budget_bytes = cfg.dedup_budget_bytes;
        dedup_result result = dedup_stage(std::move(all), dcfg);

        stage_stats cross;
        cross.stage = "cross_dedup";
        cross.bytes_in = result.stats.bytes_in;
        cross.bytes_out = result.stats.bytes_out;
        cross.doc_count_in = result.stats.docs_in;
        cross.doc_count_out = result.stats.docs_out;
        cross.wall_seconds = timer.seconds();
        report.global_stages.push_back(cross);

        stage_timer store_timer;
        stage_stats store_stats;
        store_stats.stage = "final_store";
        store_stats.doc_count_in = result.docs.size();
        store_stats.doc_count_out = result.docs.size();
        store_stats.bytes_in = cross.bytes_out;
        manifest final_manifest = write_shards(result.docs, final_dir(cfg), cfg.target_language,
                                               "final", store_stats, cfg.max_shard_bytes);
        std::uint64_t compressed = 0;
        for (const auto& s : final_manifest.shards) compressed += s.byte_size;
        store_stats.bytes_out = compressed;
        store_stats.wall_seconds = store_timer.seconds();
        // Rewrite the manifest stats now that compressed sizes are known.
        final_manifest.stats = store_stats;
        write_manifest(final_manifest, final_dir(cfg) + "/manifest.json");
        report.global_stages.push_back(store_stats);
        report.final_size_mb = static_cast<double>(compressed) / 1e6;
    } catch (const std::exception& e) {
        report.warnings.push_back(std::string("cross-archive stage failed: ") + e.what());
        finish_report(cfg, report);
        return exit_fatal;
    }

    finish_report(cfg, report);

    bool any_failed_archive = ok.size() != report.archives.size();
    bool any_failed_record = false;
    for (const auto& a : report.archives) {
        for (const auto& s : a.stages) {
            if (s.records_failed > 0) any_failed_record = true;
        }
    }
    if (any_failed_archive) return exit_partial;
    if (cfg.strict_exit && any_failed_record) return exit_partial;
    return exit_ok;
}

int run_index_only(const pipeline_config& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    bool failed = false;
    for (const auto& crawl : cfg.crawl_ids) {
        try {
            stage_stats stats = do_index_stage(cfg, crawl);
            std::cout << crawl << ": " << stats.doc_count_out << " rows ("
                      << stats.bytes_out << " bytes) -> "
                      << filtered_index_path(cfg.out_dir, crawl, cfg.target_language) << "\n";
        } catch (const std::exception& e) {
            std::cerr << crawl << ": " << e.what() << "\n";
            failed = true;
        }
    }
    return failed ? exit_partial : exit_ok;
}

int run_fetch_only(const pipeline_config& cfg) {
    cfg.validate();
    bool failed = false;
    for (const auto& crawl : cfg.crawl_ids) {
        try {
            fetch_extract_result r = do_fetch_extract_stage(cfg, crawl);
            std::cout << crawl << ": " << r.stats.doc_count_out << " documents, "
                      << r.stats.records_failed << " failed records -> "
                      << extracted_dir(cfg, crawl) << "\n";
        } catch (const std::exception& e) {
            std::cerr << crawl << ": " << e.what() << "\n";
            failed = true;
        }
    }
    return failed ? exit_partial : exit_ok;
}

int run_dedup_only(const pipeline_config& cfg, const std::string& in_manifest,
                   const std::string& out_dir) {
    std::vector<document> docs = read_all_documents(in_manifest);
    manifest in_m = read_manifest(in_manifest);

    dedup_config dcfg;
    dcfg.min_len = cfg.min_dup_len;
    dcfg.min_chars = cfg.min_doc_chars;
    dcfg.corpus_budget_bytes = cfg.dedup_budget_bytes;

    span_sink sink;
    std::unique_ptr<std::ofstream> dump;
    if (cfg.span_dump) {
        fs::create_directories(out_dir);
        dump = std::make_unique<std::ofstream>(fs::path(out_dir) / "spans.tsv", std::ios::binary);
        sink = [&dump](const corpus& c, const std::vector<duplicate_span>& spans) {
            *dump << format_span_dump(c, spans);
        };
    }

    stage_timer timer;
    dedup_result result = dedup_stage(std::move(docs), dcfg, sink);
    stage_stats stats;
    stats.stage = "dedup";
    stats.bytes_in = result.stats.bytes_in;
    stats.bytes_out = result.stats.bytes_out;
    stats.doc_count_in = result.stats.docs_in;
    stats.doc_count_out = result.stats.docs_out;
    stats.wall_seconds = timer.seconds();

    std::string lang = in_m.target_language.empty() ? cfg.target_language : in_m.target_language;
    write_shards(result.docs, out_dir, lang, "final", stats, cfg.max_shard_bytes);
    std::cout << result.stats.docs_in << " -> " << result.stats.docs_out << " documents, "
              << result.stats.bytes_in << " -> " << result.stats.bytes_out << " bytes\n";
    return exit_ok;
}

int run_report_only(const pipeline_config& cfg) {
    std::vector<archive_report> archives;
    for (const auto& crawl : cfg.crawl_ids) {
        archive_report a;
        a.crawl_id = crawl;
        checkpoint cp = load_checkpoint(cfg, crawl);
        if (cp.completed_stage.empty()) {
            a.failed = true;
            a.error = "no checkpointed stages";
        } else {
            for (const char* stage : {kStageIndex, kStageFetchExtract, kStageDedupArchive}) {
                auto it = cp.stage_stats_by_name.find(stage);
                if (it != cp.stage_stats_by_name.end()) a.stages.push_back(it->second);
            }
            a.skip_counts = cp.skip_counts;
        }
        archives.push_back(std::move(a));
    }
    pipeline_report report = make_pipeline_report(cfg, std::move(archives));

    std::string final_manifest = final_dir(cfg) + "/manifest.json";
    if (fs::exists(final_manifest)) {
        manifest m = read_manifest(final_manifest);
        std::uint64_t compressed = 0;
        for (const auto& s : m.shards) compressed += s.byte_size;
        report.final_size_mb = static_cast<double>(compressed) / 1e6;
        report.global_stages.push_back(m.stats);
    }
    finish_report(cfg, report);
    std::cout << render_report_text(report);
    return exit_ok;
}

} // namespace unicrawl
