#include "unicrawl/index.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "unicrawl/errors.hpp"
#include "unicrawl/gzip.hpp"
#include "unicrawl/http.hpp"
#include "unicrawl/parquet.hpp"
#include "unicrawl/util.hpp"

namespace unicrawl {

using ordered_json = nlohmann::ordered_json;

filter_mode parse_filter_mode(std::string_view name) {
    if (name == "strict") return filter_mode::strict;
    if (name == "lenient") return filter_mode::lenient;
    throw config_error("unknown filter mode: " + std::string(name) + " (use strict|lenient)");
}

std::string_view filter_mode_name(filter_mode mode) {
    return mode == filter_mode::strict ? "strict" : "lenient";
}

bool language_predicate(const std::vector<std::string>& languages, std::string_view target,
                        filter_mode mode) {
    if (languages.empty()) return false;
    if (mode == filter_mode::strict) {
        return languages.size() == 1 && languages[0] == target;
    }
    return languages[0] == target;
}

double estimate_filtered_size(double language_fraction, double index_size_bytes) {
    if (language_fraction < 0.0 || language_fraction > 1.0) {
        throw config_error("language fraction must be within [0, 1]");
    }
    return language_fraction * index_size_bytes;
}

// ---------------------------------------------------------------------------
// Shard listing and filtering
// ---------------------------------------------------------------------------

namespace {

class http_shard_locator final : public shard_locator {
public:
    http_shard_locator(std::string cc_base, retry_policy policy, std::string user_agent)
        : base_(std::move(cc_base)), policy_(policy), user_agent_(std::move(user_agent)),
          session_(user_agent_) {}

    std::string fetch_shard_listing(const std::string& crawl_id) override {
        std::string url = join_url(base_, "crawl-data/" + crawl_id + "/cc-index-table.paths.gz");
        http_result res = with_retries(policy_, std::hash<std::string>{}(url), [&] {
            http_result r = session_.get(url);
            if (r.status >= 500) {
                throw network_error("GET " + url + " returned " + std::to_string(r.status));
            }
            return r;
        });
        if (res.status == 404) {
            throw fatal_error("unknown crawl: " + crawl_id + " (no index listing at " + url + ")");
        }
        if (res.status != 200) {
            throw network_error("GET " + url + " returned " + std::to_string(res.status), false);
        }
        return gunzip_all(res.body);
    }

    std::shared_ptr<byte_source> open_shard(const std::string& shard_uri) override {
        return make_http_source(shard_uri, policy_, user_agent_);
    }

    std::string shard_uri(const std::string& rel_path) override {
        return join_url(base_, rel_path);
    }

private:
    std::string base_;
    retry_policy policy_;
    std::string user_agent_;
    http_session session_;
};

} // namespace

std::unique_ptr<shard_locator> make_http_shard_locator(std::string cc_base, retry_policy policy,
                                                       std::string user_agent) {
    return std::make_unique<http_shard_locator>(std::move(cc_base), policy, std::move(user_agent));
}

std::vector<std::string> list_index_shards(const std::string& crawl_id, shard_locator& locator) {
    if (!is_crawl_id(crawl_id)) {
        throw config_error("crawl id must match CC-MAIN-YYYY-WW: " + crawl_id);
    }
    std::string listing = locator.fetch_shard_listing(crawl_id);
    std::vector<std::string> uris;
    for (const std::string& line : split(listing, '\n')) {
        std::string path = trim(line);
        if (path.empty() || !path.ends_with(".parquet")) continue;
        // The index table also lists robotstxt/crawldiagnostics partitions.
        if (path.find("subset=") != std::string::npos &&
            path.find("subset=warc") == std::string::npos) {
            continue;
        }
        uris.push_back(locator.shard_uri(path));
    }
    if (uris.empty()) {
        throw fatal_error("crawl " + crawl_id + " lists no index shards");
    }
    return uris;
}

std::vector<index_record> filter_index_shard(std::shared_ptr<byte_source> shard,
                                             const std::string& crawl_id,
                                             const std::string& target, filter_mode mode,
                                             index_scan_stats* stats) {
    if (stats) {
        stats->shard_bytes += shard->size();
        stats->shards += 1;
    }
    parquet_reader reader(std::move(shard));
    std::vector<index_record> matches;
    if (stats) stats->rows_scanned += static_cast<std::uint64_t>(reader.total_rows());
    static const char* kRequired[] = {"url", "content_languages", "warc_filename",
                                      "warc_record_offset", "warc_record_length"};
    for (const char* col : kRequired) {
        // Archives without language annotations have nothing to match.
        if (!reader.has_column(col)) return matches;
    }

    for (std::size_t g = 0; g < reader.row_group_count(); ++g) {
        auto langs = reader.read_column(g, "content_languages");
        // Cheap pre-pass: most rows fail the predicate, so the remaining
        // columns are only decoded if the group has any match at all.
        bool any = false;
        std::vector<std::vector<std::string>> parsed(langs.rows());
        for (std::size_t r = 0; r < langs.rows(); ++r) {
            if (!langs.present[r] || langs.strs[r].empty()) continue;
            parsed[r] = split(langs.strs[r], ',');
            if (language_predicate(parsed[r], target, mode)) any = true;
        }
        if (!any) continue;

        auto url = reader.read_column(g, "url");
        auto filename = reader.read_column(g, "warc_filename");
        auto offset = reader.read_column(g, "warc_record_offset");
        auto length = reader.read_column(g, "warc_record_length");

        for (std::size_t r = 0; r < langs.rows(); ++r) {
            if (parsed[r].empty() || !language_predicate(parsed[r], target, mode)) continue;
            if (!url.present[r] || !filename.present[r] || !offset.present[r] ||
                !length.present[r]) {
                continue;
            }
            index_record rec;
            rec.url = url.strs[r];
            rec.crawl_id = crawl_id;
            rec.content_languages = parsed[r];
            rec.warc_filename = filename.strs[r];
            rec.warc_record_offset = offset.ints[r];
            rec.warc_record_length = length.ints[r];
            if (rec.warc_record_offset < 0 || rec.warc_record_length < 1) continue;
            if (rec.warc_filename.empty() || rec.warc_filename.front() == '/' ||
                rec.warc_filename.find("://") != std::string::npos) {
                continue;
            }
            matches.push_back(std::move(rec));
        }
    }
    return matches;
}

filtered_index filter_archive_index(const std::string& crawl_id, const std::string& target,
                                    shard_locator& locator, const index_filter_options& options,
                                    index_scan_stats* stats) {
    if (!is_iso639_3(target)) {
        throw config_error("target language must be an ISO-639-3 code: " + target);
    }
    if (options.workers < 1) {
        throw config_error("workers must be >= 1");
    }

    std::vector<std::string> shards = list_index_shards(crawl_id, locator);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::vector<index_record> all;
    index_scan_stats scan;
    std::string first_error;

    auto worker = [&] {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= shards.size()) return;
            try {
                index_scan_stats shard_scan;
                auto matches = filter_index_shard(locator.open_shard(shards[i]), crawl_id, target,
                                                  options.mode, &shard_scan);
                std::lock_guard<std::mutex> lock(mu);
                scan.rows_scanned += shard_scan.rows_scanned;
                scan.shard_bytes += shard_scan.shard_bytes;
                scan.shards += shard_scan.shards;
                all.insert(all.end(), std::make_move_iterator(matches.begin()),
                           std::make_move_iterator(matches.end()));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                if (first_error.empty()) {
                    first_error = "shard " + shards[i] + ": " + e.what();
                }
                failed.store(true);
                return;
            }
        }
    };

    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(options.workers), shards.size());
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (std::size_t i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    if (failed.load()) {
        throw fatal_error("partial index for " + crawl_id + ": " + first_error);
    }
    if (stats) *stats = scan;

    std::sort(all.begin(), all.end(), [](const index_record& a, const index_record& b) {
        if (a.warc_filename != b.warc_filename) return a.warc_filename < b.warc_filename;
        if (a.warc_record_offset != b.warc_record_offset) {
            return a.warc_record_offset < b.warc_record_offset;
        }
        return a.url < b.url;
    });

    filtered_index out;
    out.crawl_id = crawl_id;
    out.target_language = target;
    out.records = std::move(all);
    out.created_at = now_epoch_seconds();
    return out;
}

// ---------------------------------------------------------------------------
// JSONL serialization
// ---------------------------------------------------------------------------

namespace {

std::string record_to_line(const index_record& rec) {
    ordered_json j;
    j["url"] = rec.url;
    j["crawl"] = rec.crawl_id;
    j["languages"] = rec.content_languages;
    j["filename"] = rec.warc_filename;
    j["offset"] = rec.warc_record_offset;
    j["length"] = rec.warc_record_length;
    return j.dump();
}

index_record record_from_line(const std::string& line) {
    ordered_json j = ordered_json::parse(line);
    index_record rec;
    rec.url = j.at("url").get<std::string>();
    rec.crawl_id = j.at("crawl").get<std::string>();
    rec.content_languages = j.at("languages").get<std::vector<std::string>>();
    rec.warc_filename = j.at("filename").get<std::string>();
    rec.warc_record_offset = j.at("offset").get<std::int64_t>();
    rec.warc_record_length = j.at("length").get<std::int64_t>();
    return rec;
}

} // namespace

void write_filtered_index(const filtered_index& index, const std::string& path) {
    if (path.ends_with(".gz")) {
        gzip_writer out(path);
        for (const auto& rec : index.records) {
            out.write(record_to_line(rec));
            out.write("\n");
        }
        out.close();
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        for (const auto& rec : index.records) {
            out << record_to_line(rec) << '\n';
        }
        if (!out) throw std::runtime_error("write failed: " + path);
    }
}

filtered_index read_filtered_index(const std::string& path) {
    filtered_index out;
    auto consume = [&](const std::string& line) {
        if (trim(line).empty()) return;
        out.records.push_back(record_from_line(line));
    };
    if (path.ends_with(".gz")) {
        gzip_reader in(path);
        std::string line;
        while (in.read_line(line)) consume(line);
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open: " + path);
        std::string line;
        while (std::getline(in, line)) consume(line);
    }
    if (!out.records.empty()) {
        out.crawl_id = out.records.front().crawl_id;
    }
    return out;
}

std::string filtered_index_path(const std::string& out_dir, const std::string& crawl_id,
                                const std::string& target, bool gzipped) {
    std::string path = out_dir + "/index/" + crawl_id + "." + target + ".jsonl";
    if (gzipped) path += ".gz";
    return path;
}

} // namespace unicrawl
