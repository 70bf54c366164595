#include "unicrawl/store.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unicrawl/errors.hpp"
#include "unicrawl/gzip.hpp"
#include "unicrawl/util.hpp"
#include "unicrawl/version.hpp"

namespace unicrawl {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::uint64_t manifest::total_docs() const {
    std::uint64_t n = 0;
    for (const auto& s : shards) n += s.doc_count;
    return n;
}

std::string manifest::content_digest() const {
    std::string all;
    for (const auto& s : shards) {
        all += s.sha256;
        all += '\n';
    }
    return sha256_hex(all);
}

namespace {

std::string doc_to_line(const document& doc) {
    ordered_json j;
    j["id"] = doc.id;
    j["url"] = doc.url;
    j["crawl"] = doc.crawl_id;
    j["date"] = doc.record_date;
    j["text"] = doc.text;
    return j.dump();
}

document doc_from_line(const std::string& line) {
    ordered_json j = ordered_json::parse(line);
    document doc;
    doc.id = j.at("id").get<std::string>();
    doc.url = j.at("url").get<std::string>();
    doc.crawl_id = j.at("crawl").get<std::string>();
    doc.record_date = j.at("date").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    doc.char_len = utf8_length(doc.text);
    return doc;
}

std::string shard_name(std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "data-%05zu.jsonl.gz", n);
    return buf;
}

std::string hash_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

void atomic_write(const fs::path& path, std::string_view content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace

struct shard_writer::impl {
    fs::path dir;
    std::string target_language;
    std::string stage;
    std::uint64_t max_bytes;

    std::unique_ptr<gzip_writer> current;
    fs::path current_tmp;
    std::string current_name;
    std::uint64_t current_docs = 0;
    std::set<std::string> current_crawls;

    std::vector<shard_info> done;
    bool finalized = false;

    impl(std::string out_dir, std::string lang, std::string st, std::uint64_t max)
        : dir(std::move(out_dir)), target_language(std::move(lang)), stage(std::move(st)),
          max_bytes(max) {
        fs::create_directories(dir);
    }

    void open_next() {
        current_name = shard_name(done.size());
        current_tmp = dir / (current_name + ".tmp");
        current = std::make_unique<gzip_writer>(current_tmp.string());
        current_docs = 0;
        current_crawls.clear();
    }

    void roll() {
        if (!current) return;
        current->close();
        shard_info info;
        info.path = current_name;
        info.doc_count = current_docs;
        info.crawl_ids = std::move(current_crawls);
        fs::path final_path = dir / current_name;
        info.sha256 = hash_file(current_tmp);
        info.byte_size = fs::file_size(current_tmp);
        fs::rename(current_tmp, final_path);
        done.push_back(std::move(info));
        current.reset();
    }

    void add(const document& doc) {
        std::string line = doc_to_line(doc);
        line += '\n';
        if (current && current_docs > 0 &&
            current->uncompressed_bytes() + line.size() > max_bytes) {
            roll();
        }
        if (!current) open_next();
        current->write(line);
        ++current_docs;
        current_crawls.insert(doc.crawl_id);
    }

    void abandon() {
        if (current) {
            current.reset();
            std::error_code ec;
            fs::remove(current_tmp, ec);
        }
    }
};

shard_writer::shard_writer(std::string out_dir, std::string target_language, std::string stage,
                           std::uint64_t max_shard_bytes)
    : impl_(std::make_unique<impl>(std::move(out_dir), std::move(target_language),
                                   std::move(stage), max_shard_bytes)) {}

shard_writer::~shard_writer() {
    if (impl_ && !impl_->finalized) impl_->abandon();
}

void shard_writer::add(const document& doc) { impl_->add(doc); }

manifest shard_writer::finalize(stage_stats stats) {
    if (impl_->current && impl_->current_docs > 0) impl_->roll();
    impl_->abandon(); // drop an empty in-progress shard, if any
    manifest m;
    m.target_language = impl_->target_language;
    m.stage = impl_->stage;
    m.shards = impl_->done;
    m.stats = std::move(stats);
    m.tool_version = tool_version;
    m.created_at = now_epoch_seconds();
    write_manifest(m, (impl_->dir / "manifest.json").string());
    impl_->finalized = true;
    return m;
}

manifest write_shards(const std::vector<document>& docs, const std::string& out_dir,
                      const std::string& target_language, const std::string& stage,
                      stage_stats stats, std::uint64_t max_shard_bytes) {
    shard_writer writer(out_dir, target_language, stage, max_shard_bytes);
    for (const auto& d : docs) writer.add(d);
    if (stats.stage.empty()) stats.stage = stage;
    if (stats.doc_count_out == 0) stats.doc_count_out = docs.size();
    return writer.finalize(std::move(stats));
}

namespace {

ordered_json stats_to_json(const stage_stats& s) {
    ordered_json j;
    j["stage"] = s.stage;
    j["bytes_in"] = s.bytes_in;
    j["bytes_out"] = s.bytes_out;
    j["doc_count_in"] = s.doc_count_in;
    j["doc_count_out"] = s.doc_count_out;
    j["records_failed"] = s.records_failed;
    j["wall_seconds"] = s.wall_seconds;
    return j;
}

stage_stats stats_from_json(const ordered_json& j) {
    stage_stats s;
    s.stage = j.value("stage", "");
    s.bytes_in = j.value("bytes_in", 0ull);
    s.bytes_out = j.value("bytes_out", 0ull);
    s.doc_count_in = j.value("doc_count_in", 0ull);
    s.doc_count_out = j.value("doc_count_out", 0ull);
    s.records_failed = j.value("records_failed", 0ull);
    s.wall_seconds = j.value("wall_seconds", 0.0);
    return s;
}

} // namespace

void write_manifest(const manifest& m, const std::string& manifest_path) {
    ordered_json j;
    j["format"] = "unicrawl-dataset";
    j["version"] = 1;
    j["target_language"] = m.target_language;
    j["stage"] = m.stage;
    j["tool_version"] = m.tool_version;
    j["created_at"] = format_utc(m.created_at);
    j["stats"] = stats_to_json(m.stats);
    j["shards"] = ordered_json::array();
    for (const auto& s : m.shards) {
        ordered_json sj;
        sj["path"] = s.path;
        sj["doc_count"] = s.doc_count;
        sj["byte_size"] = s.byte_size;
        sj["sha256"] = s.sha256;
        sj["crawl_ids"] = s.crawl_ids;
        j["shards"].push_back(std::move(sj));
    }
    atomic_write(manifest_path, j.dump(2) + "\n");
}

manifest read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw integrity_error("manifest not found: " + manifest_path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw integrity_error("manifest unparseable: " + manifest_path + ": " + e.what());
    }
    if (j.value("format", "") != "unicrawl-dataset") {
        throw integrity_error("not a dataset manifest: " + manifest_path);
    }
    manifest m;
    m.target_language = j.value("target_language", "");
    m.stage = j.value("stage", "");
    m.tool_version = j.value("tool_version", "");
    if (j.contains("stats")) m.stats = stats_from_json(j["stats"]);
    for (const auto& sj : j.value("shards", ordered_json::array())) {
        shard_info s;
        s.path = sj.at("path").get<std::string>();
        s.doc_count = sj.at("doc_count").get<std::uint64_t>();
        s.byte_size = sj.at("byte_size").get<std::uint64_t>();
        s.sha256 = sj.at("sha256").get<std::string>();
        for (const auto& c : sj.value("crawl_ids", ordered_json::array())) {
            s.crawl_ids.insert(c.get<std::string>());
        }
        m.shards.push_back(std::move(s));
    }
    return m;
}

void read_shards(const std::string& manifest_path, const std::function<void(document)>& sink) {
    manifest m = read_manifest(manifest_path);
    fs::path dir = fs::path(manifest_path).parent_path();
    for (const auto& s : m.shards) {
        fs::path shard_path = dir / s.path;
        if (!fs::exists(shard_path)) {
            throw integrity_error("shard missing: " + s.path);
        }
        if (hash_file(shard_path) != s.sha256) {
            throw integrity_error("shard checksum mismatch: " + s.path);
        }
        gzip_reader in(shard_path.string());
        std::string line;
        std::uint64_t count = 0;
        while (in.read_line(line)) {
            if (trim(line).empty()) continue;
            sink(doc_from_line(line));
            ++count;
        }
        if (count != s.doc_count) {
            throw integrity_error("shard doc count mismatch: " + s.path + " has " +
                                  std::to_string(count) + ", manifest says " +
                                  std::to_string(s.doc_count));
        }
    }
}

std::vector<document> read_all_documents(const std::string& manifest_path) {
    std::vector<document> docs;
    read_shards(manifest_path, [&](document d) { docs.push_back(std::move(d)); });
    return docs;
}

std::vector<std::string> validate_manifest(const std::string& manifest_path) {
    std::vector<std::string> problems;
    manifest m;
    try {
        m = read_manifest(manifest_path);
    } catch (const std::exception& e) {
        problems.push_back(e.what());
        return problems;
    }
    if (m.stage != "raw" && m.stage != "extracted" && m.stage != "deduped-archive" &&
        m.stage != "final") {
        problems.push_back("unknown stage: " + m.stage);
    }
    if (m.stats.doc_count_out != 0 && m.stats.doc_count_out != m.total_docs()) {
        problems.push_back("stats.doc_count_out (" + std::to_string(m.stats.doc_count_out) +
                           ") != sum of shard doc counts (" + std::to_string(m.total_docs()) +
                           ")");
    }
    fs::path dir = fs::path(manifest_path).parent_path();
    for (const auto& s : m.shards) {
        fs::path shard_path = dir / s.path;
        if (!fs::exists(shard_path)) {
            problems.push_back("shard missing: " + s.path);
            continue;
        }
        if (fs::file_size(shard_path) != s.byte_size) {
            problems.push_back("shard size mismatch: " + s.path);
        }
        if (hash_file(shard_path) != s.sha256) {
            problems.push_back("shard checksum mismatch: " + s.path);
        }
        if (s.doc_count < 1) {
            problems.push_back("shard with zero documents: " + s.path);
        }
    }
    return problems;
}

} // namespace unicrawl
