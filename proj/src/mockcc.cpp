#include "unicrawl/mockcc.hpp"

#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "unicrawl/errors.hpp"
#include "unicrawl/gzip.hpp"
#include "unicrawl/parquet.hpp"
#include "unicrawl/util.hpp"
#include "unicrawl/warc.hpp"

namespace unicrawl {

namespace fs = std::filesystem;

namespace {

const char* kAmharicWords[] = {
    "ሰላም", "እንደምን", "አዲስ", "አበባ", "ኢትዮጵያ", "ቋንቋ", "መጽሐፍ", "ትምህርት",
    "ቤት", "ውሃ", "ፀሐይ", "ጨረቃ", "ኮከብ", "ሰማይ", "ምድር", "ዛፍ", "ወንዝ",
    "ተራራ", "ከተማ", "ገበያ", "ዜና", "ታሪክ", "ባህል", "ሙዚቃ", "ስራ", "ጊዜ",
    "ቀን", "ሳምንት", "ወር", "ዓመት", "ሰው", "ልጅ", "እናት", "አባት", "ወንድም",
    "እህት", "ጓደኛ", "መንገድ", "መኪና", "አውሮፕላን", "ስልክ", "ኮምፒውተር", "በጣም",
    "ጥሩ", "ትልቅ", "ትንሽ", "አዲሱ", "የቀድሞ", "መረጃ", "ገጽ",
};

const char* kEnglishWords[] = {
    "the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog", "news",
    "report", "market", "weather", "city", "council", "local", "update",
    "story", "published", "today", "community", "school", "project",
    "development", "national", "service", "public", "announcement",
};

const char* kFrenchWords[] = {
    "le", "monde", "nouvelle", "ville", "rapport", "marché", "temps",
    "aujourd'hui", "communauté", "école", "projet", "développement",
    "national", "service", "public", "annonce", "histoire", "publié",
};

struct word_bank {
    const char** words;
    std::size_t count;
    const char* stop; // sentence terminator
};

word_bank bank_for(const std::string& lang) {
    if (lang == "amh") return {kAmharicWords, std::size(kAmharicWords), "።"};
    if (lang == "fra") return {kFrenchWords, std::size(kFrenchWords), "."};
    return {kEnglishWords, std::size(kEnglishWords), "."};
}

std::string make_sentence(std::mt19937_64& rng, const word_bank& bank) {
    std::uniform_int_distribution<int> len(6, 14);
    std::uniform_int_distribution<std::size_t> pick(0, bank.count - 1);
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i) {
        if (i > 0) s += ' ';
        s += bank.words[pick(rng)];
    }
    s += bank.stop;
    return s;
}

std::string make_paragraph(std::mt19937_64& rng, const word_bank& bank) {
    std::uniform_int_distribution<int> n(2, 5);
    std::string p;
    int count = n(rng);
    for (int i = 0; i < count; ++i) {
        if (i > 0) p += ' ';
        p += make_sentence(rng, bank);
    }
    return p;
}

struct synth_page {
    std::string url;
    std::string html;
    std::vector<std::string> languages; // empty = unannotated row
};

std::string render_page_html(std::mt19937_64& rng, const word_bank& bank,
                             const std::vector<std::string>& shared_pool,
                             double shared_probability, const std::string& title,
                             int min_paragraphs, int max_paragraphs) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pool_pick(0, shared_pool.empty() ? 0 : shared_pool.size() - 1);
    std::uniform_int_distribution<int> paras(min_paragraphs, max_paragraphs);

    std::string html = "<!DOCTYPE html><html><head><meta charset=\"utf-8\"><title>" + title +
                       "</title></head><body>";
    html += "<header><a href=\"/\">Home</a> <a href=\"/news\">News</a> "
            "<a href=\"/about\">About</a></header>";
    html += "<nav><ul><li><a href=\"/a\">A</a></li><li><a href=\"/b\">B</a></li>"
            "<li><a href=\"/c\">C</a></li></ul></nav>";
    html += "<article><h1>" + title + "</h1>";
    int n = paras(rng);
    for (int i = 0; i < n; ++i) {
        std::string para;
        if (!shared_pool.empty() && coin(rng) < shared_probability) {
            para = shared_pool[pool_pick(rng)];
        } else {
            para = make_paragraph(rng, bank);
        }
        html += "<p>" + para + "</p>";
    }
    html += "</article>";
    html += "<footer>Copyright 2023 Example Media Network. All rights reserved.</footer>";
    html += "</body></html>";
    return html;
}

std::string warc_record_bytes(const synth_page& page, const std::string& date) {
    warc_record rec;
    rec.warc_version = "WARC/1.0";
    std::string digest = sha256_hex(page.url).substr(0, 32);
    rec.warc_headers = {
        {"WARC-Type", "response"},
        {"WARC-Record-ID", "<urn:uuid:" + digest + ">"},
        {"WARC-Date", date},
        {"WARC-Target-URI", page.url},
        {"Content-Type", "application/http; msgtype=response"},
    };
    rec.http_status = 200;
    rec.http_headers = {
        {"Content-Type", "text/html; charset=utf-8"},
        {"Content-Length", std::to_string(page.html.size())},
    };
    rec.payload = page.html;
    rec.target_uri = page.url;
    rec.record_date = date;

    // Content-Length of the envelope covers the embedded HTTP block.
    std::string http_block = "HTTP/1.1 200 OK\r\n";
    for (const auto& [k, v] : rec.http_headers) http_block += k + ": " + v + "\r\n";
    http_block += "\r\n";
    http_block += rec.payload;
    rec.warc_headers.emplace_back("Content-Length", std::to_string(http_block.size()));

    return serialize_warc(rec);
}

} // namespace

synth_archive write_synth_archive(const std::string& root, const synth_archive_config& cfg) {
    if (!is_crawl_id(cfg.crawl_id)) {
        throw config_error("synthetic archive needs a CC-MAIN-YYYY-WW id: " + cfg.crawl_id);
    }
    std::mt19937_64 rng(cfg.seed);
    word_bank target_bank = bank_for(cfg.target_language);

    // Archive-wide boilerplate pool: the duplicate fodder.
    std::vector<std::string> shared_pool;
    for (int i = 0; i < 6; ++i) shared_pool.push_back(make_paragraph(rng, target_bank));

    std::vector<synth_page> pages;
    auto add_pages = [&](int count, const std::string& primary,
                         std::vector<std::string> languages, bool annotated) {
        word_bank bank = bank_for(primary);
        for (int i = 0; i < count; ++i) {
            synth_page page;
            std::string slug = primary + "-" + std::to_string(pages.size());
            page.url = "https://" + primary + ".example.org/articles/" + slug;
            page.html = render_page_html(rng, bank,
                                         primary == cfg.target_language
                                             ? shared_pool
                                             : std::vector<std::string>{},
                                         cfg.shared_paragraph_probability, "Article " + slug,
                                         cfg.min_paragraphs, cfg.max_paragraphs);
            if (annotated) page.languages = languages;
            pages.push_back(std::move(page));
        }
    };

    add_pages(cfg.target_pages, cfg.target_language, {cfg.target_language}, true);
    add_pages(cfg.mixed_pages, cfg.target_language, {cfg.target_language, "eng"}, true);
    {
        int half = cfg.other_pages / 2;
        add_pages(half, "eng", {"eng"}, true);
        add_pages(cfg.other_pages - half, "fra", {"fra", "eng"}, true);
    }
    add_pages(cfg.unannotated_pages, "eng", {}, false);

    // Deterministic shuffle into "crawl order".
    std::shuffle(pages.begin(), pages.end(), rng);

    // WARC files: records appended as independent gzip members.
    const std::string date = "2023-03-20T01:02:03Z";
    std::string segment = "1680000000000.0";
    std::vector<std::string> warc_paths;
    std::vector<std::string> warc_blobs(static_cast<std::size_t>(cfg.warc_files));
    for (int i = 0; i < cfg.warc_files; ++i) {
        char name[128];
        std::snprintf(name, sizeof(name), "crawl-data/%s/segments/%s/warc/%s-%05d.warc.gz",
                      cfg.crawl_id.c_str(), segment.c_str(), cfg.crawl_id.c_str(), i);
        warc_paths.emplace_back(name);
    }

    synth_archive out;
    out.crawl_id = cfg.crawl_id;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const synth_page& page = pages[i];
        std::string record = warc_record_bytes(page, date);
        out.raw_record_bytes += record.size();
        std::string member = gzip_compress(record);
        std::size_t file_idx = i % warc_paths.size();
        index_record rec;
        rec.url = page.url;
        rec.crawl_id = cfg.crawl_id;
        rec.content_languages = page.languages;
        rec.warc_filename = warc_paths[file_idx];
        rec.warc_record_offset = static_cast<std::int64_t>(warc_blobs[file_idx].size());
        rec.warc_record_length = static_cast<std::int64_t>(member.size());
        rec.fetch_status = 200;
        warc_blobs[file_idx] += member;
        out.all_rows.push_back(std::move(rec));
    }

    for (std::size_t f = 0; f < warc_paths.size(); ++f) {
        fs::path path = fs::path(root) / warc_paths[f];
        fs::create_directories(path.parent_path());
        std::ofstream file(path, std::ios::binary);
        file << warc_blobs[f];
        if (!file) throw std::runtime_error("cannot write " + path.string());
    }

    // Index shards. Offset is INT64 and length INT32, mirroring the mix of
    // integer widths in the real table.
    std::vector<std::string> shard_paths;
    for (int s = 0; s < cfg.index_shards; ++s) {
        char name[160];
        std::snprintf(name, sizeof(name),
                      "cc-index/table/cc-main/warc/crawl=%s/subset=warc/part-%05d.gz.parquet",
                      cfg.crawl_id.c_str(), s);
        shard_paths.emplace_back(name);
    }
    std::vector<parquet_column_info> schema = {
        {"url", parquet_type::byte_array, false},
        {"content_languages", parquet_type::byte_array, true},
        {"warc_filename", parquet_type::byte_array, false},
        {"warc_record_offset", parquet_type::int64, false},
        {"warc_record_length", parquet_type::int32, false},
        {"fetch_status", parquet_type::int32, false},
    };
    for (int s = 0; s < cfg.index_shards; ++s) {
        fs::path path = fs::path(root) / shard_paths[static_cast<std::size_t>(s)];
        fs::create_directories(path.parent_path());
        parquet_writer_options opts;
        opts.codec = parquet_codec::gzip;
        parquet_writer writer(path.string(), schema, opts);
        std::vector<parquet_column_data> cols(schema.size());
        for (std::size_t c = 0; c < schema.size(); ++c) cols[c].type = schema[c].type;
        for (std::size_t i = static_cast<std::size_t>(s); i < out.all_rows.size();
             i += static_cast<std::size_t>(cfg.index_shards)) {
            const index_record& rec = out.all_rows[i];
            auto push = [&](std::size_t c, std::string sv, std::int64_t iv, bool present) {
                cols[c].present.push_back(present ? 1 : 0);
                cols[c].strs.push_back(std::move(sv));
                cols[c].ints.push_back(iv);
            };
            push(0, rec.url, 0, true);
            std::string langs;
            for (std::size_t k = 0; k < rec.content_languages.size(); ++k) {
                if (k > 0) langs += ',';
                langs += rec.content_languages[k];
            }
            push(1, langs, 0, !rec.content_languages.empty());
            push(2, rec.warc_filename, 0, true);
            push(3, "", rec.warc_record_offset, true);
            push(4, "", rec.warc_record_length, true);
            push(5, "", rec.fetch_status, true);
        }
        writer.write_row_group(cols);
        writer.finish();
    }

    // Shard listing, gzip-compressed like the endpoint serves it.
    {
        std::string listing;
        for (const auto& p : shard_paths) listing += p + "\n";
        fs::path path = fs::path(root) / "crawl-data" / cfg.crawl_id / "cc-index-table.paths.gz";
        fs::create_directories(path.parent_path());
        std::ofstream file(path, std::ios::binary);
        file << gzip_compress(listing);
        if (!file) throw std::runtime_error("cannot write " + path.string());
    }

    // Reference expectations via a single-threaded scan. fetch_status is
    // not among the five projected columns, so filtered rows carry 0.
    for (index_record rec : out.all_rows) {
        rec.fetch_status = 0;
        if (language_predicate(rec.content_languages, cfg.target_language, filter_mode::strict)) {
            out.expected_strict.push_back(rec);
        }
        if (language_predicate(rec.content_languages, cfg.target_language, filter_mode::lenient)) {
            out.expected_lenient.push_back(rec);
        }
    }
    auto locator_order = [](const index_record& a, const index_record& b) {
        if (a.warc_filename != b.warc_filename) return a.warc_filename < b.warc_filename;
        if (a.warc_record_offset != b.warc_record_offset) {
            return a.warc_record_offset < b.warc_record_offset;
        }
        return a.url < b.url;
    };
    std::sort(out.expected_strict.begin(), out.expected_strict.end(), locator_order);
    std::sort(out.expected_lenient.begin(), out.expected_lenient.end(), locator_order);
    return out;
}

// ---------------------------------------------------------------------------
// Mock server
// ---------------------------------------------------------------------------

struct mock_cc_server::impl {
    std::string root;
    httplib::Server server;
    std::thread thread;
};

mock_cc_server::mock_cc_server(std::string root) : impl_(std::make_unique<impl>()) {
    impl_->root = std::move(root);
}

mock_cc_server::~mock_cc_server() { stop(); }

std::string mock_cc_server::start(int port) {
    if (!impl_->server.set_mount_point("/", impl_->root)) {
        throw fatal_error("mock server: cannot mount " + impl_->root);
    }
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port("127.0.0.1");
    } else {
        port_ = impl_->server.bind_to_port("127.0.0.1", port) ? port : -1;
    }
    if (port_ <= 0) throw fatal_error("mock server: cannot bind port");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return "http://127.0.0.1:" + std::to_string(port_);
}

void mock_cc_server::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_ && impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

} // namespace unicrawl
