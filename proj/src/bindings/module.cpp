#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "unicrawl/byte_source.hpp"
#include "unicrawl/dedup.hpp"
#include "unicrawl/errors.hpp"
#include "unicrawl/extract.hpp"
#include "unicrawl/fetch.hpp"
#include "unicrawl/index.hpp"
#include "unicrawl/mockcc.hpp"
#include "unicrawl/parquet.hpp"
#include "unicrawl/pipeline.hpp"
#include "unicrawl/report.hpp"
#include "unicrawl/store.hpp"
#include "unicrawl/util.hpp"
#include "unicrawl/version.hpp"
#include "unicrawl/warc.hpp"

namespace py = pybind11;
using namespace unicrawl;

namespace {

filter_mode mode_from_string(const std::string& name) { return parse_filter_mode(name); }

py::dict record_to_dict(const index_record& rec) {
    py::dict d;
    d["url"] = rec.url;
    d["crawl"] = rec.crawl_id;
    d["languages"] = rec.content_languages;
    d["filename"] = rec.warc_filename;
    d["offset"] = rec.warc_record_offset;
    d["length"] = rec.warc_record_length;
    return d;
}

index_record record_from_dict(const py::dict& d) {
    index_record rec;
    rec.url = py::cast<std::string>(d["url"]);
    if (d.contains("crawl")) rec.crawl_id = py::cast<std::string>(d["crawl"]);
    if (d.contains("languages")) {
        rec.content_languages = py::cast<std::vector<std::string>>(d["languages"]);
    }
    rec.warc_filename = py::cast<std::string>(d["filename"]);
    rec.warc_record_offset = py::cast<std::int64_t>(d["offset"]);
    rec.warc_record_length = py::cast<std::int64_t>(d["length"]);
    return rec;
}

std::vector<document> docs_from_texts(const std::vector<std::string>& texts) {
    std::vector<document> docs;
    docs.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        document d;
        d.url = "doc://" + std::to_string(i);
        d.text = texts[i];
        d.char_len = utf8_length(d.text);
        d.id = document_id(d.url, d.text);
        docs.push_back(std::move(d));
    }
    return docs;
}

} // namespace

PYBIND11_MODULE(_unicrawl, m) {
    m.doc() = "Low-resource-language corpus extraction from web crawl archives";
    m.attr("__version__") = tool_version;

    // --- index filtering ---------------------------------------------------
    m.def(
        "language_predicate",
        [](const std::vector<std::string>& languages, const std::string& target,
           const std::string& mode) {
            return language_predicate(languages, target, mode_from_string(mode));
        },
        py::arg("languages"), py::arg("target"), py::arg("mode") = "strict",
        "True when the language list matches the target under strict or lenient rules");

    m.def("estimate_filtered_size", &estimate_filtered_size, py::arg("language_fraction"),
          py::arg("index_size_bytes"),
          "Expected filtered index size: fraction of the crawl times index size");

    m.def(
        "filter_index_parquet",
        [](const std::string& path, const std::string& target, const std::string& mode) {
            auto rows = filter_index_shard(make_file_source(path), "", target,
                                           mode_from_string(mode));
            py::list out;
            for (const auto& r : rows) out.append(record_to_dict(r));
            return out;
        },
        py::arg("path"), py::arg("target"), py::arg("mode") = "strict",
        "Filter one local columnar index shard, returning matching rows in file order");

    m.def(
        "read_index_parquet",
        [](const std::string& path) {
            parquet_reader reader(make_file_source(path));
            py::list out;
            for (std::size_t g = 0; g < reader.row_group_count(); ++g) {
                auto url = reader.read_column(g, "url");
                auto langs = reader.read_column(g, "content_languages");
                auto fname = reader.read_column(g, "warc_filename");
                auto off = reader.read_column(g, "warc_record_offset");
                auto len = reader.read_column(g, "warc_record_length");
                for (std::size_t r = 0; r < url.rows(); ++r) {
                    py::dict d;
                    d["url"] = url.strs[r];
                    d["languages"] = langs.present[r] ? py::object(py::cast(langs.strs[r]))
                                                      : py::object(py::none());
                    d["filename"] = fname.strs[r];
                    d["offset"] = off.ints[r];
                    d["length"] = len.ints[r];
                    out.append(std::move(d));
                }
            }
            return out;
        },
        py::arg("path"), "Read the locator columns of a local index shard (no filtering)");

    m.def(
        "write_index_parquet",
        [](const py::list& rows, const std::string& path, const std::string& codec) {
            std::vector<parquet_column_info> schema = {
                {"url", parquet_type::byte_array, false},
                {"content_languages", parquet_type::byte_array, true},
                {"warc_filename", parquet_type::byte_array, false},
                {"warc_record_offset", parquet_type::int64, false},
                {"warc_record_length", parquet_type::int32, false},
            };
            parquet_writer_options opts;
            if (codec == "gzip") opts.codec = parquet_codec::gzip;
            else if (codec == "snappy") opts.codec = parquet_codec::snappy;
            else if (codec == "none") opts.codec = parquet_codec::uncompressed;
            else throw config_error("codec must be gzip|snappy|none");
            parquet_writer writer(path, schema, opts);
            std::vector<parquet_column_data> cols(schema.size());
            for (std::size_t c = 0; c < schema.size(); ++c) cols[c].type = schema[c].type;
            for (const auto& item : rows) {
                py::dict d = py::cast<py::dict>(item);
                index_record rec = record_from_dict(d);
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
            }
            writer.write_row_group(cols);
            writer.finish();
        },
        py::arg("rows"), py::arg("path"), py::arg("codec") = "gzip",
        "Write index rows as a parquet shard (plain encoding)");

    // --- range requests ----------------------------------------------------
    m.def(
        "range_header",
        [](std::int64_t offset, std::int64_t length) {
            index_record rec;
            rec.url = "x";
            rec.warc_filename = "x";
            rec.warc_record_offset = offset;
            rec.warc_record_length = length;
            return build_range_request("http://h/", rec).header_value();
        },
        py::arg("offset"), py::arg("length"), "The Range header value for one WARC record");

    m.def(
        "range_url",
        [](const std::string& base, const std::string& filename) {
            index_record rec;
            rec.url = "x";
            rec.warc_filename = filename;
            rec.warc_record_offset = 0;
            rec.warc_record_length = 1;
            return build_range_request(base, rec).absolute_url;
        },
        py::arg("base"), py::arg("filename"), "Join of the endpoint base and a WARC path");

    // --- WARC --------------------------------------------------------------
    m.def(
        "decompress_member",
        [](const py::bytes& data) { return py::bytes(decompress_member(std::string(data))); },
        py::arg("data"), "Inflate the first gzip member of a fetched record");

    m.def(
        "parse_warc",
        [](const py::bytes& raw) {
            warc_record rec = parse_warc(std::string(raw));
            py::dict d;
            d["version"] = rec.warc_version;
            d["warc_headers"] = rec.warc_headers;
            d["http_status"] = rec.http_status;
            d["http_headers"] = rec.http_headers;
            d["payload"] = py::bytes(rec.payload);
            d["target_uri"] = rec.target_uri;
            d["date"] = rec.record_date;
            return d;
        },
        py::arg("raw"), "Parse a WARC record envelope and its embedded HTTP response");

    m.def(
        "extract_text",
        [](const std::string& html, const std::string& url, std::size_t min_block_chars,
           double max_link_density) -> py::object {
            html_page page;
            page.url = url;
            page.html = html;
            extract_config cfg;
            cfg.min_block_chars = min_block_chars;
            cfg.max_link_density = max_link_density;
            auto doc = extract_main_text(page, cfg);
            if (!doc) return py::none();
            return py::cast(doc->text);
        },
        py::arg("html"), py::arg("url") = "", py::arg("min_block_chars") = 25,
        py::arg("max_link_density") = 0.33,
        "Main text of an HTML page, boilerplate removed; None when nothing survives");

    m.def(
        "html_blocks",
        [](const std::string& html) {
            py::list out;
            for (const auto& b : html_to_blocks(std::string_view(html))) {
                py::dict d;
                d["text"] = b.text;
                d["tag_path"] = b.tag_path;
                d["link_density"] = b.link_density;
                d["char_count"] = b.char_count;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("html"), "Candidate text blocks with link densities");

    // --- dedup ---------------------------------------------------------
    m.def(
        "build_suffix_array",
        [](const py::bytes& data) {
            auto sa = build_suffix_array(std::string(data));
            return std::vector<std::uint32_t>(sa.begin(), sa.end());
        },
        py::arg("data"), "Suffix array of a byte buffer");

    m.def(
        "find_duplicate_spans",
        [](const std::vector<std::string>& texts, std::size_t min_len) {
            auto docs = docs_from_texts(texts);
            corpus c = build_corpus(docs);
            auto sa = build_suffix_array(c.buffer);
            auto spans = find_duplicate_spans(c, sa, min_len);
            // Spans as (doc_index, start, end) relative to each text.
            py::list out;
            std::size_t doc = 0;
            for (const auto& s : spans) {
                while (doc < c.boundaries.size() && c.boundaries[doc].end <= s.begin) ++doc;
                out.append(py::make_tuple(doc, s.begin - c.boundaries[doc].begin,
                                          s.end - c.boundaries[doc].begin));
            }
            return out;
        },
        py::arg("texts"), py::arg("min_len") = 50,
        "Byte ranges (doc, start, end) covered by non-first duplicate occurrences");

    m.def(
        "dedup_texts",
        [](const std::vector<std::string>& texts, std::size_t min_len, std::size_t min_chars) {
            dedup_config cfg;
            cfg.min_len = min_len;
            cfg.min_chars = min_chars;
            dedup_result r = dedup_stage(docs_from_texts(texts), cfg);
            std::vector<std::string> out;
            out.reserve(r.docs.size());
            for (auto& d : r.docs) out.push_back(std::move(d.text));
            return out;
        },
        py::arg("texts"), py::arg("min_len") = 50, py::arg("min_chars") = 100,
        "Exact-substring dedup then short-document filter over bare texts");

    // --- reporting -----------------------------------------------------
    m.def(
        "reduction_percent",
        [](std::uint64_t bytes_in, std::uint64_t bytes_out) {
            stage_stats s;
            s.stage = "stage";
            s.bytes_in = bytes_in;
            s.bytes_out = bytes_out;
            return reduction_percent(s);
        },
        py::arg("bytes_in"), py::arg("bytes_out"), "100 * (1 - out/in)");

    // --- fixtures ------------------------------------------------------
    m.def(
        "write_synth_archive",
        [](const std::string& root, const std::string& crawl_id, const std::string& lang,
           std::uint64_t seed) {
            synth_archive_config cfg;
            cfg.crawl_id = crawl_id;
            cfg.target_language = lang;
            cfg.seed = seed;
            synth_archive a = write_synth_archive(root, cfg);
            py::dict d;
            d["crawl_id"] = a.crawl_id;
            d["rows"] = a.all_rows.size();
            d["strict_matches"] = a.expected_strict.size();
            d["lenient_matches"] = a.expected_lenient.size();
            return d;
        },
        py::arg("root"), py::arg("crawl_id") = "CC-MAIN-2023-14", py::arg("lang") = "amh",
        py::arg("seed") = 42, "Generate one synthetic crawl archive under root");

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);
}
