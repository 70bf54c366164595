#include "unicrawl/warc.hpp"

#include <algorithm>
#include <cctype>

#include "unicrawl/errors.hpp"
#include "unicrawl/gzip.hpp"
#include "unicrawl/util.hpp"

namespace unicrawl {

std::string decompress_member(std::string_view compressed, const std::string& locator) {
    try {
        return gunzip_member(compressed);
    } catch (const parse_error& e) {
        std::string where = locator.empty() ? "record" : locator;
        throw parse_error("corrupt gzip member in " + where + ": " + e.what(), e.offset());
    }
}

std::string warc_record::warc_type() const {
    auto v = warc_header("WARC-Type");
    return v ? *v : std::string();
}

bool warc_record::is_response() const { return iequals(warc_type(), "response"); }

namespace {

std::optional<std::string> find_header(const header_list& headers, std::string_view name) {
    for (const auto& [k, v] : headers) {
        if (iequals(k, name)) return v;
    }
    return std::nullopt;
}

} // namespace

std::optional<std::string> warc_record::warc_header(std::string_view name) const {
    return find_header(warc_headers, name);
}

std::optional<std::string> warc_record::http_header(std::string_view name) const {
    return find_header(http_headers, name);
}

namespace {

// Reads a CRLF-terminated line; pos is left after the terminator.
std::string_view read_line(std::string_view raw, std::size_t& pos) {
    std::size_t eol = raw.find("\r\n", pos);
    if (eol == std::string_view::npos) {
        throw parse_error("missing CRLF line terminator", pos);
    }
    std::string_view line = raw.substr(pos, eol - pos);
    pos = eol + 2;
    return line;
}

header_list parse_header_block(std::string_view raw, std::size_t& pos) {
    header_list headers;
    while (true) {
        std::size_t line_start = pos;
        std::string_view line = read_line(raw, pos);
        if (line.empty()) break;
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0) {
            throw parse_error("malformed header line", line_start);
        }
        std::string name(line.substr(0, colon));
        // Field names are tokens; whitespace or control bytes mean the
        // line is broken, not a header.
        for (unsigned char ch : name) {
            if (ch <= ' ' || ch == 0x7F) {
                throw parse_error("malformed header name", line_start);
            }
        }
        std::string value = trim(line.substr(colon + 1));
        headers.emplace_back(std::move(name), std::move(value));
    }
    return headers;
}

} // namespace

warc_record parse_warc(std::string_view raw) {
    std::size_t pos = 0;
    std::string_view version = read_line(raw, pos);
    if (!version.starts_with("WARC/")) {
        throw parse_error("missing WARC version line", 0);
    }

    warc_record rec;
    rec.warc_version = std::string(version);
    rec.warc_headers = parse_header_block(raw, pos);

    if (!rec.warc_header("WARC-Type")) {
        throw parse_error("record has no WARC-Type header", pos);
    }
    auto content_length = rec.warc_header("Content-Length");
    if (!content_length) {
        throw parse_error("record has no Content-Length header", pos);
    }
    std::size_t block_len = 0;
    try {
        block_len = std::stoull(*content_length);
    } catch (const std::exception&) {
        throw parse_error("unparseable Content-Length: " + *content_length, pos);
    }
    if (pos + block_len > raw.size()) {
        throw parse_error("record truncated: declared block of " + std::to_string(block_len) +
                              " bytes exceeds available input",
                          raw.size());
    }
    std::string_view block = raw.substr(pos, block_len);
    std::size_t block_end = pos + block_len;
    if (raw.substr(block_end, 4) != "\r\n\r\n") {
        throw parse_error("record missing trailing CRLFCRLF", block_end);
    }

    if (auto uri = rec.warc_header("WARC-Target-URI")) rec.target_uri = *uri;
    if (auto date = rec.warc_header("WARC-Date")) rec.record_date = *date;

    auto content_type = rec.warc_header("Content-Type");
    bool http_block = content_type && to_lower(*content_type).find("application/http") !=
                                          std::string::npos;
    if (http_block && block.starts_with("HTTP/")) {
        std::size_t hpos = 0;
        std::string_view status_line = read_line(block, hpos);
        // "HTTP/1.1 200 OK"
        std::size_t sp1 = status_line.find(' ');
        if (sp1 == std::string_view::npos || sp1 + 4 > status_line.size()) {
            throw parse_error("malformed HTTP status line", pos);
        }
        int status = 0;
        for (std::size_t i = sp1 + 1; i < status_line.size() && std::isdigit(static_cast<unsigned char>(status_line[i])); ++i) {
            status = status * 10 + (status_line[i] - '0');
        }
        if (status < 100 || status > 999) {
            throw parse_error("unparseable HTTP status code", pos + sp1 + 1);
        }
        rec.http_status = status;
        rec.http_headers = parse_header_block(block, hpos);
        rec.payload = std::string(block.substr(hpos));
    } else {
        rec.http_status = 0;
        rec.payload = std::string(block);
    }
    return rec;
}

std::string serialize_warc(const warc_record& rec) {
    std::string out;
    out += rec.warc_version;
    out += "\r\n";
    for (const auto& [k, v] : rec.warc_headers) {
        out += k;
        out += ": ";
        out += v;
        out += "\r\n";
    }
    out += "\r\n";
    if (rec.http_status != 0) {
        // Reconstruct the HTTP block from the parsed pieces. The status
        // line reason phrase follows the canonical fixture form.
        std::string block = "HTTP/1.1 " + std::to_string(rec.http_status) + " " +
                            (rec.http_status == 200 ? "OK" : "Status") + "\r\n";
        for (const auto& [k, v] : rec.http_headers) {
            block += k;
            block += ": ";
            block += v;
            block += "\r\n";
        }
        block += "\r\n";
        block += rec.payload;
        out += block;
    } else {
        out += rec.payload;
    }
    out += "\r\n\r\n";
    return out;
}

std::string_view charset_source_name(charset_source s) {
    switch (s) {
    case charset_source::http_header: return "http-header";
    case charset_source::meta_tag: return "meta-tag";
    case charset_source::utf8_default: return "utf8-default";
    }
    return "utf8-default";
}

std::string_view skip_reason_name(skip_reason r) {
    switch (r) {
    case skip_reason::non_response: return "non_response";
    case skip_reason::non_http: return "non_http";
    case skip_reason::http_status: return "http_status";
    case skip_reason::content_type: return "content_type";
    case skip_reason::undecodable_body: return "undecodable_body";
    case skip_reason::binary_garbage: return "binary_garbage";
    }
    return "unknown";
}

std::string dechunk_http_body(std::string_view body) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        std::size_t eol = body.find("\r\n", pos);
        if (eol == std::string_view::npos) {
            throw parse_error("chunked body: missing size line", pos);
        }
        std::string_view size_token = body.substr(pos, eol - pos);
        // chunk extensions after ';' are ignored
        std::size_t semi = size_token.find(';');
        if (semi != std::string_view::npos) size_token = size_token.substr(0, semi);
        std::size_t chunk = 0;
        bool any = false;
        for (char c : size_token) {
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else if (c == ' ' || c == '\t') continue;
            else throw parse_error("chunked body: bad size digit", pos);
            chunk = chunk * 16 + static_cast<std::size_t>(d);
            any = true;
        }
        if (!any) throw parse_error("chunked body: empty size line", pos);
        pos = eol + 2;
        if (chunk == 0) break; // trailers, if any, are ignored
        if (pos + chunk > body.size()) {
            throw parse_error("chunked body: chunk past end", pos);
        }
        out.append(body.substr(pos, chunk));
        pos += chunk;
        if (body.substr(pos, 2) != "\r\n") {
            throw parse_error("chunked body: missing chunk terminator", pos);
        }
        pos += 2;
    }
    return out;
}

namespace {

std::optional<std::string> charset_from_content_type(std::string_view value) {
    std::string lower = to_lower(value);
    std::size_t pos = lower.find("charset=");
    if (pos == std::string::npos) return std::nullopt;
    pos += 8;
    std::size_t end = pos;
    while (end < lower.size() && lower[end] != ';' && lower[end] != ' ' && lower[end] != '"' &&
           lower[end] != '\'') {
        ++end;
    }
    std::string cs = lower.substr(pos, end - pos);
    // strip quotes around the opening position too
    if (!cs.empty() && (cs.front() == '"' || cs.front() == '\'')) cs.erase(cs.begin());
    if (cs.empty()) return std::nullopt;
    return cs;
}

enum class known_charset { utf8, latin1, windows1252, unknown };

known_charset classify_charset(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "utf-8" || n == "utf8" || n == "us-ascii" || n == "ascii") return known_charset::utf8;
    if (n == "iso-8859-1" || n == "latin-1" || n == "latin1" || n == "iso8859-1") {
        return known_charset::latin1;
    }
    if (n == "windows-1252" || n == "cp1252" || n == "cp-1252") return known_charset::windows1252;
    return known_charset::unknown;
}

} // namespace

std::optional<std::string> find_meta_charset(std::string_view html_prefix) {
    std::string lower = to_lower(html_prefix);
    // <meta charset="..."> or <meta http-equiv=... content="...; charset=...">
    std::size_t pos = 0;
    while ((pos = lower.find("<meta", pos)) != std::string::npos) {
        std::size_t end = lower.find('>', pos);
        if (end == std::string::npos) end = lower.size();
        std::string_view tag(lower.data() + pos, end - pos);
        std::size_t cs = tag.find("charset=");
        if (cs != std::string_view::npos) {
            cs += 8;
            while (cs < tag.size() && (tag[cs] == '"' || tag[cs] == '\'' || tag[cs] == ' ')) ++cs;
            std::size_t stop = cs;
            while (stop < tag.size() && tag[stop] != '"' && tag[stop] != '\'' &&
                   tag[stop] != ' ' && tag[stop] != ';' && tag[stop] != '/' && tag[stop] != '>') {
                ++stop;
            }
            if (stop > cs) return std::string(tag.substr(cs, stop - cs));
        }
        pos = end;
    }
    return std::nullopt;
}

decode_outcome decode_html(const warc_record& record, const decode_options& opts) {
    decode_outcome out;
    if (!record.is_response()) {
        out.skipped = skip_reason::non_response;
        return out;
    }
    if (record.http_status == 0) {
        out.skipped = skip_reason::non_http;
        return out;
    }
    if (record.http_status < 200 || record.http_status > 299) {
        out.skipped = skip_reason::http_status;
        return out;
    }
    auto content_type = record.http_header("Content-Type");
    if (content_type) {
        std::string lower = to_lower(*content_type);
        if (lower.find("text/html") == std::string::npos &&
            lower.find("application/xhtml") == std::string::npos) {
            out.skipped = skip_reason::content_type;
            return out;
        }
    }
    // Missing Content-Type is treated as HTML; crawls predominantly fetch pages.

    std::string body = record.payload;
    try {
        if (auto te = record.http_header("Transfer-Encoding")) {
            if (to_lower(*te).find("chunked") != std::string::npos) {
                body = dechunk_http_body(body);
            }
        }
        if (auto ce = record.http_header("Content-Encoding")) {
            std::string enc = to_lower(trim(*ce));
            if (enc == "gzip" || enc == "x-gzip") {
                body = gunzip_all(body);
            } else if (!enc.empty() && enc != "identity") {
                out.skipped = skip_reason::undecodable_body;
                return out;
            }
        }
    } catch (const parse_error&) {
        out.skipped = skip_reason::undecodable_body;
        return out;
    }

    // Charset cascade.
    known_charset cs = known_charset::unknown;
    charset_source source = charset_source::utf8_default;
    if (content_type) {
        if (auto name = charset_from_content_type(*content_type)) {
            known_charset k = classify_charset(*name);
            if (k != known_charset::unknown) {
                cs = k;
                source = charset_source::http_header;
            }
        }
    }
    if (cs == known_charset::unknown) {
        if (auto name = find_meta_charset(std::string_view(body).substr(0, 1024))) {
            known_charset k = classify_charset(*name);
            if (k != known_charset::unknown) {
                cs = k;
                source = charset_source::meta_tag;
            }
        }
    }

    html_page page;
    page.url = record.target_uri;
    page.crawl_id = opts.crawl_id;
    page.record_date = record.record_date;
    page.charset = source;
    switch (cs) {
    case known_charset::latin1:
        page.html = latin1_to_utf8(body);
        break;
    case known_charset::windows1252:
        page.html = windows1252_to_utf8(body);
        break;
    case known_charset::utf8:
    case known_charset::unknown:
        page.html = sanitize_utf8(body, &page.replaced_bytes);
        break;
    }

    if (page.replaced_bytes > 0) {
        std::size_t scalars = utf8_length(page.html);
        if (scalars > 0 &&
            static_cast<double>(page.replaced_bytes) >
                opts.max_replacement_ratio * static_cast<double>(scalars)) {
            out.skipped = skip_reason::binary_garbage;
            return out;
        }
    }

    out.page = std::move(page);
    return out;
}

} // namespace unicrawl
