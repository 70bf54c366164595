#include "unicrawl/extract.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "unicrawl/util.hpp"

namespace unicrawl {

namespace {

const std::unordered_set<std::string_view> kBlockTags = {
    "address", "article", "aside", "blockquote", "body", "br", "caption", "dd", "div",
    "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hr", "html", "li", "main", "nav", "ol", "option", "p",
    "pre", "section", "select", "table", "tbody", "td", "tfoot", "th", "thead", "title",
    "tr", "ul",
};

const std::unordered_set<std::string_view> kExcludedContainers = {
    "nav", "header", "footer", "aside",
};

// Content skipped wholesale up to the matching close tag.
const std::unordered_set<std::string_view> kRawTextTags = {
    "script", "style", "noscript", "template", "textarea",
};

const std::unordered_set<std::string_view> kVoidTags = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
};

const std::unordered_map<std::string_view, std::uint32_t> kNamedEntities = {
    {"amp", '&'},   {"lt", '<'},     {"gt", '>'},    {"quot", '"'},  {"apos", '\''},
    {"nbsp", ' '},  {"copy", 0xA9},  {"reg", 0xAE},  {"trade", 0x2122},
    {"mdash", 0x2014}, {"ndash", 0x2013}, {"hellip", 0x2026}, {"laquo", 0xAB},
    {"raquo", 0xBB}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
    {"rdquo", 0x201D}, {"bull", 0x2022}, {"middot", 0xB7}, {"times", 0xD7},
    {"shy", 0xAD},
};

void append_codepoint(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

struct tag_token {
    std::string name;
    bool closing = false;
    bool self_closing = false;
};

// Parses a tag at html[pos] (which is '<'). Returns false when the '<' is
// not actually a tag, in which case it is literal text.
bool parse_tag(std::string_view html, std::size_t& pos, tag_token& tag) {
    std::size_t i = pos + 1;
    if (i >= html.size()) return false;
    char c = html[i];
    if (c == '/') {
        tag.closing = true;
        ++i;
        if (i >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i]))) return false;
    } else if (!std::isalpha(static_cast<unsigned char>(c))) {
        return false;
    }
    tag.name.clear();
    while (i < html.size() &&
           (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-' || html[i] == ':')) {
        tag.name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(html[i]))));
        ++i;
    }
    // Attributes: scan to '>', honoring quoted values.
    char quote = 0;
    bool slash_before_close = false;
    while (i < html.size()) {
        char a = html[i];
        if (quote) {
            if (a == quote) quote = 0;
        } else if (a == '"' || a == '\'') {
            quote = a;
            slash_before_close = false;
        } else if (a == '>') {
            tag.self_closing = slash_before_close;
            pos = i + 1;
            return true;
        } else if (a == '/') {
            slash_before_close = true;
        } else if (!std::isspace(static_cast<unsigned char>(a))) {
            slash_before_close = false;
        }
        ++i;
    }
    // Unterminated tag at end of input: swallow the rest.
    pos = html.size();
    return true;
}

std::uint32_t decode_numeric_entity(std::string_view body) {
    std::uint32_t cp = 0;
    if (!body.empty() && (body[0] == 'x' || body[0] == 'X')) {
        for (char c : body.substr(1)) {
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else return 0;
            cp = cp * 16 + static_cast<std::uint32_t>(d);
            if (cp > 0x10FFFF) return 0xFFFD;
        }
        return body.size() > 1 ? cp : 0;
    }
    for (char c : body) {
        if (c < '0' || c > '9') return 0;
        cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
        if (cp > 0x10FFFF) return 0xFFFD;
    }
    return body.empty() ? 0 : cp;
}

class block_builder {
public:
    explicit block_builder(std::vector<text_block>& out) : out_(out) {}

    void set_tag_path(std::string path) { pending_path_ = std::move(path); }

    void add_char(std::uint32_t cp, bool anchored) {
        if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0 || cp == 0x0C) {
            space_pending_ = !text_.empty();
            return;
        }
        if (space_pending_) {
            text_.push_back(' ');
            ++total_;
            anchored_ += anchored ? 1 : 0;
            space_pending_ = false;
        }
        if (text_.empty()) path_ = pending_path_;
        // Escaped markup is defanged: no '<'+letter byte pair survives
        // into extracted text.
        if (!text_.empty() && text_.back() == '<' &&
            (cp == '/' || (cp < 0x80 && std::isalpha(static_cast<int>(cp))))) {
            text_.push_back(' ');
            ++total_;
        }
        append_codepoint(text_, cp);
        ++total_;
        if (anchored) ++anchored_;
    }

    void add_text(std::string_view utf8, bool anchored) {
        std::size_t i = 0;
        while (i < utf8.size()) {
            unsigned char c = static_cast<unsigned char>(utf8[i]);
            if (c < 0x80) {
                add_char(c, anchored);
                ++i;
                continue;
            }
            // Pass multi-byte sequences through whole; input is already
            // valid UTF-8 by the time extraction runs.
            std::size_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
            len = std::min(len, utf8.size() - i);
            if (space_pending_) {
                text_.push_back(' ');
                ++total_;
                anchored_ += anchored ? 1 : 0;
                space_pending_ = false;
            }
            if (text_.empty()) path_ = pending_path_;
            text_.append(utf8.substr(i, len));
            ++total_;
            if (anchored) ++anchored_;
            i += len;
        }
    }

    void flush() {
        while (!text_.empty() && text_.back() == ' ') {
            text_.pop_back();
            --total_;
        }
        if (!text_.empty()) {
            text_block b;
            b.char_count = utf8_length(text_);
            b.link_density = total_ == 0 ? 0.0
                                         : static_cast<double>(anchored_) /
                                               static_cast<double>(total_);
            b.text = std::move(text_);
            b.tag_path = path_;
            out_.push_back(std::move(b));
        }
        text_.clear();
        total_ = 0;
        anchored_ = 0;
        space_pending_ = false;
    }

private:
    std::vector<text_block>& out_;
    std::string text_;
    std::string path_;
    std::string pending_path_;
    std::size_t total_ = 0;    // scalar values incl. collapsed spaces
    std::size_t anchored_ = 0; // scalar values inside <a>
    bool space_pending_ = false;
};

} // namespace

std::vector<text_block> html_to_blocks(std::string_view html) {
    std::vector<text_block> blocks;
    block_builder builder(blocks);

    std::vector<std::string> stack; // structural tags for tag_path
    int excluded_depth = 0;
    int anchor_depth = 0;

    auto current_path = [&] {
        std::string p;
        for (const auto& t : stack) {
            if (!p.empty()) p += '/';
            p += t;
        }
        return p;
    };
    builder.set_tag_path("");

    std::size_t pos = 0;
    const std::size_t n = html.size();
    while (pos < n) {
        char c = html[pos];
        if (c == '<') {
            // Comments and declarations.
            if (html.compare(pos, 4, "<!--") == 0) {
                std::size_t end = html.find("-->", pos + 4);
                pos = end == std::string_view::npos ? n : end + 3;
                continue;
            }
            if (pos + 1 < n && (html[pos + 1] == '!' || html[pos + 1] == '?')) {
                std::size_t end = html.find('>', pos);
                pos = end == std::string_view::npos ? n : end + 1;
                continue;
            }
            tag_token tag;
            std::size_t tag_pos = pos;
            if (!parse_tag(html, tag_pos, tag)) {
                // Literal '<' (e.g. "a < b"): safe because the next char
                // is not a letter or '/'.
                builder.add_char('<', anchor_depth > 0);
                ++pos;
                continue;
            }
            pos = tag_pos;

            if (!tag.closing && !tag.self_closing && kRawTextTags.contains(tag.name)) {
                // Skip to the matching close tag, case-insensitive.
                std::string close = "</" + tag.name;
                std::size_t found = std::string_view::npos;
                for (std::size_t i = pos; i + close.size() <= n; ++i) {
                    bool match = true;
                    for (std::size_t k = 0; k < close.size(); ++k) {
                        if (std::tolower(static_cast<unsigned char>(html[i + k])) != close[k]) {
                            match = false;
                            break;
                        }
                    }
                    if (match) {
                        found = i;
                        break;
                    }
                }
                if (found == std::string_view::npos) {
                    pos = n;
                } else {
                    std::size_t gt = html.find('>', found);
                    pos = gt == std::string_view::npos ? n : gt + 1;
                }
                continue;
            }

            bool block_boundary = kBlockTags.contains(tag.name);
            if (block_boundary) builder.flush();

            if (tag.name == "a") {
                if (tag.closing) {
                    if (anchor_depth > 0) --anchor_depth;
                } else if (!tag.self_closing) {
                    ++anchor_depth;
                }
            }

            if (kExcludedContainers.contains(tag.name)) {
                if (tag.closing) {
                    if (excluded_depth > 0) --excluded_depth;
                } else if (!tag.self_closing) {
                    ++excluded_depth;
                }
            }

            if (block_boundary && !kVoidTags.contains(tag.name)) {
                if (tag.closing) {
                    if (!stack.empty()) stack.pop_back();
                } else if (!tag.self_closing) {
                    stack.push_back(tag.name);
                }
                builder.set_tag_path(current_path());
            }
            continue;
        }
        if (c == '&') {
            std::size_t semi = html.find(';', pos + 1);
            if (semi != std::string_view::npos && semi - pos <= 12) {
                std::string_view body = html.substr(pos + 1, semi - pos - 1);
                std::uint32_t cp = 0;
                if (!body.empty() && body[0] == '#') {
                    cp = decode_numeric_entity(body.substr(1));
                } else if (auto it = kNamedEntities.find(body); it != kNamedEntities.end()) {
                    cp = it->second;
                }
                if (cp != 0) {
                    if (excluded_depth == 0) builder.add_char(cp, anchor_depth > 0);
                    pos = semi + 1;
                    continue;
                }
            }
            if (excluded_depth == 0) builder.add_char('&', anchor_depth > 0);
            ++pos;
            continue;
        }
        // Plain text run up to the next special character.
        std::size_t next = html.find_first_of("<&", pos);
        if (next == std::string_view::npos) next = n;
        if (excluded_depth == 0) {
            builder.add_text(html.substr(pos, next - pos), anchor_depth > 0);
        }
        pos = next;
    }
    builder.flush();
    return blocks;
}

std::vector<text_block> html_to_blocks(const html_page& page) {
    return html_to_blocks(std::string_view(page.html));
}

std::optional<document> extract_main_text(const html_page& page, const extract_config& cfg) {
    std::vector<text_block> blocks = html_to_blocks(page);
    std::string text;
    for (const auto& b : blocks) {
        if (b.char_count < cfg.min_block_chars) continue;
        if (b.link_density > cfg.max_link_density) continue;
        if (!text.empty()) text.push_back('\n');
        text.append(b.text);
    }
    if (text.empty()) return std::nullopt;

    document doc;
    doc.url = page.url;
    doc.crawl_id = page.crawl_id;
    doc.record_date = page.record_date;
    doc.text = std::move(text);
    doc.char_len = utf8_length(doc.text);
    doc.id = document_id(doc.url, doc.text);
    return doc;
}

} // namespace unicrawl
