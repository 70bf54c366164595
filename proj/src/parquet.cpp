#include "unicrawl/parquet.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>

#include "unicrawl/errors.hpp"
#include "unicrawl/gzip.hpp"

namespace unicrawl {

namespace {

// ---------------------------------------------------------------------------
// Thrift compact protocol, just enough for parquet metadata.
// ---------------------------------------------------------------------------

enum : std::uint8_t {
    CT_STOP = 0,
    CT_TRUE = 1,
    CT_FALSE = 2,
    CT_I8 = 3,
    CT_I16 = 4,
    CT_I32 = 5,
    CT_I64 = 6,
    CT_DOUBLE = 7,
    CT_BINARY = 8,
    CT_LIST = 9,
    CT_SET = 10,
    CT_MAP = 11,
    CT_STRUCT = 12,
};

class compact_reader {
public:
    compact_reader(std::string_view data, std::size_t pos = 0) : buf_(data), pos_(pos) {}

    std::size_t pos() const { return pos_; }

    std::uint8_t byte() {
        if (pos_ >= buf_.size()) throw parse_error("thrift: unexpected end", pos_);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }

    std::uint64_t varint() {
        std::uint64_t v = 0;
        int shift = 0;
        while (true) {
            std::uint8_t b = byte();
            v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
            if (!(b & 0x80)) return v;
            shift += 7;
            if (shift > 63) throw parse_error("thrift: varint overflow", pos_);
        }
    }

    std::int64_t zigzag() {
        std::uint64_t v = varint();
        return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
    }

    std::string_view binary() {
        std::uint64_t len = varint();
        if (pos_ + len > buf_.size()) throw parse_error("thrift: binary past end", pos_);
        std::string_view out = buf_.substr(pos_, len);
        pos_ += len;
        return out;
    }

    struct field {
        std::uint8_t type = CT_STOP;
        std::int16_t id = 0;
        bool bool_value = false;
    };

    // One struct's field iteration; nested structs need their own
    // last-id bookkeeping, handled by begin/end below.
    bool next_field(field& f) {
        std::uint8_t head = byte();
        if (head == CT_STOP) return false;
        std::uint8_t delta = head >> 4;
        f.type = head & 0x0F;
        if (delta == 0) {
            f.id = static_cast<std::int16_t>(zigzag());
        } else {
            f.id = static_cast<std::int16_t>(last_id_ + delta);
        }
        last_id_ = f.id;
        f.bool_value = f.type == CT_TRUE;
        return true;
    }

    std::int16_t begin_struct() {
        std::int16_t saved = last_id_;
        last_id_ = 0;
        return saved;
    }
    void end_struct(std::int16_t saved) { last_id_ = saved; }

    struct list_header {
        std::uint8_t elem_type = 0;
        std::uint32_t size = 0;
    };

    list_header read_list() {
        std::uint8_t head = byte();
        list_header h;
        h.elem_type = head & 0x0F;
        h.size = head >> 4;
        if (h.size == 15) h.size = static_cast<std::uint32_t>(varint());
        return h;
    }

    void skip(std::uint8_t type) {
        switch (type) {
        case CT_TRUE:
        case CT_FALSE:
            return; // value lives in the field header
        case CT_I8:
            byte();
            return;
        case CT_I16:
        case CT_I32:
        case CT_I64:
            varint();
            return;
        case CT_DOUBLE:
            pos_ += 8;
            if (pos_ > buf_.size()) throw parse_error("thrift: double past end", pos_);
            return;
        case CT_BINARY:
            binary();
            return;
        case CT_LIST:
        case CT_SET: {
            list_header h = read_list();
            for (std::uint32_t i = 0; i < h.size; ++i) skip_element(h.elem_type);
            return;
        }
        case CT_MAP: {
            std::uint64_t size = varint();
            if (size == 0) return;
            std::uint8_t kv = byte();
            for (std::uint64_t i = 0; i < size; ++i) {
                skip_element(kv >> 4);
                skip_element(kv & 0x0F);
            }
            return;
        }
        case CT_STRUCT: {
            std::int16_t saved = begin_struct();
            field f;
            while (next_field(f)) skip(f.type);
            end_struct(saved);
            return;
        }
        default:
            throw parse_error("thrift: unknown type " + std::to_string(type), pos_);
        }
    }

    void skip_element(std::uint8_t type) {
        // List/set/map elements encode bools as one byte.
        if (type == CT_TRUE || type == CT_FALSE) {
            byte();
            return;
        }
        skip(type);
    }

private:
    std::string_view buf_;
    std::size_t pos_ = 0;
    std::int16_t last_id_ = 0;
};

class compact_writer {
public:
    std::string take() { return std::move(out_); }

    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            out_.push_back(static_cast<char>((v & 0x7F) | 0x80));
            v >>= 7;
        }
        out_.push_back(static_cast<char>(v));
    }

    void zigzag(std::int64_t v) {
        varint((static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63));
    }

    void field_header(std::int16_t id, std::uint8_t type) {
        std::int16_t delta = static_cast<std::int16_t>(id - last_id_);
        if (delta > 0 && delta <= 15) {
            out_.push_back(static_cast<char>((delta << 4) | type));
        } else {
            out_.push_back(static_cast<char>(type));
            zigzag(id);
        }
        last_id_ = id;
    }

    void field_i32(std::int16_t id, std::int32_t v) {
        field_header(id, CT_I32);
        zigzag(v);
    }
    void field_i64(std::int16_t id, std::int64_t v) {
        field_header(id, CT_I64);
        zigzag(v);
    }
    void field_binary(std::int16_t id, std::string_view v) {
        field_header(id, CT_BINARY);
        varint(v.size());
        out_.append(v);
    }
    void field_bool(std::int16_t id, bool v) { field_header(id, v ? CT_TRUE : CT_FALSE); }

    void field_list(std::int16_t id, std::uint8_t elem_type, std::uint32_t size) {
        field_header(id, CT_LIST);
        if (size < 15) {
            out_.push_back(static_cast<char>((size << 4) | elem_type));
        } else {
            out_.push_back(static_cast<char>(0xF0 | elem_type));
            varint(size);
        }
    }

    std::int16_t begin_struct_field(std::int16_t id) {
        field_header(id, CT_STRUCT);
        std::int16_t saved = last_id_;
        last_id_ = 0;
        return saved;
    }
    // For struct list elements (no field header).
    std::int16_t begin_struct_element() {
        std::int16_t saved = last_id_;
        last_id_ = 0;
        return saved;
    }
    void end_struct(std::int16_t saved) {
        out_.push_back(static_cast<char>(CT_STOP));
        last_id_ = saved;
    }

    void raw_list_elem_i32(std::int32_t v) { zigzag(v); }
    void raw_binary_elem(std::string_view v) {
        varint(v.size());
        out_.append(v);
    }

private:
    std::string out_;
    std::int16_t last_id_ = 0;
};

// ---------------------------------------------------------------------------
// Snappy block format.
// ---------------------------------------------------------------------------

std::string snappy_decompress(std::string_view in, std::size_t expected_size) {
    std::size_t pos = 0;
    auto need = [&](std::size_t k) {
        if (pos + k > in.size()) throw parse_error("snappy: truncated input", pos);
    };
    std::uint64_t out_len = 0;
    int shift = 0;
    while (true) {
        need(1);
        std::uint8_t b = static_cast<std::uint8_t>(in[pos++]);
        out_len |= static_cast<std::uint64_t>(b & 0x7F) << shift;
        if (!(b & 0x80)) break;
        shift += 7;
        if (shift > 35) throw parse_error("snappy: bad length", pos);
    }
    std::string out;
    out.reserve(out_len);
    while (pos < in.size()) {
        std::uint8_t tag = static_cast<std::uint8_t>(in[pos++]);
        std::uint32_t len;
        std::uint32_t offset = 0;
        switch (tag & 3) {
        case 0: { // literal
            len = (tag >> 2) + 1;
            if (len > 60) {
                std::uint32_t extra = len - 60;
                need(extra);
                len = 0;
                for (std::uint32_t i = 0; i < extra; ++i) {
                    len |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + i])) << (8 * i);
                }
                pos += extra;
                ++len;
            }
            need(len);
            out.append(in.substr(pos, len));
            pos += len;
            continue;
        }
        case 1:
            len = ((tag >> 2) & 0x7) + 4;
            need(1);
            offset = (static_cast<std::uint32_t>(tag >> 5) << 8) |
                     static_cast<std::uint8_t>(in[pos++]);
            break;
        case 2:
            len = (tag >> 2) + 1;
            need(2);
            offset = static_cast<std::uint8_t>(in[pos]) |
                     (static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + 1])) << 8);
            pos += 2;
            break;
        default:
            len = (tag >> 2) + 1;
            need(4);
            offset = static_cast<std::uint8_t>(in[pos]) |
                     (static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + 1])) << 8) |
                     (static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + 2])) << 16) |
                     (static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + 3])) << 24);
            pos += 4;
            break;
        }
        if (offset == 0 || offset > out.size()) throw parse_error("snappy: bad copy offset", pos);
        // Copies may overlap their own output.
        std::size_t from = out.size() - offset;
        for (std::uint32_t i = 0; i < len; ++i) out.push_back(out[from + i]);
    }
    if (out.size() != out_len || out.size() != expected_size) {
        throw parse_error("snappy: size mismatch", pos);
    }
    return out;
}

std::string snappy_compress(std::string_view in) {
    // All-literal encoding: valid snappy, zero compression. Fine for a
    // writer whose compressing codec of choice is gzip.
    std::string out;
    std::uint64_t len = in.size();
    while (len >= 0x80) {
        out.push_back(static_cast<char>((len & 0x7F) | 0x80));
        len >>= 7;
    }
    out.push_back(static_cast<char>(len));
    std::size_t pos = 0;
    while (pos < in.size()) {
        std::size_t chunk = std::min<std::size_t>(in.size() - pos, 0xFFFFFFFFull);
        std::uint32_t n = static_cast<std::uint32_t>(chunk - 1);
        out.push_back(static_cast<char>((60 << 2) | 0)); // literal, 1 length byte follows
        // use the smallest length-byte form that fits
        if (n < 60) {
            out.back() = static_cast<char>(n << 2);
        } else if (n <= 0xFF) {
            out.back() = static_cast<char>(60 << 2);
            out.push_back(static_cast<char>(n));
        } else if (n <= 0xFFFF) {
            out.back() = static_cast<char>(61 << 2);
            out.push_back(static_cast<char>(n & 0xFF));
            out.push_back(static_cast<char>(n >> 8));
        } else {
            out.back() = static_cast<char>(63 << 2);
            out.push_back(static_cast<char>(n & 0xFF));
            out.push_back(static_cast<char>((n >> 8) & 0xFF));
            out.push_back(static_cast<char>((n >> 16) & 0xFF));
            out.push_back(static_cast<char>((n >> 24) & 0xFF));
        }
        out.append(in.substr(pos, chunk));
        pos += chunk;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parquet metadata model.
// ---------------------------------------------------------------------------

enum : std::int32_t {
    ENC_PLAIN = 0,
    ENC_PLAIN_DICTIONARY = 2,
    ENC_RLE = 3,
    ENC_RLE_DICTIONARY = 8,
};

enum : std::int32_t {
    CODEC_UNCOMPRESSED = 0,
    CODEC_SNAPPY = 1,
    CODEC_GZIP = 2,
};

enum : std::int32_t {
    PAGE_DATA = 0,
    PAGE_INDEX = 1,
    PAGE_DICTIONARY = 2,
    PAGE_DATA_V2 = 3,
};

struct schema_element {
    std::optional<std::int32_t> type;
    std::int32_t repetition = 0; // 0 required, 1 optional, 2 repeated
    std::string name;
    std::int32_t num_children = 0;
};

struct column_meta {
    std::int32_t type = 0;
    std::vector<std::string> path;
    std::int32_t codec = 0;
    std::int64_t num_values = 0;
    std::int64_t total_compressed = 0;
    std::int64_t data_page_offset = -1;
    std::int64_t dict_page_offset = -1;
};

struct row_group_meta {
    std::vector<column_meta> columns;
    std::int64_t num_rows = 0;
};

struct file_meta {
    std::vector<schema_element> schema;
    std::int64_t num_rows = 0;
    std::vector<row_group_meta> row_groups;
};

schema_element parse_schema_element(compact_reader& r) {
    schema_element e;
    std::int16_t s = r.begin_struct();
    compact_reader::field f;
    while (r.next_field(f)) {
        switch (f.id) {
        case 1: e.type = static_cast<std::int32_t>(r.zigzag()); break;
        case 3: e.repetition = static_cast<std::int32_t>(r.zigzag()); break;
        case 4: e.name = std::string(r.binary()); break;
        case 5: e.num_children = static_cast<std::int32_t>(r.zigzag()); break;
        default: r.skip(f.type); break;
        }
    }
    r.end_struct(s);
    return e;
}

column_meta parse_column_meta(compact_reader& r) {
    column_meta m;
    std::int16_t s = r.begin_struct();
    compact_reader::field f;
    while (r.next_field(f)) {
        switch (f.id) {
        case 1: m.type = static_cast<std::int32_t>(r.zigzag()); break;
        case 3: {
            auto h = r.read_list();
            for (std::uint32_t i = 0; i < h.size; ++i) m.path.emplace_back(r.binary());
            break;
        }
        case 4: m.codec = static_cast<std::int32_t>(r.zigzag()); break;
        case 5: m.num_values = r.zigzag(); break;
        case 7: m.total_compressed = r.zigzag(); break;
        case 9: m.data_page_offset = r.zigzag(); break;
        case 11: m.dict_page_offset = r.zigzag(); break;
        default: r.skip(f.type); break;
        }
    }
    r.end_struct(s);
    return m;
}

row_group_meta parse_row_group(compact_reader& r) {
    row_group_meta g;
    std::int16_t s = r.begin_struct();
    compact_reader::field f;
    while (r.next_field(f)) {
        switch (f.id) {
        case 1: {
            auto h = r.read_list();
            for (std::uint32_t i = 0; i < h.size; ++i) {
                std::int16_t cs = r.begin_struct();
                compact_reader::field cf;
                column_meta m;
                while (r.next_field(cf)) {
                    if (cf.id == 3 && cf.type == CT_STRUCT) {
                        m = parse_column_meta(r);
                    } else {
                        r.skip(cf.type);
                    }
                }
                r.end_struct(cs);
                g.columns.push_back(std::move(m));
            }
            break;
        }
        case 3: g.num_rows = r.zigzag(); break;
        default: r.skip(f.type); break;
        }
    }
    r.end_struct(s);
    return g;
}

file_meta parse_file_meta(std::string_view bytes) {
    compact_reader r(bytes);
    file_meta meta;
    std::int16_t s = r.begin_struct();
    compact_reader::field f;
    while (r.next_field(f)) {
        switch (f.id) {
        case 2: {
            auto h = r.read_list();
            for (std::uint32_t i = 0; i < h.size; ++i) meta.schema.push_back(parse_schema_element(r));
            break;
        }
        case 3: meta.num_rows = r.zigzag(); break;
        case 4: {
            auto h = r.read_list();
            for (std::uint32_t i = 0; i < h.size; ++i) meta.row_groups.push_back(parse_row_group(r));
            break;
        }
        default: r.skip(f.type); break;
        }
    }
    r.end_struct(s);
    return meta;
}

struct page_header {
    std::int32_t type = 0;
    std::int32_t uncompressed_size = 0;
    std::int32_t compressed_size = 0;
    std::int32_t num_values = 0;
    std::int32_t encoding = ENC_PLAIN;
    // v2 only
    std::int32_t num_nulls = 0;
    std::int32_t def_bytes = 0;
    std::int32_t rep_bytes = 0;
    bool v2_compressed = true;
};

page_header parse_page_header(compact_reader& r) {
    page_header h;
    std::int16_t s = r.begin_struct();
    compact_reader::field f;
    while (r.next_field(f)) {
        switch (f.id) {
        case 1: h.type = static_cast<std::int32_t>(r.zigzag()); break;
        case 2: h.uncompressed_size = static_cast<std::int32_t>(r.zigzag()); break;
        case 3: h.compressed_size = static_cast<std::int32_t>(r.zigzag()); break;
        case 5: { // DataPageHeader
            std::int16_t ds = r.begin_struct();
            compact_reader::field df;
            while (r.next_field(df)) {
                switch (df.id) {
                case 1: h.num_values = static_cast<std::int32_t>(r.zigzag()); break;
                case 2: h.encoding = static_cast<std::int32_t>(r.zigzag()); break;
                default: r.skip(df.type); break;
                }
            }
            r.end_struct(ds);
            break;
        }
        case 7: { // DictionaryPageHeader
            std::int16_t ds = r.begin_struct();
            compact_reader::field df;
            while (r.next_field(df)) {
                switch (df.id) {
                case 1: h.num_values = static_cast<std::int32_t>(r.zigzag()); break;
                case 2: h.encoding = static_cast<std::int32_t>(r.zigzag()); break;
                default: r.skip(df.type); break;
                }
            }
            r.end_struct(ds);
            break;
        }
        case 8: { // DataPageHeaderV2
            std::int16_t ds = r.begin_struct();
            compact_reader::field df;
            while (r.next_field(df)) {
                switch (df.id) {
                case 1: h.num_values = static_cast<std::int32_t>(r.zigzag()); break;
                case 2: h.num_nulls = static_cast<std::int32_t>(r.zigzag()); break;
                case 4: h.encoding = static_cast<std::int32_t>(r.zigzag()); break;
                case 5: h.def_bytes = static_cast<std::int32_t>(r.zigzag()); break;
                case 6: h.rep_bytes = static_cast<std::int32_t>(r.zigzag()); break;
                case 7: h.v2_compressed = df.bool_value; break;
                default: r.skip(df.type); break;
                }
            }
            r.end_struct(ds);
            break;
        }
        default: r.skip(f.type); break;
        }
    }
    r.end_struct(s);
    return h;
}

// RLE/bit-packed hybrid decoder (levels and dictionary indices).
void decode_hybrid(std::string_view data, std::uint32_t bit_width, std::size_t count,
                   std::vector<std::uint32_t>& out) {
    out.clear();
    out.reserve(count);
    if (bit_width == 0) {
        out.assign(count, 0);
        return;
    }
    std::size_t pos = 0;
    const std::uint32_t byte_width = (bit_width + 7) / 8;
    while (out.size() < count) {
        if (pos >= data.size()) throw parse_error("rle: truncated levels", pos);
        std::uint64_t header = 0;
        int shift = 0;
        while (true) {
            if (pos >= data.size()) throw parse_error("rle: truncated varint", pos);
            std::uint8_t b = static_cast<std::uint8_t>(data[pos++]);
            header |= static_cast<std::uint64_t>(b & 0x7F) << shift;
            if (!(b & 0x80)) break;
            shift += 7;
        }
        if (header & 1) {
            // bit-packed groups of 8 values
            std::uint64_t groups = header >> 1;
            std::uint64_t values = groups * 8;
            std::uint64_t bytes = groups * bit_width;
            if (pos + bytes > data.size()) throw parse_error("rle: truncated bit pack", pos);
            std::uint64_t bit = 0;
            for (std::uint64_t i = 0; i < values && out.size() < count; ++i) {
                std::uint32_t v = 0;
                for (std::uint32_t k = 0; k < bit_width; ++k, ++bit) {
                    std::uint64_t idx = pos + (bit >> 3);
                    if (static_cast<std::uint8_t>(data[idx]) & (1u << (bit & 7))) v |= 1u << k;
                }
                out.push_back(v);
            }
            pos += bytes;
        } else {
            std::uint64_t run = header >> 1;
            if (pos + byte_width > data.size()) throw parse_error("rle: truncated run value", pos);
            std::uint32_t v = 0;
            for (std::uint32_t k = 0; k < byte_width; ++k) {
                v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + k])) << (8 * k);
            }
            pos += byte_width;
            for (std::uint64_t i = 0; i < run && out.size() < count; ++i) out.push_back(v);
        }
    }
}

// Hybrid encoder used for definition levels: RLE runs only.
std::string encode_hybrid_rle(const std::vector<std::uint32_t>& levels) {
    std::string out;
    std::size_t i = 0;
    while (i < levels.size()) {
        std::size_t j = i;
        while (j < levels.size() && levels[j] == levels[i]) ++j;
        std::uint64_t header = static_cast<std::uint64_t>(j - i) << 1;
        while (header >= 0x80) {
            out.push_back(static_cast<char>((header & 0x7F) | 0x80));
            header >>= 7;
        }
        out.push_back(static_cast<char>(header));
        out.push_back(static_cast<char>(levels[i] & 0xFF)); // bit width 1 -> one byte
        i = j;
    }
    return out;
}

std::uint32_t read_u32le(std::string_view s, std::size_t pos) {
    if (pos + 4 > s.size()) throw parse_error("plain: truncated u32", pos);
    return static_cast<std::uint8_t>(s[pos]) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[pos + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[pos + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[pos + 3])) << 24);
}

} // namespace

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

struct parquet_reader::impl {
    std::shared_ptr<byte_source> src;
    file_meta meta;
    std::vector<parquet_column_info> columns;

    explicit impl(std::shared_ptr<byte_source> source) : src(std::move(source)) {
        std::uint64_t size = src->size();
        if (size < 12) throw parse_error("not a parquet file: " + src->describe(), 0);
        std::string tail = src->read_at(size - 8, 8);
        if (tail.substr(4, 4) != "PAR1") {
            throw parse_error("missing parquet magic: " + src->describe(), size - 4);
        }
        std::uint32_t footer_len = read_u32le(tail, 0);
        if (footer_len + 12ull > size) {
            throw parse_error("parquet footer larger than file: " + src->describe(), size - 8);
        }
        std::string footer = src->read_at(size - 8 - footer_len, footer_len);
        meta = parse_file_meta(footer);
        if (meta.schema.empty()) throw parse_error("parquet schema empty", 0);
        // Flat schemas only: the root's children must all be leaves.
        const auto& root = meta.schema.front();
        if (static_cast<std::size_t>(root.num_children) != meta.schema.size() - 1) {
            throw parse_error("nested parquet schemas are not supported", 0);
        }
        for (std::size_t i = 1; i < meta.schema.size(); ++i) {
            const auto& e = meta.schema[i];
            if (e.num_children != 0 || e.repetition == 2 || !e.type.has_value()) {
                throw parse_error("unsupported schema element: " + e.name, 0);
            }
            columns.push_back({e.name, static_cast<parquet_type>(*e.type), e.repetition == 1});
        }
    }

    std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i].name == name) return i;
        }
        throw std::out_of_range("no such parquet column: " + std::string(name));
    }

    std::string decompress(std::int32_t codec, std::string_view data, std::size_t expected) {
        switch (codec) {
        case CODEC_UNCOMPRESSED:
            return std::string(data);
        case CODEC_GZIP:
            return gunzip_all(data);
        case CODEC_SNAPPY:
            return snappy_decompress(data, expected);
        default:
            throw parse_error("unsupported parquet codec " + std::to_string(codec), 0);
        }
    }

    void decode_plain(parquet_type type, std::string_view data,
                      const std::vector<std::uint8_t>* present, parquet_column_data& out) {
        std::size_t pos = 0;
        for (std::size_t row = 0; row < out.present.size(); ++row) {
            if (present && !(*present)[row]) continue;
            switch (type) {
            case parquet_type::byte_array: {
                std::uint32_t len = read_u32le(data, pos);
                pos += 4;
                if (pos + len > data.size()) throw parse_error("plain: string past end", pos);
                out.strs[row].assign(data.substr(pos, len));
                pos += len;
                break;
            }
            case parquet_type::int32: {
                if (pos + 4 > data.size()) throw parse_error("plain: int32 past end", pos);
                std::int32_t x;
                std::memcpy(&x, data.data() + pos, 4);
                out.ints[row] = x;
                pos += 4;
                break;
            }
            case parquet_type::int64: {
                if (pos + 8 > data.size()) throw parse_error("plain: int64 past end", pos);
                std::int64_t x;
                std::memcpy(&x, data.data() + pos, 8);
                out.ints[row] = x;
                pos += 8;
                break;
            }
            default:
                throw parse_error("unsupported parquet physical type", 0);
            }
        }
    }

    parquet_column_data read_column(std::size_t group, std::string_view name) {
        if (group >= meta.row_groups.size()) throw std::out_of_range("row group out of range");
        std::size_t ci = column_index(name);
        const auto& info = columns[ci];
        const auto& g = meta.row_groups[group];
        // Chunks normally follow schema order, but match by path to be safe.
        const column_meta* found = nullptr;
        for (const auto& cm : g.columns) {
            if (!cm.path.empty() && cm.path.back() == name) {
                found = &cm;
                break;
            }
        }
        if (!found && ci < g.columns.size()) found = &g.columns[ci];
        if (!found) throw parse_error("row group missing column chunk", 0);
        const column_meta& cm = *found;

        std::int64_t start = cm.data_page_offset;
        if (cm.dict_page_offset >= 0) start = std::min(start, cm.dict_page_offset);
        std::string chunk = src->read_at(static_cast<std::uint64_t>(start),
                                         static_cast<std::uint64_t>(cm.total_compressed));

        parquet_column_data out;
        out.type = info.type;

        // Dictionary values decoded from the (optional) dictionary page.
        std::vector<std::string> dict_strs;
        std::vector<std::int64_t> dict_ints;

        std::int64_t values_seen = 0;
        std::size_t pos = 0;
        std::size_t row_base = 0;
        while (values_seen < cm.num_values) {
            compact_reader hr(chunk, pos);
            page_header ph = parse_page_header(hr);
            pos = hr.pos();
            if (pos + static_cast<std::size_t>(ph.compressed_size) > chunk.size()) {
                throw parse_error("page larger than column chunk", pos);
            }
            std::string_view body(chunk.data() + pos, static_cast<std::size_t>(ph.compressed_size));
            pos += static_cast<std::size_t>(ph.compressed_size);

            if (ph.type == PAGE_DICTIONARY) {
                std::string data = decompress(cm.codec, body, ph.uncompressed_size);
                std::size_t dpos = 0;
                for (std::int32_t i = 0; i < ph.num_values; ++i) {
                    if (info.type == parquet_type::byte_array) {
                        std::uint32_t len = read_u32le(data, dpos);
                        dpos += 4;
                        dict_strs.emplace_back(data.substr(dpos, len));
                        dpos += len;
                    } else if (info.type == parquet_type::int32) {
                        std::int32_t x;
                        std::memcpy(&x, data.data() + dpos, 4);
                        dict_ints.push_back(x);
                        dpos += 4;
                    } else if (info.type == parquet_type::int64) {
                        std::int64_t x;
                        std::memcpy(&x, data.data() + dpos, 8);
                        dict_ints.push_back(x);
                        dpos += 8;
                    } else {
                        throw parse_error("unsupported dictionary type", dpos);
                    }
                }
                continue;
            }
            if (ph.type == PAGE_INDEX) continue;

            // Data page: recover definition levels and values.
            std::string data;
            std::string_view levels_part;
            std::string_view values_part;
            std::string v2_levels_storage;
            if (ph.type == PAGE_DATA) {
                data = decompress(cm.codec, body, ph.uncompressed_size);
                std::string_view rest = data;
                if (info.optional) {
                    std::uint32_t def_len = read_u32le(rest, 0);
                    levels_part = rest.substr(4, def_len);
                    values_part = rest.substr(4 + def_len);
                } else {
                    values_part = rest;
                }
            } else if (ph.type == PAGE_DATA_V2) {
                // Levels are stored uncompressed ahead of the data.
                std::size_t lv = static_cast<std::size_t>(ph.rep_bytes) + static_cast<std::size_t>(ph.def_bytes);
                if (lv > body.size()) throw parse_error("v2 levels past page end", pos);
                v2_levels_storage.assign(body.substr(static_cast<std::size_t>(ph.rep_bytes),
                                                     static_cast<std::size_t>(ph.def_bytes)));
                levels_part = v2_levels_storage;
                std::string_view data_part = body.substr(lv);
                if (ph.v2_compressed) {
                    data = decompress(cm.codec, data_part,
                                      ph.uncompressed_size - static_cast<std::int32_t>(lv));
                } else {
                    data = std::string(data_part);
                }
                values_part = data;
            } else {
                throw parse_error("unknown page type " + std::to_string(ph.type), pos);
            }

            std::size_t page_rows = static_cast<std::size_t>(ph.num_values);
            out.present.resize(row_base + page_rows, 1);
            out.ints.resize(row_base + page_rows, 0);
            out.strs.resize(row_base + page_rows);

            std::size_t present_count = page_rows;
            std::vector<std::uint8_t> present_rows;
            if (info.optional) {
                std::vector<std::uint32_t> levels;
                decode_hybrid(levels_part, 1, page_rows, levels);
                present_rows.resize(page_rows);
                present_count = 0;
                for (std::size_t i = 0; i < page_rows; ++i) {
                    present_rows[i] = levels[i] != 0;
                    out.present[row_base + i] = present_rows[i];
                    present_count += present_rows[i];
                }
            }

            // Slice of the output rows this page fills.
            parquet_column_data page_view;
            page_view.type = info.type;
            page_view.present.assign(page_rows, 1);
            page_view.ints.assign(page_rows, 0);
            page_view.strs.resize(page_rows);
            const std::vector<std::uint8_t>* pp = info.optional ? &present_rows : nullptr;

            if (ph.encoding == ENC_PLAIN) {
                decode_plain(info.type, values_part, pp, page_view);
            } else if (ph.encoding == ENC_RLE_DICTIONARY || ph.encoding == ENC_PLAIN_DICTIONARY) {
                if (values_part.empty()) throw parse_error("dictionary page data empty", pos);
                std::uint32_t bw = static_cast<std::uint8_t>(values_part[0]);
                std::vector<std::uint32_t> idx;
                decode_hybrid(values_part.substr(1), bw, present_count, idx);
                std::size_t v = 0;
                for (std::size_t i = 0; i < page_rows; ++i) {
                    if (pp && !(*pp)[i]) continue;
                    std::uint32_t ix = idx[v++];
                    if (info.type == parquet_type::byte_array) {
                        if (ix >= dict_strs.size()) throw parse_error("dictionary index range", pos);
                        page_view.strs[i] = dict_strs[ix];
                    } else {
                        if (ix >= dict_ints.size()) throw parse_error("dictionary index range", pos);
                        page_view.ints[i] = dict_ints[ix];
                    }
                }
            } else {
                throw parse_error("unsupported data encoding " + std::to_string(ph.encoding), pos);
            }

            for (std::size_t i = 0; i < page_rows; ++i) {
                out.ints[row_base + i] = page_view.ints[i];
                out.strs[row_base + i] = std::move(page_view.strs[i]);
            }
            row_base += page_rows;
            values_seen += static_cast<std::int64_t>(page_rows);
        }
        return out;
    }
};

parquet_reader::parquet_reader(std::shared_ptr<byte_source> source)
    : impl_(std::make_unique<impl>(std::move(source))) {}
parquet_reader::~parquet_reader() = default;
parquet_reader::parquet_reader(parquet_reader&&) noexcept = default;
parquet_reader& parquet_reader::operator=(parquet_reader&&) noexcept = default;

const std::vector<parquet_column_info>& parquet_reader::columns() const { return impl_->columns; }

bool parquet_reader::has_column(std::string_view name) const {
    for (const auto& c : impl_->columns) {
        if (c.name == name) return true;
    }
    return false;
}

std::int64_t parquet_reader::total_rows() const { return impl_->meta.num_rows; }

std::size_t parquet_reader::row_group_count() const { return impl_->meta.row_groups.size(); }

std::int64_t parquet_reader::row_group_rows(std::size_t group) const {
    return impl_->meta.row_groups.at(group).num_rows;
}

parquet_column_data parquet_reader::read_column(std::size_t group, std::string_view name) {
    return impl_->read_column(group, name);
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

struct parquet_writer::impl {
    std::ofstream out;
    std::string path;
    std::vector<parquet_column_info> schema;
    parquet_writer_options opts;
    std::uint64_t offset = 0;
    std::int64_t total_rows = 0;
    bool finished = false;

    struct chunk_record {
        column_meta meta;
        std::int64_t uncompressed = 0;
    };
    struct group_record {
        std::vector<chunk_record> chunks;
        std::int64_t rows = 0;
        std::int64_t bytes = 0;
    };
    std::vector<group_record> groups;

    impl(const std::string& p, std::vector<parquet_column_info> s, parquet_writer_options o)
        : out(p, std::ios::binary), path(p), schema(std::move(s)), opts(o) {
        if (!out) throw std::runtime_error("cannot open for writing: " + p);
        write("PAR1");
    }

    void write(std::string_view data) {
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw std::runtime_error("write failed: " + path);
        offset += data.size();
    }

    std::string compress(std::string_view data) const {
        switch (opts.codec) {
        case parquet_codec::uncompressed: return std::string(data);
        case parquet_codec::gzip: return gzip_compress(data);
        case parquet_codec::snappy: return snappy_compress(data);
        }
        throw std::logic_error("unreachable");
    }

    void write_group(const std::vector<parquet_column_data>& columns) {
        if (columns.size() != schema.size()) {
            throw std::invalid_argument("column count does not match schema");
        }
        std::size_t rows = columns.empty() ? 0 : columns[0].rows();
        for (const auto& c : columns) {
            if (c.rows() != rows) throw std::invalid_argument("ragged column batch");
        }
        if (rows == 0) return;

        group_record group;
        group.rows = static_cast<std::int64_t>(rows);
        for (std::size_t ci = 0; ci < columns.size(); ++ci) {
            const auto& info = schema[ci];
            const auto& col = columns[ci];

            std::string values;
            std::size_t present = 0;
            for (std::size_t r = 0; r < rows; ++r) {
                bool is_present = !info.optional || col.present[r];
                if (!is_present) continue;
                ++present;
                switch (info.type) {
                case parquet_type::byte_array: {
                    std::uint32_t len = static_cast<std::uint32_t>(col.strs[r].size());
                    char lenb[4] = {static_cast<char>(len & 0xFF), static_cast<char>((len >> 8) & 0xFF),
                                    static_cast<char>((len >> 16) & 0xFF), static_cast<char>((len >> 24) & 0xFF)};
                    values.append(lenb, 4);
                    values.append(col.strs[r]);
                    break;
                }
                case parquet_type::int32: {
                    std::int32_t x = static_cast<std::int32_t>(col.ints[r]);
                    values.append(reinterpret_cast<const char*>(&x), 4);
                    break;
                }
                case parquet_type::int64: {
                    std::int64_t x = col.ints[r];
                    values.append(reinterpret_cast<const char*>(&x), 8);
                    break;
                }
                default:
                    throw std::invalid_argument("unsupported writer type");
                }
            }

            std::string payload;
            if (info.optional) {
                std::vector<std::uint32_t> levels(rows);
                for (std::size_t r = 0; r < rows; ++r) levels[r] = col.present[r] ? 1 : 0;
                std::string enc = encode_hybrid_rle(levels);
                std::uint32_t len = static_cast<std::uint32_t>(enc.size());
                char lenb[4] = {static_cast<char>(len & 0xFF), static_cast<char>((len >> 8) & 0xFF),
                                static_cast<char>((len >> 16) & 0xFF), static_cast<char>((len >> 24) & 0xFF)};
                payload.append(lenb, 4);
                payload.append(enc);
            }
            payload.append(values);
            (void)present;

            std::string compressed = compress(payload);

            compact_writer hw;
            std::int16_t hs;
            hw.field_i32(1, PAGE_DATA);
            hw.field_i32(2, static_cast<std::int32_t>(payload.size()));
            hw.field_i32(3, static_cast<std::int32_t>(compressed.size()));
            hs = hw.begin_struct_field(5);
            hw.field_i32(1, static_cast<std::int32_t>(rows));
            hw.field_i32(2, ENC_PLAIN);
            hw.field_i32(3, ENC_RLE);
            hw.field_i32(4, ENC_RLE);
            hw.end_struct(hs);
            // top-level PageHeader struct terminator
            std::string header = hw.take();
            header.push_back(static_cast<char>(CT_STOP));

            chunk_record rec;
            rec.meta.type = static_cast<std::int32_t>(info.type);
            rec.meta.path.push_back(info.name);
            rec.meta.codec = opts.codec == parquet_codec::uncompressed ? CODEC_UNCOMPRESSED
                             : opts.codec == parquet_codec::gzip       ? CODEC_GZIP
                                                                       : CODEC_SNAPPY;
            rec.meta.num_values = static_cast<std::int64_t>(rows);
            rec.meta.data_page_offset = static_cast<std::int64_t>(offset);
            rec.meta.total_compressed = static_cast<std::int64_t>(header.size() + compressed.size());
            rec.uncompressed = static_cast<std::int64_t>(header.size() + payload.size());
            group.bytes += rec.uncompressed;

            write(header);
            write(compressed);
            group.chunks.push_back(std::move(rec));
        }
        total_rows += group.rows;
        groups.push_back(std::move(group));
    }

    void finish_file() {
        if (finished) return;
        finished = true;

        compact_writer w;
        w.field_i32(1, 1); // version

        // schema: root + leaves
        w.field_list(2, CT_STRUCT, static_cast<std::uint32_t>(schema.size() + 1));
        {
            std::int16_t s = w.begin_struct_element();
            w.field_binary(4, "schema");
            w.field_i32(5, static_cast<std::int32_t>(schema.size()));
            w.end_struct(s);
        }
        for (const auto& col : schema) {
            std::int16_t s = w.begin_struct_element();
            w.field_i32(1, static_cast<std::int32_t>(col.type));
            w.field_i32(3, col.optional ? 1 : 0);
            w.field_binary(4, col.name);
            if (col.type == parquet_type::byte_array) {
                w.field_i32(6, 0); // ConvertedType UTF8
            }
            w.end_struct(s);
        }

        w.field_i64(3, total_rows);

        w.field_list(4, CT_STRUCT, static_cast<std::uint32_t>(groups.size()));
        for (const auto& g : groups) {
            std::int16_t gs = w.begin_struct_element();
            w.field_list(1, CT_STRUCT, static_cast<std::uint32_t>(g.chunks.size()));
            for (const auto& c : g.chunks) {
                std::int16_t cs = w.begin_struct_element();
                w.field_i64(2, c.meta.data_page_offset); // ColumnChunk.file_offset
                std::int16_t ms = w.begin_struct_field(3);
                w.field_i32(1, c.meta.type);
                w.field_list(2, CT_I32, 2);
                w.raw_list_elem_i32(ENC_PLAIN);
                w.raw_list_elem_i32(ENC_RLE);
                w.field_list(3, CT_BINARY, static_cast<std::uint32_t>(c.meta.path.size()));
                for (const auto& p : c.meta.path) w.raw_binary_elem(p);
                w.field_i32(4, c.meta.codec);
                w.field_i64(5, c.meta.num_values);
                w.field_i64(6, c.uncompressed);
                w.field_i64(7, c.meta.total_compressed);
                w.field_i64(9, c.meta.data_page_offset);
                w.end_struct(ms);
                w.end_struct(cs);
            }
            w.field_i64(2, g.bytes);
            w.field_i64(3, g.rows);
            w.end_struct(gs);
        }

        w.field_binary(6, "unicrawl parquet writer");
        std::string footer = w.take();
        footer.push_back(static_cast<char>(CT_STOP));

        write(footer);
        std::uint32_t len = static_cast<std::uint32_t>(footer.size());
        char lenb[4] = {static_cast<char>(len & 0xFF), static_cast<char>((len >> 8) & 0xFF),
                        static_cast<char>((len >> 16) & 0xFF), static_cast<char>((len >> 24) & 0xFF)};
        write(std::string_view(lenb, 4));
        write("PAR1");
        out.close();
        if (!out) throw std::runtime_error("close failed: " + path);
    }
};

parquet_writer::parquet_writer(const std::string& path, std::vector<parquet_column_info> schema,
                               parquet_writer_options options)
    : impl_(std::make_unique<impl>(path, std::move(schema), options)) {}

parquet_writer::~parquet_writer() = default;

void parquet_writer::write_row_group(const std::vector<parquet_column_data>& columns) {
    impl_->write_group(columns);
}

void parquet_writer::finish() { impl_->finish_file(); }

} // namespace unicrawl
