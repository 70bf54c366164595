#include "unicrawl/gzip.hpp"

#include <zlib.h>

#include <cstring>
#include <stdexcept>

#include "unicrawl/errors.hpp"

namespace unicrawl {

bool has_gzip_magic(std::string_view data) {
    return data.size() >= 2 &&
           static_cast<unsigned char>(data[0]) == 0x1F &&
           static_cast<unsigned char>(data[1]) == 0x8B;
}

std::string gzip_compress(std::string_view data, int level) {
    z_stream strm{};
    if (deflateInit2(&strm, level, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw std::runtime_error("deflateInit2 failed");
    }
    // zlib's default gzip header already carries mtime 0.
    std::string out;
    out.resize(deflateBound(&strm, data.size()) + 32);
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    strm.avail_in = static_cast<uInt>(data.size());
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&strm, Z_FINISH);
    deflateEnd(&strm);
    if (rc != Z_STREAM_END) {
        throw std::runtime_error("gzip compression failed");
    }
    out.resize(out.size() - strm.avail_out);
    return out;
}

std::string gunzip_member(std::string_view data, std::size_t* consumed) {
    if (!has_gzip_magic(data)) {
        throw parse_error("input does not start with a gzip member", 0);
    }
    z_stream strm{};
    if (inflateInit2(&strm, 15 + 16) != Z_OK) {
        throw std::runtime_error("inflateInit2 failed");
    }
    std::string out;
    char buf[1 << 15];
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    strm.avail_in = static_cast<uInt>(data.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        strm.next_out = reinterpret_cast<Bytef*>(buf);
        strm.avail_out = sizeof(buf);
        rc = inflate(&strm, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            std::size_t off = data.size() - strm.avail_in;
            inflateEnd(&strm);
            throw parse_error("corrupt gzip stream", off);
        }
        out.append(buf, sizeof(buf) - strm.avail_out);
        if (rc != Z_STREAM_END && strm.avail_in == 0) {
            std::size_t off = data.size();
            inflateEnd(&strm);
            throw parse_error("truncated gzip member", off);
        }
    }
    if (consumed) *consumed = data.size() - strm.avail_in;
    inflateEnd(&strm);
    return out;
}

std::string gunzip_all(std::string_view data) {
    std::string out;
    std::string_view rest = data;
    while (!rest.empty()) {
        std::size_t used = 0;
        out += gunzip_member(rest, &used);
        rest.remove_prefix(used);
    }
    return out;
}

gzip_writer::gzip_writer(const std::string& path, int level) : path_(path) {
    std::string mode = "wb" + std::to_string(level);
    file_ = gzopen(path.c_str(), mode.c_str());
    if (!file_) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
}

gzip_writer::~gzip_writer() {
    if (file_) gzclose(static_cast<gzFile>(file_));
}

void gzip_writer::write(std::string_view data) {
    if (!file_) throw std::runtime_error("write on closed gzip file: " + path_);
    if (data.empty()) return;
    int n = gzwrite(static_cast<gzFile>(file_), data.data(), static_cast<unsigned>(data.size()));
    if (n <= 0 || static_cast<std::size_t>(n) != data.size()) {
        throw std::runtime_error("gzip write failed: " + path_);
    }
    uncompressed_ += data.size();
}

void gzip_writer::close() {
    if (!file_) return;
    int rc = gzclose(static_cast<gzFile>(file_));
    file_ = nullptr;
    if (rc != Z_OK) {
        throw std::runtime_error("gzip close failed: " + path_);
    }
}

gzip_reader::gzip_reader(const std::string& path) : path_(path) {
    file_ = gzopen(path.c_str(), "rb");
    if (!file_) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
}

gzip_reader::~gzip_reader() {
    if (file_) gzclose(static_cast<gzFile>(file_));
}

bool gzip_reader::read_line(std::string& line) {
    line.clear();
    while (true) {
        std::size_t nl = pending_.find('\n');
        if (nl != std::string::npos) {
            line = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            return true;
        }
        if (eof_) {
            if (pending_.empty()) return false;
            line.swap(pending_);
            pending_.clear();
            return true;
        }
        char buf[1 << 15];
        int n = gzread(static_cast<gzFile>(file_), buf, sizeof(buf));
        if (n < 0) {
            throw std::runtime_error("gzip read failed: " + path_);
        }
        if (n == 0) {
            eof_ = true;
        } else {
            pending_.append(buf, static_cast<std::size_t>(n));
        }
    }
}

} // namespace unicrawl
