#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace unicrawl {

// One gzip member with a fixed (zeroed) mtime so identical input always
// yields identical bytes.
std::string gzip_compress(std::string_view data, int level = 6);

bool has_gzip_magic(std::string_view data);

// Inflates exactly the first gzip member. Trailing bytes beyond the member
// are ignored; *consumed (when given) receives the member's compressed
// length including header and trailer. Throws parse_error on corrupt or
// truncated input.
std::string gunzip_member(std::string_view data, std::size_t* consumed = nullptr);

// Inflates a whole stream of concatenated gzip members.
std::string gunzip_all(std::string_view data);

// Streaming line-oriented gzip file IO built on zlib's gzFile. The writer
// counts uncompressed bytes so callers can roll shards by logical size.
class gzip_writer {
public:
    explicit gzip_writer(const std::string& path, int level = 6);
    ~gzip_writer();
    gzip_writer(const gzip_writer&) = delete;
    gzip_writer& operator=(const gzip_writer&) = delete;

    void write(std::string_view data);
    std::size_t uncompressed_bytes() const { return uncompressed_; }
    void close();

private:
    void* file_ = nullptr;
    std::string path_;
    std::size_t uncompressed_ = 0;
};

class gzip_reader {
public:
    explicit gzip_reader(const std::string& path);
    ~gzip_reader();
    gzip_reader(const gzip_reader&) = delete;
    gzip_reader& operator=(const gzip_reader&) = delete;

    // Reads the next '\n'-terminated line (terminator stripped). Returns
    // false at end of stream.
    bool read_line(std::string& line);

private:
    void* file_ = nullptr;
    std::string path_;
    std::string pending_;
    bool eof_ = false;
};

} // namespace unicrawl
