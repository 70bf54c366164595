#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace unicrawl {

// Random-access view of a remote or local blob. Parquet shards are read
// footer-first, so sequential streaming is not enough; range reads keep
// both memory and bandwidth proportional to what is actually decoded.
class byte_source {
public:
    virtual ~byte_source() = default;
    virtual std::uint64_t size() = 0;
    // Reads exactly [offset, offset+length); throws on short reads.
    virtual std::string read_at(std::uint64_t offset, std::uint64_t length) = 0;
    virtual std::string describe() const = 0;
};

std::unique_ptr<byte_source> make_memory_source(std::string data, std::string name = "<memory>");
std::unique_ptr<byte_source> make_file_source(const std::string& path);

} // namespace unicrawl
