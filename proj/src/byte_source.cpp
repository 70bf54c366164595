#include "unicrawl/byte_source.hpp"

#include <fstream>
#include <stdexcept>

namespace unicrawl {

namespace {

class memory_source final : public byte_source {
public:
    memory_source(std::string data, std::string name)
        : data_(std::move(data)), name_(std::move(name)) {}

    std::uint64_t size() override { return data_.size(); }

    std::string read_at(std::uint64_t offset, std::uint64_t length) override {
        if (offset + length > data_.size()) {
            throw std::out_of_range("read past end of " + name_);
        }
        return data_.substr(offset, length);
    }

    std::string describe() const override { return name_; }

private:
    std::string data_;
    std::string name_;
};

class file_source final : public byte_source {
public:
    explicit file_source(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open: " + path);
        in_.seekg(0, std::ios::end);
        size_ = static_cast<std::uint64_t>(in_.tellg());
    }

    std::uint64_t size() override { return size_; }

    std::string read_at(std::uint64_t offset, std::uint64_t length) override {
        if (offset + length > size_) {
            throw std::out_of_range("read past end of " + path_);
        }
        std::string out(length, '\0');
        in_.seekg(static_cast<std::streamoff>(offset));
        in_.read(out.data(), static_cast<std::streamsize>(length));
        if (static_cast<std::uint64_t>(in_.gcount()) != length) {
            throw std::runtime_error("short read from " + path_);
        }
        return out;
    }

    std::string describe() const override { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    std::uint64_t size_ = 0;
};

} // namespace

std::unique_ptr<byte_source> make_memory_source(std::string data, std::string name) {
    return std::make_unique<memory_source>(std::move(data), std::move(name));
}

std::unique_ptr<byte_source> make_file_source(const std::string& path) {
    return std::make_unique<file_source>(path);
}

} // namespace unicrawl
