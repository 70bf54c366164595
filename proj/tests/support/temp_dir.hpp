#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace testsupport {

class temp_dir {
public:
    temp_dir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("unicrawl-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    temp_dir(const temp_dir&) = delete;
    temp_dir& operator=(const temp_dir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string sub(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace testsupport
