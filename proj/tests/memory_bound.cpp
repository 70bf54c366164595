// Filters a 512 MB synthetic index shard and checks that peak RSS stays
// under 1 GiB: memory must track matches and one column batch, never the
// shard.

#include <cstdio>
#include <filesystem>

#include "support/rss.hpp"
#include "support/synth_shard.hpp"
#include "support/temp_dir.hpp"
#include "unicrawl/index.hpp"

int main() {
    using namespace unicrawl;
    testsupport::temp_dir dir;
    std::string shard_path = dir.sub("big-shard.parquet");

    std::printf("generating 512 MB synthetic shard...\n");
    std::uint64_t rows =
        testsupport::write_big_index_shard(shard_path, 512ull << 20, 0.003);
    std::uint64_t on_disk = std::filesystem::file_size(shard_path);
    std::printf("  %llu rows, %.1f MB on disk\n", static_cast<unsigned long long>(rows),
                static_cast<double>(on_disk) / 1e6);

    bool reset = testsupport::reset_peak_rss();
    index_scan_stats scan;
    auto matches =
        filter_index_shard(make_file_source(shard_path), "CC-MAIN-2023-14", "amh",
                           filter_mode::lenient, &scan);
    std::size_t peak = testsupport::peak_rss_bytes();

    std::printf("  scanned %llu rows, matched %zu, peak RSS %.1f MB%s\n",
                static_cast<unsigned long long>(scan.rows_scanned), matches.size(),
                static_cast<double>(peak) / 1e6, reset ? "" : " (absolute, no clear_refs)");

    const std::size_t limit = 1ull << 30;
    if (matches.empty() || scan.rows_scanned != rows) {
        std::printf("FAIL: unexpected scan results\n");
        return 1;
    }
    if (peak >= limit) {
        std::printf("FAIL: peak RSS %.1f MB exceeds 1 GiB\n", static_cast<double>(peak) / 1e6);
        return 1;
    }
    std::printf("PASS: peak RSS within bound\n");
    return 0;
}
