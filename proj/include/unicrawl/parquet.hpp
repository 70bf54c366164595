#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "unicrawl/byte_source.hpp"

namespace unicrawl {

// Subset parquet support: flat schemas of strings and integers, which is
// all the crawl index uses. The reader understands PLAIN and dictionary
// encodings with uncompressed, gzip or snappy pages; the writer emits
// PLAIN pages. Column chunks are fetched individually from the byte
// source, so projecting a few columns of a remote shard downloads only
// those chunks plus the footer.

enum class parquet_type : std::uint8_t {
    boolean = 0,
    int32 = 1,
    int64 = 2,
    int96 = 3,
    flt = 4,
    dbl = 5,
    byte_array = 6,
    fixed_len_byte_array = 7,
};

struct parquet_column_info {
    std::string name;
    parquet_type type = parquet_type::byte_array;
    bool optional = false;
};

// One decoded column of one row group. Integer columns are widened to
// int64; null slots hold empty/zero values with present[i] == 0.
struct parquet_column_data {
    parquet_type type = parquet_type::byte_array;
    std::vector<std::uint8_t> present;
    std::vector<std::int64_t> ints;
    std::vector<std::string> strs;
    std::size_t rows() const { return present.size(); }
};

class parquet_reader {
public:
    explicit parquet_reader(std::shared_ptr<byte_source> source);
    ~parquet_reader();
    parquet_reader(parquet_reader&&) noexcept;
    parquet_reader& operator=(parquet_reader&&) noexcept;

    const std::vector<parquet_column_info>& columns() const;
    bool has_column(std::string_view name) const;
    std::int64_t total_rows() const;
    std::size_t row_group_count() const;
    std::int64_t row_group_rows(std::size_t group) const;

    parquet_column_data read_column(std::size_t group, std::string_view name);

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

enum class parquet_codec : std::uint8_t { uncompressed = 0, snappy = 1, gzip = 2 };

struct parquet_writer_options {
    std::size_t row_group_rows = 1 << 16;
    parquet_codec codec = parquet_codec::gzip;
};

class parquet_writer {
public:
    parquet_writer(const std::string& path, std::vector<parquet_column_info> schema,
                   parquet_writer_options options = {});
    ~parquet_writer();
    parquet_writer(const parquet_writer&) = delete;
    parquet_writer& operator=(const parquet_writer&) = delete;

    // Columns must match the schema order; all columns in a batch must
    // have the same row count. Each call becomes at least one row group.
    void write_row_group(const std::vector<parquet_column_data>& columns);
    void finish();

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

} // namespace unicrawl
