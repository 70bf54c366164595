#pragma once

// Reference implementations the dedup tests check against. Everything
// here is deliberately naive and independent of the suffix-array path:
// windows are counted with a hash map and spans assembled by scanning a
// boolean coverage array.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace testsupport {

inline std::vector<std::uint32_t> brute_suffix_array(std::string_view s) {
    std::vector<std::uint32_t> sa(s.size());
    for (std::uint32_t i = 0; i < s.size(); ++i) sa[i] = i;
    std::sort(sa.begin(), sa.end(), [&](std::uint32_t a, std::uint32_t b) {
        return s.substr(a) < s.substr(b);
    });
    return sa;
}

struct oracle_span {
    std::size_t begin;
    std::size_t end;
    friend bool operator==(const oracle_span&, const oracle_span&) = default;
};

inline bool oracle_utf8_boundary(std::string_view buf, std::size_t i) {
    if (i >= buf.size()) return true;
    return (static_cast<unsigned char>(buf[i]) & 0xC0) != 0x80;
}

// Window-hash duplicate finder over the concatenated buffer (0xFF between
// documents): every length-min_len window that occurs at two or more
// offsets marks all positions of its non-first occurrences. Covered
// positions merge into runs, clip at document boundaries, snap inward to
// UTF-8 boundaries.
inline std::vector<oracle_span> oracle_duplicate_spans(const std::vector<std::string>& texts,
                                                       std::size_t min_len) {
    std::string buffer;
    std::vector<std::pair<std::size_t, std::size_t>> bounds;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (i > 0) buffer.push_back('\xFF');
        std::size_t b = buffer.size();
        buffer += texts[i];
        bounds.emplace_back(b, buffer.size());
    }
    const std::size_t n = buffer.size();
    std::vector<oracle_span> result;
    if (n < min_len) return result;

    std::unordered_map<std::string_view, std::size_t> first_at;
    first_at.reserve(n);
    std::string_view view = buffer;
    for (std::size_t p = 0; p + min_len <= n; ++p) {
        first_at.try_emplace(view.substr(p, min_len), p);
    }
    std::vector<char> covered(n, 0);
    for (std::size_t p = 0; p + min_len <= n; ++p) {
        if (first_at[view.substr(p, min_len)] != p) {
            for (std::size_t k = 0; k < min_len; ++k) covered[p + k] = 1;
        }
    }

    std::size_t i = 0;
    while (i < n) {
        if (!covered[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && covered[j]) ++j;
        for (const auto& [db, de] : bounds) {
            std::size_t b = std::max(i, db);
            std::size_t e = std::min(j, de);
            if (b >= e) continue;
            while (b < e && !oracle_utf8_boundary(view, b)) ++b;
            while (e > b && !oracle_utf8_boundary(view, e)) --e;
            if (b < e) result.push_back({b, e});
        }
        i = j;
    }
    return result;
}

} // namespace testsupport
