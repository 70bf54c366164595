#pragma once

// Peak-RSS inspection. getrusage works everywhere including sandboxed
// kernels without /proc VmHWM; clear_refs (when present) lets a scenario
// reset the high-water mark, otherwise the absolute process peak is used,
// which is conservative: everything before the scenario counts against
// the bound too.

#include <sys/resource.h>

#include <fstream>
#include <string>

namespace testsupport {

inline std::size_t peak_rss_bytes() {
    std::size_t peak = 0;
    rusage ru{};
    if (getrusage(RUSAGE_SELF, &ru) == 0) {
        peak = static_cast<std::size_t>(ru.ru_maxrss) * 1024;
    }
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::size_t kb = 0;
            for (char c : line) {
                if (c >= '0' && c <= '9') kb = kb * 10 + static_cast<std::size_t>(c - '0');
            }
            peak = std::max(peak, kb * 1024);
        }
    }
    return peak;
}

// Returns false when the kernel does not allow the reset.
inline bool reset_peak_rss() {
    std::ofstream out("/proc/self/clear_refs");
    if (!out) return false;
    out << "5";
    return static_cast<bool>(out);
}

} // namespace testsupport
