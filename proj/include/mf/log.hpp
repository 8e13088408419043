#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace mf {

// Verbosity from MF_LOG: "" / "off" (default), "info", "debug".
inline int log_level() {
    static int lvl = [] {
        const char* e = std::getenv("MF_LOG");
        if (!e) return 0;
        std::string s(e);
        if (s == "info") return 1;
        if (s == "debug") return 2;
        return 0;
    }();
    return lvl;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[mf] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[mf:debug] " << msg << "\n";
}

} // namespace mf
