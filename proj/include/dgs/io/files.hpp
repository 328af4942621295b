#pragma once

#include "dgs/core.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace dgs::io {

namespace fs = std::filesystem;

/// Writes through a sibling temp file and renames, so readers never observe partial output.
template <typename Writer> void atomic_write(const fs::path& path, Writer&& write) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        write(out);
        out.flush();
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline void write_text(const fs::path& path, const std::string& text) {
    atomic_write(path, [&](std::ostream& o) { o << text; });
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// FNV-1a, used for config fingerprints in run.json.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace dgs::io
