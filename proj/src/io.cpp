#include "klsum/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "klsum/errors.hpp"

#ifndef KLSUM_VERSION
#define KLSUM_VERSION "0.1.0"
#endif

namespace klsum {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw resource_error("atomic_write_file: cannot open " + tmp.string());
        os.write(contents.data(), std::streamsize(contents.size()));
        if (!os) throw resource_error("atomic_write_file: short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw usage_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* version_string() { return KLSUM_VERSION; }

} // namespace klsum
