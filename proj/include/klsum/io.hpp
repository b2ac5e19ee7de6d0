#pragma once

#include <string>

namespace klsum {

// Shortest round-trippable decimal (17 significant digits) for CSV/JSON payloads.
std::string fmt17(double x);

// Write-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// git-describe-style version baked in at configure time.
const char* version_string();

} // namespace klsum
