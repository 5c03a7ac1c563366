#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace valuebench {

// Hex-encoded SHA-256.
std::string sha256_hex(std::string_view data);

// Digest of a whole file's bytes. Throws ParseError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

// Format a double with 17 significant digits (round-trips exactly).
std::string format_double17(double v);

}  // namespace valuebench
