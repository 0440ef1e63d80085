#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace oowm {

/// Whole-file read. Throws Error(io_error).
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Throws Error(io_error).
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace oowm
