#pragma once

// File helpers for run artifacts.

#include <filesystem>
#include <string>
#include <string_view>

namespace nehari {

/// Writes to a temporary sibling and renames it into place, so readers never
/// see a partial file. Creates missing parent directories. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Whole file as bytes. Throws IoError.
std::string read_file(const std::filesystem::path& path);

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_sha1(std::string_view content);

}  // namespace nehari
