#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evtk {

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

/// Writes to `path + ".tmp"` then renames, so readers never observe a
/// truncated file.
void atomic_write_file(const std::string& path, const void* data, std::size_t size);

bool file_exists(const std::string& path);

} // namespace evtk
