#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evtk {

/// Minimal RGB PNG output for visualizations. Rows are tightly packed
/// 3-byte pixels, top to bottom. Output bytes are deterministic for a given
/// input.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

struct PngImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; // 3 bytes per pixel
};

PngImage read_png_rgb(const std::string& path);

} // namespace evtk
