// png_io.hpp - PNG load/store for GrayImage (libpng)
#pragma once

#include <string>

#include "gray_image.hpp"

namespace tabscore {

struct PngError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reads any 8/16-bit gray/RGB/palette PNG and converts to luminance.
GrayImage load_png_gray(const std::string& path);

// Writes 8-bit grayscale; values are rounded and clamped to [0, 255].
void save_png_gray(const std::string& path, const GrayImage& img);

} // namespace tabscore
