// gray_image.hpp - grayscale raster type and resampling used by the CW-SSIM pipeline
#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace tabscore {

// Row-major luminance matrix. Values live in [0, 255] but are real-valued
// after resampling, so storage is double.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("GrayImage dimensions must be positive");
    }

    double& at(int row, int col) { return pixels[static_cast<size_t>(row) * width + col]; }
    double at(int row, int col) const { return pixels[static_cast<size_t>(row) * width + col]; }
    bool empty() const { return width == 0 || height == 0; }
};

double luminance(double r, double g, double b);

// Bilinear resampling with half-pixel centers. Identity when the target size
// equals the source size; constant images stay constant.
GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height);

// Drops the last row/column when odd so both dimensions end up even.
GrayImage trim_even(const GrayImage& src);

// Grayscale both inputs are already; resamples to the element-wise max size of
// the pair, then trims to even dimensions. Throws on empty input.
std::pair<GrayImage, GrayImage> preprocess_pair(const GrayImage& x, const GrayImage& y);

} // namespace tabscore
