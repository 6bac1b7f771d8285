#include "gray_image.hpp"

#include <algorithm>
#include <cmath>

namespace tabscore {

double luminance(double r, double g, double b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height) {
    if (src.empty())
        throw std::invalid_argument("resize_bilinear: empty source image");
    if (out_width <= 0 || out_height <= 0)
        throw std::invalid_argument("resize_bilinear: target dimensions must be positive");
    if (out_width == src.width && out_height == src.height)
        return src;

    GrayImage out(out_width, out_height);
    const double sx = static_cast<double>(src.width) / out_width;
    const double sy = static_cast<double>(src.height) / out_height;

    for (int r = 0; r < out_height; ++r) {
        // Map the output pixel center back into source coordinates.
        double fy = (r + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
        int y0 = static_cast<int>(std::floor(fy));
        int y1 = std::min(y0 + 1, src.height - 1);
        double wy = fy - y0;
        for (int c = 0; c < out_width; ++c) {
            double fx = (c + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
            int x0 = static_cast<int>(std::floor(fx));
            int x1 = std::min(x0 + 1, src.width - 1);
            double wx = fx - x0;
            double top = src.at(y0, x0) * (1.0 - wx) + src.at(y0, x1) * wx;
            double bot = src.at(y1, x0) * (1.0 - wx) + src.at(y1, x1) * wx;
            out.at(r, c) = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

GrayImage trim_even(const GrayImage& src) {
    int w = src.width - (src.width % 2);
    int h = src.height - (src.height % 2);
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("trim_even: image too small to trim to even dimensions");
    if (w == src.width && h == src.height)
        return src;
    GrayImage out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.at(r, c) = src.at(r, c);
    return out;
}

std::pair<GrayImage, GrayImage> preprocess_pair(const GrayImage& x, const GrayImage& y) {
    if (x.empty() || y.empty())
        throw std::invalid_argument("preprocess_pair: zero-dimension input");
    int w = std::max(x.width, y.width);
    int h = std::max(x.height, y.height);
    GrayImage a = trim_even(resize_bilinear(x, w, h));
    GrayImage b = trim_even(resize_bilinear(y, w, h));
    return {std::move(a), std::move(b)};
}

} // namespace tabscore
