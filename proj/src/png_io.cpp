#include "png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace tabscore {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

GrayImage load_png_gray(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp)
        throw PngError("cannot open PNG for reading: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw PngError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw PngError("png_create_info_struct failed");
    }
    std::vector<png_byte> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw PngError("libpng failed to decode: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 width = png_get_image_width(png, info);
    png_uint_32 height = png_get_image_height(png, info);
    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit RGB or gray.
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    size_t rowbytes = png_get_rowbytes(png, info);
    data.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r)
        rows[r] = data.data() + r * rowbytes;
    png_read_image(png, rows.data());

    int channels = png_get_channels(png, info);
    png_destroy_read_struct(&png, &info, nullptr);

    if (width == 0 || height == 0)
        throw PngError("PNG has zero dimension: " + path);

    GrayImage img(static_cast<int>(width), static_cast<int>(height));
    for (png_uint_32 r = 0; r < height; ++r) {
        const png_byte* row = data.data() + r * rowbytes;
        for (png_uint_32 c = 0; c < width; ++c) {
            const png_byte* px = row + c * channels;
            double v;
            if (channels >= 3)
                v = luminance(px[0], px[1], px[2]);
            else
                v = px[0]; // gray or gray+alpha
            img.at(static_cast<int>(r), static_cast<int>(c)) = v;
        }
    }
    return img;
}

void save_png_gray(const std::string& path, const GrayImage& img) {
    if (img.empty())
        throw PngError("refusing to write an empty image: " + path);
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw PngError("cannot open PNG for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw PngError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw PngError("png_create_info_struct failed");
    }
    std::vector<png_byte> bytes(static_cast<size_t>(img.width) * img.height);
    std::vector<png_bytep> rows(img.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw PngError("libpng failed to encode: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double v = std::lround(img.at(r, c));
            bytes[static_cast<size_t>(r) * img.width + c] =
                static_cast<png_byte>(v < 0 ? 0 : (v > 255 ? 255 : v));
        }
        rows[r] = bytes.data() + static_cast<size_t>(r) * img.width;
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace tabscore
