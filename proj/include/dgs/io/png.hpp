#pragma once

#include "dgs/io/files.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

namespace dgs::io {

namespace png_detail {

inline void on_error(png_structp, png_const_charp msg) { throw Error(std::string("png: ") + msg); }
inline void on_warning(png_structp, png_const_charp) {}

inline void write_cb(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::ostream*>(png_get_io_ptr(png));
    out->write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
}
inline void flush_cb(png_structp) {}

}  // namespace png_detail

/// 8-bit gray (1 channel) or RGB (3 channel) PNG.
inline void write_png(const fs::path& path, const Mask& img) {
    if (img.channels != 1 && img.channels != 3) throw Error("write_png: need 1 or 3 channels");
    atomic_write(path, [&](std::ostream& out) {
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_detail::on_error,
                                                  png_detail::on_warning);
        png_infop info = png_create_info_struct(png);
        struct Guard {
            png_structp* p;
            png_infop* i;
            ~Guard() { png_destroy_write_struct(p, i); }
        } guard{&png, &info};
        png_set_write_fn(png, &out, png_detail::write_cb, png_detail::flush_cb);
        png_set_IHDR(png, info, img.width, img.height, 8, img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < img.height; ++y)
            png_write_row(png, const_cast<png_bytep>(&img.data[static_cast<std::size_t>(y) * img.width * img.channels]));
        png_write_end(png, nullptr);
    });
}

template <typename T> void write_png(const fs::path& path, const Image<T>& img) { write_png(path, to_u8(img)); }

/// Reads any 8-bit PNG, converting to `channels` (1 or 3).
inline Mask read_png(const fs::path& path, int channels = 3) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "rb"), &std::fclose);
    if (!fp) throw Error("cannot open image " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_detail::on_error,
                                             png_detail::on_warning);
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int color = png_get_color_type(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    const bool gray = (color & PNG_COLOR_MASK_COLOR) == 0;
    if (channels == 3 && gray) png_set_gray_to_rgb(png);
    if (channels == 1 && !gray) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);
    if (static_cast<int>(png_get_channels(png, info)) != channels)
        throw Error("unsupported PNG layout in " + path.string());
    Mask img(w, h, channels);
    for (int y = 0; y < h; ++y) png_read_row(png, &img.data[static_cast<std::size_t>(y) * w * channels], nullptr);
    png_read_end(png, nullptr);
    return img;
}

}  // namespace dgs::io
