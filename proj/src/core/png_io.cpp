#include "png_io.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>

#include "error.hpp"

namespace evtk {
namespace {

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::string& path, const char* mode)
        : fp(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
};

} // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
    if (width < 1 || height < 1)
        raise(ErrorCode::BadShape, "png dimensions must be positive");
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        raise(ErrorCode::BadShape, "pixel buffer does not match 3-channel dimensions");

    const std::string tmp = path + ".tmp";
    {
        FileHandle file(tmp, "wb");
        if (!file.fp) raise(ErrorCode::IoFailure, "cannot open '" + tmp + "' for writing");

        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info) {
            png_destroy_write_struct(&png, &info);
            raise(ErrorCode::IoFailure, "png writer setup failed");
        }
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            raise(ErrorCode::IoFailure, "png encoding failed for '" + path + "'");
        }
        png_init_io(png, file.fp);
        png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                     8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < height; ++y)
            png_write_row(png, const_cast<png_bytep>(rgb.data() +
                                                     static_cast<std::size_t>(y) * width * 3));
        png_write_end(png, info);
        png_destroy_write_struct(&png, &info);
    }
    std::filesystem::rename(tmp, path);
}

PngImage read_png_rgb(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.fp) raise(ErrorCode::IoFailure, "cannot open '" + path + "'");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::IoFailure, "png reader setup failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::BadHeader, "'" + path + "' is not a decodable png");
    }
    png_init_io(png, file.fp);
    png_read_info(png, info);

    // Normalize any input layout to 8-bit RGB.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    PngImage out;
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    for (int y = 0; y < out.height; ++y)
        png_read_row(png, out.rgb.data() + static_cast<std::size_t>(y) * out.width * 3, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

} // namespace evtk
