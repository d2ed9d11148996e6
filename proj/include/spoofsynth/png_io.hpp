#pragma once

#include <png.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "spoofsynth/error.hpp"
#include "spoofsynth/image.hpp"

namespace spoofsynth {

/// Decode any PNG (palette, gray, alpha and 16-bit are converted) to 8-bit RGB.
inline Image read_png(const std::filesystem::path& path)
{
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
        fail(ErrorKind::Io, "cannot read PNG '" + path.string() + "': " + png.message);
    }
    png.format = PNG_FORMAT_RGB;
    Image image(static_cast<int>(png.width), static_cast<int>(png.height));
    if (!png_image_finish_read(&png, nullptr, image.bytes().data(), 0, nullptr)) {
        png_image_free(&png);
        fail(ErrorKind::Io, "cannot decode PNG '" + path.string() + "': " + png.message);
    }
    return image;
}

/// Encoder output depends only on pixel content, so identical images give
/// identical files.
inline void write_png(const std::filesystem::path& path, const Image& image)
{
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, image.bytes().data(), 0, nullptr)) {
        fail(ErrorKind::Io, "cannot write PNG '" + path.string() + "': " + png.message);
    }
}

} // namespace spoofsynth
