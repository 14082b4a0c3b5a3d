#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "docsynth/raster.hpp"

namespace docsynth {

enum class ImageFormat { Png, Jpeg };

/// Decodes PNG or JPEG (chosen by content, not extension) to 8-bit RGB.
/// Alpha is composited over white. Throws ImageDecodeError.
Image read_image(const std::filesystem::path& path);

/// Encodes to memory. PNG output is deterministic: no time or text chunks.
std::vector<unsigned char> encode_png(const Image& image);
std::vector<unsigned char> encode_jpeg(const Image& image, int quality = 90);

/// Writes atomically (temporary file then rename). Throws IoError.
void write_image(const std::filesystem::path& path, const Image& image, ImageFormat format);
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace docsynth
