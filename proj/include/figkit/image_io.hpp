#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "figkit/image.hpp"

namespace figkit {

/// Reads PNG or JPEG (detected from the file signature). Gray, palette and
/// alpha PNGs are expanded to RGB; 16-bit samples keep their high byte.
/// Throws Error{Io} on failure.
RgbImage read_image(const std::filesystem::path& path);

RgbImage read_png(const std::filesystem::path& path);
RgbImage read_jpeg(const std::filesystem::path& path);

/// Non-interlaced 8-bit RGB PNG. `text` entries become tEXt chunks; no
/// timestamp is written so identical inputs give identical bytes.
void write_png(const std::filesystem::path& path, const RgbImage& img,
               const std::map<std::string, std::string>& text = {});

void write_jpeg(const std::filesystem::path& path, const RgbImage& img, int quality = 95);

}  // namespace figkit
