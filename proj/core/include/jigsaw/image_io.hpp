#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "jigsaw/image.hpp"

namespace jigsaw {

std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(std::span<const std::uint8_t> bytes);

// Binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const Image& img);
Image decode_ppm(std::span<const std::uint8_t> bytes);

// Format chosen by content on read (PNG, PPM or JPEG magic) and by extension
// on write (.png, .ppm/.pnm, .jpg/.jpeg at quality 95, 4:4:4).
Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace jigsaw
