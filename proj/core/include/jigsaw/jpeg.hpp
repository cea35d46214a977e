#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jigsaw/image.hpp"

namespace jigsaw {

enum class Subsampling { k444, k420 };

// Parses "444", "4:4:4", "420" or "4:2:0".
Subsampling parse_subsampling(const std::string& s);
// "444" or "420".
std::string to_string(Subsampling s);

struct JpegParams {
  int quality = 75;  // IJG quality factor, 1..100
  Subsampling subsampling = Subsampling::k420;
};

// Throws ParameterError for quality outside [1, 100].
void validate(const JpegParams& params);

// Baseline JFIF stream produced with the IJG API (libjpeg-turbo build),
// standard quality-table scaling, islow DCT, YCbCr.
std::vector<std::uint8_t> jpeg_bytes(const Image& img, const JpegParams& params);

// Decodes any baseline/progressive JPEG to RGB. Full-resolution streams use
// the library decoder (islow IDCT). Subsampled YCbCr streams upsample chroma
// inside each block by a scaled inverse DCT, as the IJG v7+ decoder does.
Image decode_jpeg(std::span<const std::uint8_t> bytes);

// decode(encode(img)). Images smaller than 16×16 are rejected.
Image jpeg_cycle(const Image& img, const JpegParams& params);

}  // namespace jigsaw
