#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "jigsaw/assembly.hpp"
#include "jigsaw/image.hpp"

namespace jigsaw::testing {

// Photographs found at configure time (may be empty).
const std::vector<std::filesystem::path>& photo_paths();

// The i-th test photograph, centre-cropped to a square and resized to
// size×size. Without photographs, a smooth procedural scene seeded by i.
Image natural_image(int i, int size = 224);
int natural_image_count();

// Smooth synthetic scene: overlapping colour gradients and soft discs.
Image procedural_scene(std::uint64_t seed, int size);

// Independent uniform samples.
Image noise_image(int width, int height, std::uint64_t seed);

// R rises with x, G with y, B with x + y.
Image gradient_image(int width, int height);

Image constant_image(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

struct MetricOracle {
  double dc, nc, lc;
};

// Brute-force Dc/Nc/Lc straight from the grids.
MetricOracle metric_oracle(const Assembly& assembly, const Assembly& truth);

}  // namespace jigsaw::testing
