#include "jigsaw/image.hpp"

#include <algorithm>
#include <string>

#include "jigsaw/error.hpp"

namespace jigsaw {

Image::Image(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw DimensionError("negative image dimensions");
  }
  data_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
}

Image::Image(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) {
    throw DimensionError("negative image dimensions");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height * kChannels) {
    throw DimensionError("image data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height) + "x3");
  }
}

Image Image::crop(int x, int y, int w, int h) const {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > width_ || y + h > height_) {
    throw DimensionError("crop rectangle outside image");
  }
  Image out(w, h);
  const std::size_t row_bytes = static_cast<std::size_t>(w) * kChannels;
  for (int r = 0; r < h; ++r) {
    const auto* src = &data_[(static_cast<std::size_t>(y + r) * width_ + x) * kChannels];
    std::copy_n(src, row_bytes, &out.data_[static_cast<std::size_t>(r) * row_bytes]);
  }
  return out;
}

void Image::paste(const Image& tile, int x, int y) {
  if (x < 0 || y < 0 || x + tile.width_ > width_ || y + tile.height_ > height_) {
    throw DimensionError("paste rectangle outside image");
  }
  const std::size_t row_bytes = static_cast<std::size_t>(tile.width_) * kChannels;
  for (int r = 0; r < tile.height_; ++r) {
    std::copy_n(&tile.data_[static_cast<std::size_t>(r) * row_bytes], row_bytes,
                &data_[(static_cast<std::size_t>(y + r) * width_ + x) * kChannels]);
  }
}

BlockGrid split_blocks(const Image& img, int m) {
  if (m <= 0) {
    throw DimensionError("block size must be positive");
  }
  if (img.width() % m != 0) {
    throw DimensionError("width " + std::to_string(img.width()) +
                         " is not divisible by block size " + std::to_string(m));
  }
  if (img.height() % m != 0) {
    throw DimensionError("height " + std::to_string(img.height()) +
                         " is not divisible by block size " + std::to_string(m));
  }
  BlockGrid grid;
  grid.rows = img.height() / m;
  grid.cols = img.width() / m;
  grid.block_size = m;
  grid.blocks.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      grid.blocks.push_back(img.crop(c * m, r * m, m, m));
    }
  }
  return grid;
}

Image merge_blocks(const BlockGrid& grid) {
  const int m = grid.block_size;
  if (m <= 0 || grid.rows <= 0 || grid.cols <= 0) {
    throw DimensionError("empty block grid");
  }
  if (grid.blocks.size() != static_cast<std::size_t>(grid.rows) * grid.cols) {
    throw DimensionError("incomplete grid: expected " +
                         std::to_string(grid.rows * grid.cols) + " tiles, got " +
                         std::to_string(grid.blocks.size()));
  }
  Image out(grid.cols * m, grid.rows * m);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const Image& tile = grid.blocks[static_cast<std::size_t>(r) * grid.cols + c];
      if (tile.width() != m || tile.height() != m) {
        throw DimensionError("tile " + std::to_string(r * grid.cols + c) + " is " +
                             std::to_string(tile.width()) + "x" +
                             std::to_string(tile.height()) + ", expected " +
                             std::to_string(m) + "x" + std::to_string(m));
      }
      out.paste(tile, c * m, r * m);
    }
  }
  return out;
}

}  // namespace jigsaw
