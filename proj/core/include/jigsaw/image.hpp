#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace jigsaw {

// Interleaved 8-bit RGB raster, row-major, top-left origin.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int width, int height, std::uint8_t fill = 0);
  Image(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }
  std::vector<std::uint8_t>& bytes() { return data_; }
  const std::vector<std::uint8_t>& bytes() const { return data_; }

  // Copy of the w×h rectangle whose top-left corner is (x, y).
  Image crop(int x, int y, int w, int h) const;
  // Writes `tile` with its top-left corner at (x, y).
  void paste(const Image& tile, int x, int y);

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Non-overlapping M×M tiles in row-major raster order.
struct BlockGrid {
  int rows = 0;
  int cols = 0;
  int block_size = 0;
  std::vector<Image> blocks;

  std::size_t count() const { return blocks.size(); }
};

// Throws DimensionError naming the offending dimension when the image is not
// an exact multiple of m.
BlockGrid split_blocks(const Image& img, int m);

// Inverse of split_blocks. Throws DimensionError when the grid is incomplete
// or a tile does not measure block_size × block_size.
Image merge_blocks(const BlockGrid& grid);

}  // namespace jigsaw
