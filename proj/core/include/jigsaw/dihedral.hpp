#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace jigsaw {

// Element of the dihedral group of the square (4 rotations × optional
// mirror). index = rotation + 4 * mirrored, where the mirror (left-right
// flip) is applied first and the clockwise quarter turns second.
class Orientation {
 public:
  static constexpr int kCount = 8;

  constexpr Orientation() = default;
  constexpr explicit Orientation(int index) : index_(static_cast<std::uint8_t>(index & 7)) {}
  constexpr Orientation(int quarter_turns, bool mirrored)
      : index_(static_cast<std::uint8_t>((quarter_turns & 3) + (mirrored ? 4 : 0))) {}

  constexpr int index() const { return index_; }
  constexpr int quarter_turns() const { return index_ & 3; }
  constexpr bool mirrored() const { return (index_ & 4) != 0; }
  constexpr bool is_identity() const { return index_ == 0; }

  // Source cell that lands on (row, col) of an n×n square.
  constexpr std::pair<int, int> source(int n, int row, int col) const {
    int r = row;
    int c = col;
    for (int t = 0; t < quarter_turns(); ++t) {
      const int sr = n - 1 - c;
      const int sc = r;
      r = sr;
      c = sc;
    }
    if (mirrored()) {
      c = n - 1 - c;
    }
    return {r, c};
  }

  Orientation inverse() const;
  // Transform equivalent to applying `first`, then `*this`.
  Orientation after(Orientation first) const;

  friend constexpr bool operator==(Orientation, Orientation) = default;

 private:
  std::uint8_t index_ = 0;
};

// Applies `o` to an n×n plane stored with the given element stride
// (e.g. stride 3 addresses one channel of an interleaved RGB tile).
void orient_plane(Orientation o, int n, std::span<const std::uint8_t> src, int src_row_stride,
                  int src_step, std::span<std::uint8_t> dst, int dst_row_stride, int dst_step);

}  // namespace jigsaw
