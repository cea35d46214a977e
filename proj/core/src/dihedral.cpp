#include "jigsaw/dihedral.hpp"

namespace jigsaw {
namespace {

// Cell permutation of a 3×3 square under `o`; 3 is the smallest size on which
// all eight elements act distinctly.
std::array<int, 9> cell_map(Orientation o) {
  std::array<int, 9> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const auto [sr, sc] = o.source(3, r, c);
      m[r * 3 + c] = sr * 3 + sc;
    }
  }
  return m;
}

struct GroupTables {
  std::array<std::array<std::uint8_t, 8>, 8> after{};
  std::array<std::uint8_t, 8> inverse{};

  GroupTables() {
    std::array<std::array<int, 9>, 8> maps{};
    for (int i = 0; i < 8; ++i) {
      maps[i] = cell_map(Orientation(i));
    }
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        // out = A(B(in)) so out[p] = in[mb[ma[p]]].
        std::array<int, 9> composed{};
        for (int p = 0; p < 9; ++p) {
          composed[p] = maps[b][maps[a][p]];
        }
        for (int k = 0; k < 8; ++k) {
          if (maps[k] == composed) {
            after[a][b] = static_cast<std::uint8_t>(k);
          }
        }
      }
    }
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        if (after[a][b] == 0) {
          inverse[a] = static_cast<std::uint8_t>(b);
        }
      }
    }
  }
};

const GroupTables& tables() {
  static const GroupTables t;
  return t;
}

}  // namespace

Orientation Orientation::inverse() const { return Orientation(tables().inverse[index_]); }

Orientation Orientation::after(Orientation first) const {
  return Orientation(tables().after[index_][first.index_]);
}

void orient_plane(Orientation o, int n, std::span<const std::uint8_t> src, int src_row_stride,
                  int src_step, std::span<std::uint8_t> dst, int dst_row_stride, int dst_step) {
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const auto [sr, sc] = o.source(n, r, c);
      dst[static_cast<std::size_t>(r) * dst_row_stride + static_cast<std::size_t>(c) * dst_step] =
          src[static_cast<std::size_t>(sr) * src_row_stride + static_cast<std::size_t>(sc) * src_step];
    }
  }
}

}  // namespace jigsaw
