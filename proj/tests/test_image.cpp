#include <gtest/gtest.h>

#include "jigsaw/dihedral.hpp"
#include "jigsaw/error.hpp"
#include "jigsaw/image.hpp"
#include "jigsaw/random.hpp"
#include "support.hpp"

namespace jigsaw {
namespace {

using testing::noise_image;

TEST(SplitBlocks, WorkingSizeGivesFourteenByFourteen) {
  const BlockGrid g = split_blocks(Image(224, 224), 16);
  EXPECT_EQ(g.rows, 14);
  EXPECT_EQ(g.cols, 14);
  EXPECT_EQ(g.count(), 196u);
}

TEST(SplitBlocks, CifarSizeGivesTwoByTwo) {
  const BlockGrid g = split_blocks(Image(32, 32), 16);
  EXPECT_EQ(g.rows, 2);
  EXPECT_EQ(g.cols, 2);
}

TEST(SplitBlocks, RejectsNonMultipleHeight) {
  try {
    split_blocks(Image(224, 225), 16);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("height"), std::string::npos) << e.what();
  }
}

TEST(SplitBlocks, RasterOrderIsRowMajor) {
  const Image img = noise_image(48, 32, 3);
  const BlockGrid g = split_blocks(img, 16);
  ASSERT_EQ(g.cols, 3);
  EXPECT_EQ(g.blocks[4], img.crop(16, 16, 16, 16));
}

TEST(MergeBlocks, InvertsSplit) {
  const Image img = noise_image(224, 224, 1);
  EXPECT_EQ(merge_blocks(split_blocks(img, 16)), img);
}

TEST(MergeBlocks, SingleTile) {
  const Image tile = noise_image(16, 16, 2);
  EXPECT_EQ(merge_blocks(BlockGrid{1, 1, 16, {tile}}), tile);
}

TEST(MergeBlocks, RejectsWrongTileSize) {
  BlockGrid g = split_blocks(noise_image(32, 32, 4), 16);
  g.blocks[3] = Image(8, 16);
  EXPECT_THROW(merge_blocks(g), DimensionError);
}

TEST(MergeBlocks, RejectsIncompleteGrid) {
  BlockGrid g = split_blocks(noise_image(32, 32, 4), 16);
  g.blocks.pop_back();
  EXPECT_THROW(merge_blocks(g), DimensionError);
}

TEST(SplitMergeProperty, RoundTripForRandomValidSizes) {
  RandomStream rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 * (1 + static_cast<int>(rng.uniform(12)));
    const int w = m * (1 + static_cast<int>(rng.uniform(6)));
    const int h = m * (1 + static_cast<int>(rng.uniform(6)));
    const Image img = noise_image(w, h, 1000 + trial);
    EXPECT_EQ(merge_blocks(split_blocks(img, m)), img) << w << "x" << h << " m=" << m;
  }
}

TEST(ImageCrop, PasteRestores) {
  Image img = noise_image(40, 30, 5);
  const Image part = img.crop(7, 3, 10, 12);
  Image other(40, 30);
  other.paste(part, 7, 3);
  EXPECT_EQ(other.crop(7, 3, 10, 12), part);
}

TEST(Dihedral, SourceOfQuarterTurnAndMirror) {
  // One clockwise quarter turn: the top-left output cell comes from the
  // bottom-left input cell.
  EXPECT_EQ(Orientation(1, false).source(3, 0, 0), std::make_pair(2, 0));
  EXPECT_EQ(Orientation(0, true).source(3, 0, 0), std::make_pair(0, 2));
  EXPECT_EQ(Orientation(2, false).source(3, 0, 1), std::make_pair(2, 1));
}

TEST(Dihedral, GroupLaws) {
  for (int a = 0; a < 8; ++a) {
    const Orientation oa(a);
    EXPECT_TRUE(oa.inverse().after(oa).is_identity()) << a;
    for (int b = 0; b < 8; ++b) {
      const Orientation ob(b);
      // Composition agrees with applying the two source maps in turn.
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          const auto [r1, c1] = ob.source(4, r, c);
          EXPECT_EQ(ob.after(oa).source(4, r, c), oa.source(4, r1, c1));
        }
      }
    }
  }
}

TEST(Dihedral, OrientPlaneMatchesSource) {
  const Image tile = noise_image(5, 5, 9);
  for (int o = 0; o < 8; ++o) {
    Image out(5, 5);
    orient_plane(Orientation(o), 5, tile.data(), 15, 3, out.data(), 15, 3);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) {
        const auto [sr, sc] = Orientation(o).source(5, r, c);
        EXPECT_EQ(out.at(c, r, 0), tile.at(sc, sr, 0));
      }
    }
  }
}

}  // namespace
}  // namespace jigsaw
