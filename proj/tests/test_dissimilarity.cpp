#include <gtest/gtest.h>

#include "jigsaw/dissimilarity.hpp"
#include "jigsaw/error.hpp"
#include "support.hpp"

namespace jigsaw {
namespace {

using testing::constant_image;
using testing::gradient_image;
using testing::noise_image;

TEST(BoundaryDissimilarity, GradientNeighboursBeatNoise) {
  const Image g = gradient_image(64, 64);
  const double joined = boundary_dissimilarity(g.crop(0, 0, 16, 16), g.crop(16, 0, 16, 16), Side::Right);
  const double noise = boundary_dissimilarity(noise_image(16, 16, 1), noise_image(16, 16, 2), Side::Right);
  EXPECT_LT(joined, noise);
}

TEST(BoundaryDissimilarity, ConstantImageIsZero) {
  const Image c = constant_image(16, 16, 10, 200, 30);
  for (Side s : {Side::Left, Side::Right, Side::Top, Side::Bottom}) {
    EXPECT_EQ(boundary_dissimilarity(c, c, s), 0.0);
  }
}

TEST(BoundaryDissimilarity, HandComputedValue) {
  // a's right column is all 10, b's left column all 13: 3 channels × 2 rows
  // × 3² = 54, over an edge of length 2.
  Image a = constant_image(2, 2, 10, 10, 10);
  Image b = constant_image(2, 2, 13, 13, 13);
  EXPECT_DOUBLE_EQ(boundary_dissimilarity(a, b, Side::Right), 27.0);
  b.at(1, 0, 0) = 0;  // not on the shared edge
  EXPECT_DOUBLE_EQ(boundary_dissimilarity(a, b, Side::Right), 27.0);
}

TEST(BoundaryDissimilarity, MirrorSymmetry) {
  const Image a = noise_image(16, 16, 3);
  const Image b = noise_image(16, 16, 4);
  const TileEdges ea = extract_edges(a);
  const TileEdges eb = extract_edges(b);
  for (Side s : {Side::Left, Side::Right, Side::Top, Side::Bottom}) {
    EXPECT_EQ(boundary_dissimilarity(a, b, s), boundary_dissimilarity(b, a, opposite(s)));
    EXPECT_EQ(edge_ssd(ea, eb, s), edge_ssd(eb, ea, opposite(s)));
    EXPECT_DOUBLE_EQ(edge_mgc(ea, eb, s), edge_mgc(eb, ea, opposite(s)));
  }
}

TEST(BoundaryDissimilarity, RejectsMismatchedEdges) {
  EXPECT_THROW(boundary_dissimilarity(Image(16, 16), Image(16, 8), Side::Right), ShapeError);
  EXPECT_NO_THROW(boundary_dissimilarity(Image(16, 16), Image(8, 16), Side::Right));
}

TEST(Mgc, PrefersTrueNeighbourOnGradient) {
  const Image g = gradient_image(64, 64);
  const TileEdges left = extract_edges(g.crop(16, 16, 16, 16));
  const TileEdges right = extract_edges(g.crop(32, 16, 16, 16));
  const TileEdges far = extract_edges(g.crop(0, 48, 16, 16));
  EXPECT_LT(edge_mgc(left, right, Side::Right), edge_mgc(left, far, Side::Right));
}

TEST(Metric, Parse) {
  EXPECT_EQ(parse_metric("ssd"), Metric::Ssd);
  EXPECT_EQ(parse_metric("mgc"), Metric::Mgc);
  EXPECT_EQ(to_string(Metric::Mgc), "mgc");
  EXPECT_THROW(parse_metric("l1"), ParameterError);
}

}  // namespace
}  // namespace jigsaw
