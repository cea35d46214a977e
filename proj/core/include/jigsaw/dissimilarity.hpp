#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "jigsaw/image.hpp"

namespace jigsaw {

// Where tile b sits relative to tile a.
enum class Side { Left, Right, Top, Bottom };

Side opposite(Side s);

enum class Metric { Ssd, Mgc };
Metric parse_metric(const std::string& s);
std::string to_string(Metric m);

// Boundary line (outer) and the line next to it (inner) for each side of a
// tile, channel-interleaved. Left/Right lines run top to bottom, Top/Bottom
// lines run left to right.
struct TileEdges {
  std::array<std::vector<std::int16_t>, 4> outer;
  std::array<std::vector<std::int16_t>, 4> inner;

  const std::vector<std::int16_t>& outer_of(Side s) const { return outer[static_cast<int>(s)]; }
  const std::vector<std::int16_t>& inner_of(Side s) const { return inner[static_cast<int>(s)]; }
};

TileEdges extract_edges(const Image& tile);

// Sum over boundary pixel pairs and channels of squared differences.
std::int64_t edge_ssd(const TileEdges& a, const TileEdges& b, Side side);

// Mahalanobis gradient compatibility, summed over both directions so that
// edge_mgc(a, b, s) == edge_mgc(b, a, opposite(s)).
double edge_mgc(const TileEdges& a, const TileEdges& b, Side side);

// Squared boundary difference normalized by the edge length. Throws
// ShapeError when the touching edges differ in length.
double boundary_dissimilarity(const Image& a, const Image& b, Side side);

}  // namespace jigsaw
