#include "jigsaw/dissimilarity.hpp"

#include <cmath>

#include "jigsaw/error.hpp"

namespace jigsaw {
namespace {

std::vector<std::int16_t> column(const Image& t, int x) {
  std::vector<std::int16_t> v;
  v.reserve(static_cast<std::size_t>(t.height()) * 3);
  for (int y = 0; y < t.height(); ++y) {
    for (int c = 0; c < 3; ++c) {
      v.push_back(t.at(x, y, c));
    }
  }
  return v;
}

std::vector<std::int16_t> row(const Image& t, int y) {
  std::vector<std::int16_t> v;
  v.reserve(static_cast<std::size_t>(t.width()) * 3);
  for (int x = 0; x < t.width(); ++x) {
    for (int c = 0; c < 3; ++c) {
      v.push_back(t.at(x, y, c));
    }
  }
  return v;
}

void check_lengths(const TileEdges& a, const TileEdges& b, Side side) {
  if (a.outer_of(side).size() != b.outer_of(opposite(side)).size()) {
    throw ShapeError("touching edges differ in length");
  }
}

// One direction of the MGC: how well the gradients across the boundary are
// predicted by the gradient distribution along a's `side`.
double mgc_one_way(const TileEdges& a, const TileEdges& b, Side side) {
  const auto& a1 = a.outer_of(side);
  const auto& a2 = a.inner_of(side);
  const auto& b1 = b.outer_of(opposite(side));
  const std::size_t n = a1.size() / 3;

  // Gradient samples plus the standard regularizing dummy gradients.
  static constexpr double kDummy[9][3] = {{0, 0, 0},  {1, 1, 1},  {-1, -1, -1},
                                          {0, 0, 1},  {0, 1, 0},  {1, 0, 0},
                                          {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  double mean[3] = {0, 0, 0};
  const double count = static_cast<double>(n + 9);
  for (std::size_t p = 0; p < n; ++p) {
    for (int c = 0; c < 3; ++c) {
      mean[c] += a1[p * 3 + c] - a2[p * 3 + c];
    }
  }
  for (const auto& d : kDummy) {
    for (int c = 0; c < 3; ++c) {
      mean[c] += d[c];
    }
  }
  for (double& m : mean) {
    m /= count;
  }
  double cov[3][3] = {};
  auto accumulate = [&](const double g[3]) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        cov[r][c] += (g[r] - mean[r]) * (g[c] - mean[c]);
      }
    }
  };
  for (std::size_t p = 0; p < n; ++p) {
    const double g[3] = {static_cast<double>(a1[p * 3] - a2[p * 3]),
                         static_cast<double>(a1[p * 3 + 1] - a2[p * 3 + 1]),
                         static_cast<double>(a1[p * 3 + 2] - a2[p * 3 + 2])};
    accumulate(g);
  }
  for (const auto& d : kDummy) {
    accumulate(d);
  }
  for (auto& r : cov) {
    for (double& v : r) {
      v /= count - 1.0;
    }
  }
  // 3×3 inverse by cofactors; the dummy gradients keep the matrix regular.
  const double det = cov[0][0] * (cov[1][1] * cov[2][2] - cov[1][2] * cov[2][1]) -
                     cov[0][1] * (cov[1][0] * cov[2][2] - cov[1][2] * cov[2][0]) +
                     cov[0][2] * (cov[1][0] * cov[2][1] - cov[1][1] * cov[2][0]);
  double inv[3][3];
  inv[0][0] = (cov[1][1] * cov[2][2] - cov[1][2] * cov[2][1]) / det;
  inv[0][1] = (cov[0][2] * cov[2][1] - cov[0][1] * cov[2][2]) / det;
  inv[0][2] = (cov[0][1] * cov[1][2] - cov[0][2] * cov[1][1]) / det;
  inv[1][0] = (cov[1][2] * cov[2][0] - cov[1][0] * cov[2][2]) / det;
  inv[1][1] = (cov[0][0] * cov[2][2] - cov[0][2] * cov[2][0]) / det;
  inv[1][2] = (cov[0][2] * cov[1][0] - cov[0][0] * cov[1][2]) / det;
  inv[2][0] = (cov[1][0] * cov[2][1] - cov[1][1] * cov[2][0]) / det;
  inv[2][1] = (cov[0][1] * cov[2][0] - cov[0][0] * cov[2][1]) / det;
  inv[2][2] = (cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0]) / det;

  double total = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double d[3];
    for (int c = 0; c < 3; ++c) {
      d[c] = static_cast<double>(b1[p * 3 + c] - a1[p * 3 + c]) - mean[c];
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        total += d[r] * inv[r][c] * d[c];
      }
    }
  }
  return total;
}

}  // namespace

Side opposite(Side s) {
  switch (s) {
    case Side::Left:
      return Side::Right;
    case Side::Right:
      return Side::Left;
    case Side::Top:
      return Side::Bottom;
    case Side::Bottom:
      break;
  }
  return Side::Top;
}

Metric parse_metric(const std::string& s) {
  if (s == "ssd") {
    return Metric::Ssd;
  }
  if (s == "mgc") {
    return Metric::Mgc;
  }
  throw ParameterError("unknown metric '" + s + "' (expected ssd or mgc)");
}

std::string to_string(Metric m) { return m == Metric::Ssd ? "ssd" : "mgc"; }

TileEdges extract_edges(const Image& tile) {
  if (tile.empty()) {
    throw ShapeError("empty tile");
  }
  const int w = tile.width();
  const int h = tile.height();
  TileEdges e;
  e.outer[static_cast<int>(Side::Left)] = column(tile, 0);
  e.inner[static_cast<int>(Side::Left)] = column(tile, w > 1 ? 1 : 0);
  e.outer[static_cast<int>(Side::Right)] = column(tile, w - 1);
  e.inner[static_cast<int>(Side::Right)] = column(tile, w > 1 ? w - 2 : 0);
  e.outer[static_cast<int>(Side::Top)] = row(tile, 0);
  e.inner[static_cast<int>(Side::Top)] = row(tile, h > 1 ? 1 : 0);
  e.outer[static_cast<int>(Side::Bottom)] = row(tile, h - 1);
  e.inner[static_cast<int>(Side::Bottom)] = row(tile, h > 1 ? h - 2 : 0);
  return e;
}

std::int64_t edge_ssd(const TileEdges& a, const TileEdges& b, Side side) {
  check_lengths(a, b, side);
  const auto& x = a.outer_of(side);
  const auto& y = b.outer_of(opposite(side));
  std::int64_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::int64_t d = x[i] - y[i];
    total += d * d;
  }
  return total;
}

double edge_mgc(const TileEdges& a, const TileEdges& b, Side side) {
  check_lengths(a, b, side);
  return mgc_one_way(a, b, side) + mgc_one_way(b, a, opposite(side));
}

double boundary_dissimilarity(const Image& a, const Image& b, Side side) {
  const bool horizontal = side == Side::Left || side == Side::Right;
  const int la = horizontal ? a.height() : a.width();
  const int lb = horizontal ? b.height() : b.width();
  if (la != lb || la == 0) {
    throw ShapeError("tiles do not share an edge length (" + std::to_string(la) + " vs " +
                     std::to_string(lb) + ")");
  }
  return static_cast<double>(edge_ssd(extract_edges(a), extract_edges(b), side)) / la;
}

}  // namespace jigsaw
