#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "jigsaw/datasets.hpp"
#include "jigsaw/image_io.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw::testing {
namespace fs = std::filesystem;

const std::vector<fs::path>& photo_paths() {
  static const std::vector<fs::path> paths = [] {
    std::vector<fs::path> out;
    std::stringstream list(JIGSAW_TEST_PHOTOS);
    std::string item;
    while (std::getline(list, item, '|')) {
      if (!item.empty() && fs::exists(item)) {
        out.emplace_back(item);
      }
    }
    return out;
  }();
  return paths;
}

int natural_image_count() {
  return photo_paths().empty() ? 11 : static_cast<int>(photo_paths().size());
}

Image natural_image(int i, int size) {
  const auto& photos = photo_paths();
  if (photos.empty()) {
    return procedural_scene(static_cast<std::uint64_t>(i) + 1, size);
  }
  const Image img = read_image(photos[static_cast<std::size_t>(i) % photos.size()]);
  const int side = std::min(img.width(), img.height());
  const Image square = img.crop((img.width() - side) / 2, (img.height() - side) / 2, side, side);
  return resize(square, size, size, ResizeKernel::Bilinear);
}

Image procedural_scene(std::uint64_t seed, int size) {
  RandomStream rng(seed);
  double base[3][3];
  for (auto& c : base) {
    c[0] = 40 + 170 * rng.unit();
    c[1] = (rng.unit() - 0.5) * 160.0 / size;
    c[2] = (rng.unit() - 0.5) * 160.0 / size;
  }
  struct Disc {
    double x, y, r, col[3];
  };
  std::vector<Disc> discs(6);
  for (Disc& d : discs) {
    d.x = rng.unit() * size;
    d.y = rng.unit() * size;
    d.r = (0.08 + 0.25 * rng.unit()) * size;
    for (double& c : d.col) {
      c = (rng.unit() - 0.5) * 180;
    }
  }
  Image img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) {
        double v = base[c][0] + base[c][1] * x + base[c][2] * y;
        for (const Disc& d : discs) {
          const double dist = std::hypot(x - d.x, y - d.y) / d.r;
          v += d.col[c] * std::exp(-dist * dist);
        }
        v += 12 * std::sin(0.07 * x + 0.05 * y + c);
        img.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return img;
}

Image noise_image(int width, int height, std::uint64_t seed) {
  RandomStream rng(seed);
  Image img(width, height);
  for (std::uint8_t& v : img.data()) {
    v = static_cast<std::uint8_t>(rng.uniform(256));
  }
  return img;
}

Image gradient_image(int width, int height) {
  Image img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>(std::clamp(x * 255 / std::max(1, width - 1), 0, 255));
      img.at(x, y, 1) = static_cast<std::uint8_t>(std::clamp(y * 255 / std::max(1, height - 1), 0, 255));
      img.at(x, y, 2) = static_cast<std::uint8_t>(std::clamp((x + y) * 255 / std::max(1, width + height - 2), 0, 255));
    }
  }
  return img;
}

Image constant_image(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  }
  return img;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("jigsaw_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

MetricOracle metric_oracle(const Assembly& a, const Assembly& t) {
  const int rows = t.rows;
  const int cols = t.cols;
  const int n = rows * cols;
  int fixed = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      fixed += a.at(r, c) == t.at(r, c);
    }
  }
  // Where each id sits in the assembly.
  std::map<int, std::pair<int, int>> where;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      where[a.at(r, c)] = {r, c};
    }
  }
  // Truth adjacencies (x then y to the right, or x then y below) that hold
  // in the assembly as well.
  std::set<std::pair<int, int>> joined;
  int total = 0;
  int kept = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int x = t.at(r, c);
      if (c + 1 < cols) {
        ++total;
        const int y = t.at(r, c + 1);
        if (where[y] == std::make_pair(where[x].first, where[x].second + 1)) {
          ++kept;
          joined.insert({x, y});
        }
      }
      if (r + 1 < rows) {
        ++total;
        const int y = t.at(r + 1, c);
        if (where[y] == std::make_pair(where[x].first + 1, where[x].second)) {
          ++kept;
          joined.insert({x, y});
        }
      }
    }
  }
  // Largest component by repeated flood fill.
  std::set<int> seen;
  int largest = 0;
  for (int start = 0; start < n; ++start) {
    if (seen.count(start)) {
      continue;
    }
    std::vector<int> stack{start};
    seen.insert(start);
    int size = 0;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++size;
      for (const auto& [p, q] : joined) {
        for (auto [from, to] : {std::pair{p, q}, {q, p}}) {
          if (from == v && !seen.count(to)) {
            seen.insert(to);
            stack.push_back(to);
          }
        }
      }
    }
    largest = std::max(largest, size);
  }
  return {static_cast<double>(fixed) / n, total ? static_cast<double>(kept) / total : 1.0,
          static_cast<double>(largest) / n};
}

}  // namespace jigsaw::testing
