#include "jigsaw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jigsaw/error.hpp"

namespace jigsaw {
namespace {

void check_compatible(const Assembly& a, const Assembly& t) {
  if (a.rows != t.rows || a.cols != t.cols) {
    throw ShapeError("assembly is " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     " but truth is " + std::to_string(t.rows) + "x" + std::to_string(t.cols));
  }
  if (!a.is_bijection() || !t.is_bijection()) {
    throw ShapeError("assembly and truth must each hold every block id exactly once");
  }
}

// Position of every id in the truth grid.
std::vector<int> positions(const Assembly& t) {
  std::vector<int> pos(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    pos[static_cast<std::size_t>(t.cells[i])] = static_cast<int>(i);
  }
  return pos;
}

// Calls fn(x, y) for each placed pair joined with its true offset.
template <typename Fn>
void for_each_correct_join(const Assembly& a, const Assembly& t, Fn&& fn) {
  const auto pos = positions(t);
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) {
      const int x = a.at(r, c);
      const int px = pos[x];
      if (c + 1 < a.cols) {
        const int y = a.at(r, c + 1);
        // y must sit directly right of x in the truth, within the same row.
        if (pos[y] == px + 1 && px % t.cols != t.cols - 1) {
          fn(x, y);
        }
      }
      if (r + 1 < a.rows) {
        const int y = a.at(r + 1, c);
        if (pos[y] == px + t.cols) {
          fn(x, y);
        }
      }
    }
  }
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

double direct_comparison(const Assembly& assembly, const Assembly& truth) {
  check_compatible(assembly, truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < assembly.size(); ++i) {
    hits += assembly.cells[i] == truth.cells[i];
  }
  return static_cast<double>(hits) / static_cast<double>(assembly.size());
}

double neighbor_comparison(const Assembly& assembly, const Assembly& truth) {
  check_compatible(assembly, truth);
  const int pairs = assembly.rows * (assembly.cols - 1) + assembly.cols * (assembly.rows - 1);
  if (pairs == 0) {
    return 1.0;
  }
  int joined = 0;
  for_each_correct_join(assembly, truth, [&](int, int) { ++joined; });
  return static_cast<double>(joined) / pairs;
}

double largest_component(const Assembly& assembly, const Assembly& truth) {
  check_compatible(assembly, truth);
  std::vector<int> parent(assembly.size());
  std::iota(parent.begin(), parent.end(), 0);
  for_each_correct_join(assembly, truth, [&](int x, int y) {
    const int rx = find_root(parent, x);
    const int ry = find_root(parent, y);
    if (rx != ry) {
      parent[rx] = ry;
    }
  });
  std::vector<int> sizes(assembly.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    best = std::max(best, ++sizes[find_root(parent, static_cast<int>(i))]);
  }
  return static_cast<double>(best) / static_cast<double>(assembly.size());
}

MetricsReport evaluate(const Assembly& assembly, const Assembly& truth) {
  return {direct_comparison(assembly, truth), neighbor_comparison(assembly, truth),
          largest_component(assembly, truth)};
}

double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

BoxplotSummary summarize(std::span<const double> values) {
  if (values.empty()) {
    throw ParameterError("cannot summarize an empty list");
  }
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxplotSummary s;
  s.n = v.size();
  s.q1 = quantile_sorted(v, 0.25);
  s.median = quantile_sorted(v, 0.5);
  s.q3 = quantile_sorted(v, 0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  bool have_low = false;
  for (const double x : v) {
    if (x < lo_fence || x > hi_fence) {
      s.outliers.push_back(x);
      continue;
    }
    if (!have_low) {
      s.whisker_low = x;
      have_low = true;
    }
    s.whisker_high = x;
  }
  return s;
}

}  // namespace jigsaw
