#pragma once

#include <span>
#include <vector>

#include "jigsaw/assembly.hpp"

namespace jigsaw {

// Reconstruction quality of an assembly against the ground truth; all three
// lie in [0, 1] and smaller values mean less recognizable content.
struct MetricsReport {
  double dc = 0.0;  // blocks at their exact position
  double nc = 0.0;  // adjacent pairs joined with their true offset
  double lc = 0.0;  // largest correctly-joined component
};

// All three throw ShapeError unless both grids have the same shape and hold
// the same set of ids.
double direct_comparison(const Assembly& assembly, const Assembly& truth);
double neighbor_comparison(const Assembly& assembly, const Assembly& truth);
double largest_component(const Assembly& assembly, const Assembly& truth);

MetricsReport evaluate(const Assembly& assembly, const Assembly& truth);

// Box-and-whisker statistics. Quartiles interpolate linearly between order
// statistics; whiskers reach the most extreme observations inside
// [Q1 - 1.5 IQR, Q3 + 1.5 IQR]; everything beyond is an outlier.
struct BoxplotSummary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
  std::size_t n = 0;
};

// Throws ParameterError on an empty list.
BoxplotSummary summarize(std::span<const double> values);

// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace jigsaw
