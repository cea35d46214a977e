#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jigsaw/assembly.hpp"
#include "jigsaw/dissimilarity.hpp"
#include "jigsaw/image.hpp"

namespace jigsaw {

// Placement of piece j relative to piece i.
enum class Relation { Right = 0, Left = 1, Above = 2, Below = 3 };

Relation mirror(Relation r);

// Pairwise dissimilarities between all pieces for the four relations, with
// best-match rankings. Only the right-of and below scores are stored; the
// other two are read through the mirror, so
// score(i, j, Right) == score(j, i, Left) holds exactly.
class CompatibilityTable {
 public:
  CompatibilityTable() = default;
  // horizontal[i*n + j]: j right of i. vertical[i*n + j]: j below i.
  CompatibilityTable(int n, std::vector<double> horizontal, std::vector<double> vertical);

  int size() const { return n_; }
  std::size_t entry_count() const { return 4 * static_cast<std::size_t>(n_) * n_; }

  double score(int i, int j, Relation rel) const {
    switch (rel) {
      case Relation::Right:
        return horizontal_[static_cast<std::size_t>(i) * n_ + j];
      case Relation::Left:
        return horizontal_[static_cast<std::size_t>(j) * n_ + i];
      case Relation::Below:
        return vertical_[static_cast<std::size_t>(i) * n_ + j];
      case Relation::Above:
        break;
    }
    return vertical_[static_cast<std::size_t>(j) * n_ + i];
  }

  // Other pieces ordered by increasing score; ties by lower index.
  std::span<const int> ranked(int i, Relation rel) const {
    const std::size_t stride = static_cast<std::size_t>(n_ - 1);
    return std::span<const int>(ranked_).subspan(
        (static_cast<std::size_t>(i) * 4 + static_cast<int>(rel)) * stride, stride);
  }
  int best(int i, Relation rel) const { return n_ > 1 ? ranked(i, rel).front() : -1; }
  // j is i's best match for rel and i is j's best match for the mirror.
  bool best_buddies(int i, int j, Relation rel) const {
    return i != j && best(i, rel) == j && best(j, mirror(rel)) == i;
  }

 private:
  int n_ = 0;
  std::vector<double> horizontal_;
  std::vector<double> vertical_;
  std::vector<int> ranked_;
};

// Throws ShapeError for fewer than two pieces or non-uniform sizes.
CompatibilityTable build_compatibility(std::span<const Image> blocks, Metric metric = Metric::Ssd);

struct GaParams {
  int population_size = 300;
  int generations = 60;
  double elite_fraction = 0.05;
  double mutation_rate = 0.05;
  std::uint64_t random_seed = 1;
  // Stops early and returns the best assembly found so far.
  std::optional<std::chrono::milliseconds> time_budget;
};

void validate(const GaParams& params);

struct SolveResult {
  Assembly assembly;
  double fitness = 0.0;
  int generations_run = 0;
  bool timed_out = false;
  std::vector<double> best_fitness_per_generation;
};

// Called with the full population after it is formed for each generation
// (generation 0 is the random initial population).
using PopulationObserver = std::function<void(int generation, std::span<const Assembly>)>;

// Genetic jigsaw solver with kernel-growing crossover for pieces of known
// orientation, anchored to a rows×cols frame. Deterministic for a fixed seed
// (unless the time budget expires).
SolveResult solve_puzzle(const CompatibilityTable& table, int rows, int cols, const GaParams& params,
                         const PopulationObserver& observer = {});

Assembly ga_solve(const CompatibilityTable& table, int rows, int cols, const GaParams& params);

// Sum of the scores of all horizontally and vertically adjacent pairs.
double fitness(const Assembly& assembly, const CompatibilityTable& table);

// Pixel raster of the pieces laid out as in `assembly`.
Image render_assembly(const Assembly& assembly, std::span<const Image> blocks);

}  // namespace jigsaw
