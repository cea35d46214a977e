#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>

#include "jigsaw/error.hpp"
#include "jigsaw/random.hpp"
#include "jigsaw/solver.hpp"
#include "support.hpp"

namespace jigsaw {
namespace {

using testing::constant_image;
using testing::gradient_image;
using testing::natural_image;

// Score 0 between true neighbours (piece ids laid out row-major), 1
// everywhere else.
CompatibilityTable truth_table(int rows, int cols) {
  const int n = rows * cols;
  std::vector<double> h(static_cast<std::size_t>(n) * n, 1.0);
  std::vector<double> v(h);
  for (int i = 0; i < n; ++i) {
    if (i % cols + 1 < cols) {
      h[static_cast<std::size_t>(i) * n + i + 1] = 0;
    }
    if (i + cols < n) {
      v[static_cast<std::size_t>(i) * n + i + cols] = 0;
    }
  }
  return CompatibilityTable(n, h, v);
}

GaParams small_ga(std::uint64_t seed = 1) {
  GaParams p;
  p.population_size = 60;
  p.generations = 20;
  p.random_seed = seed;
  return p;
}

TEST(Compatibility, TableSize) {
  const BlockGrid g = split_blocks(natural_image(0, 64), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  EXPECT_EQ(t.size(), 16);
  EXPECT_EQ(t.entry_count(), 16u * 16u * 4u);
}

TEST(Compatibility, MirrorSymmetryIsExact) {
  const BlockGrid g = split_blocks(natural_image(1, 64), 16);
  for (Metric m : {Metric::Ssd, Metric::Mgc}) {
    const CompatibilityTable t = build_compatibility(g.blocks, m);
    for (int i = 0; i < t.size(); ++i) {
      for (int j = 0; j < t.size(); ++j) {
        EXPECT_EQ(t.score(i, j, Relation::Right), t.score(j, i, Relation::Left));
        EXPECT_EQ(t.score(i, j, Relation::Below), t.score(j, i, Relation::Above));
      }
    }
  }
}

TEST(Compatibility, ScoresMatchBoundaryDissimilarity) {
  const BlockGrid g = split_blocks(natural_image(2, 48), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  EXPECT_DOUBLE_EQ(t.score(0, 4, Relation::Right) / 16.0, boundary_dissimilarity(g.blocks[0], g.blocks[4], Side::Right));
  EXPECT_DOUBLE_EQ(t.score(2, 7, Relation::Below) / 16.0, boundary_dissimilarity(g.blocks[2], g.blocks[7], Side::Bottom));
}

TEST(Compatibility, ConstantBlocksTieByLowestIndex) {
  const std::vector<Image> blocks(3, constant_image(16, 16, 9, 9, 9));
  const CompatibilityTable t = build_compatibility(blocks);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(t.score(i, j, Relation::Right), 0.0);
    }
  }
  EXPECT_EQ(t.best(0, Relation::Right), 1);
  EXPECT_EQ(t.best(2, Relation::Right), 0);
  EXPECT_TRUE(t.best_buddies(0, 1, Relation::Right));
  EXPECT_FALSE(t.best_buddies(2, 0, Relation::Right));
}

TEST(Compatibility, GradientNeighbourIsArgmin) {
  const BlockGrid g = split_blocks(gradient_image(64, 64), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int i = r * 4 + c;
      EXPECT_EQ(t.best(i, Relation::Right), i + 1) << i;
    }
  }
}

TEST(Compatibility, RejectsTooFewOrUnevenPieces) {
  EXPECT_THROW(build_compatibility(std::vector<Image>{Image(16, 16)}), ShapeError);
  EXPECT_THROW(build_compatibility(std::vector<Image>{Image(16, 16), Image(8, 8)}), ShapeError);
}

TEST(Fitness, SinglePieceIsZero) {
  const CompatibilityTable t(1, {0.0}, {0.0});
  EXPECT_EQ(fitness(Assembly{1, 1, {0}}, t), 0.0);
}

TEST(Fitness, SumsAdjacentPairs) {
  const CompatibilityTable t = truth_table(2, 2);
  EXPECT_EQ(fitness(identity_assembly(2, 2), t), 0.0);
  // [[1,0],[2,3]]: 1|0 = 1, 2|3 = 0, 1 over 2 = 1, 0 over 3 = 1.
  EXPECT_EQ(fitness(Assembly{2, 2, {1, 0, 2, 3}}, t), 3.0);
}

TEST(Fitness, InvariantUnderRelabeling) {
  const BlockGrid g = split_blocks(natural_image(3, 48), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  RandomStream s(4);
  const std::vector<int> sigma = draw_permutation(s, 9);
  std::vector<Image> relabeled(9);
  for (int i = 0; i < 9; ++i) {
    relabeled[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = g.blocks[static_cast<std::size_t>(i)];
  }
  const CompatibilityTable t2 = build_compatibility(relabeled);
  const Assembly a{3, 3, draw_permutation(s, 9)};
  Assembly a2 = a;
  for (int& id : a2.cells) {
    id = sigma[static_cast<std::size_t>(id)];
  }
  EXPECT_EQ(fitness(a, t), fitness(a2, t2));
}

TEST(Fitness, TruthBeatsRandomAssembliesOnGradient) {
  const BlockGrid g = split_blocks(gradient_image(96, 96), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  const double truth = fitness(identity_assembly(6, 6), t);
  RandomStream s(5);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_LE(truth, fitness(Assembly{6, 6, draw_permutation(s, 36)}, t));
  }
}

TEST(Solver, MatchesBruteForceOnTwoByTwo) {
  for (int img = 0; img < 4; ++img) {
    const BlockGrid g = split_blocks(natural_image(img, 32), 16);
    const CompatibilityTable t = build_compatibility(g.blocks);
    std::vector<int> p{0, 1, 2, 3};
    double best = std::numeric_limits<double>::infinity();
    do {
      best = std::min(best, fitness(Assembly{2, 2, p}, t));
    } while (std::next_permutation(p.begin(), p.end()));
    const SolveResult r = solve_puzzle(t, 2, 2, small_ga());
    EXPECT_EQ(r.fitness, best) << "image " << img;
    EXPECT_EQ(fitness(r.assembly, t), r.fitness);
  }
}

TEST(Solver, FindsUniqueZeroOptimum) {
  for (auto [rows, cols] : {std::pair{2, 2}, {3, 3}, {4, 4}, {2, 5}, {3, 4}}) {
    EXPECT_EQ(ga_solve(truth_table(rows, cols), rows, cols, GaParams{}), identity_assembly(rows, cols))
        << rows << "x" << cols;
  }
}

TEST(Solver, PopulationStaysValidAndBestNeverWorsens) {
  const BlockGrid g = split_blocks(natural_image(5, 96), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  int generations_seen = 0;
  const SolveResult r = solve_puzzle(t, 6, 6, small_ga(3), [&](int, std::span<const Assembly> pop) {
    ++generations_seen;
    for (const Assembly& a : pop) {
      ASSERT_TRUE(a.is_bijection());
      ASSERT_EQ(a.rows, 6);
      ASSERT_EQ(a.cols, 6);
    }
  });
  EXPECT_EQ(generations_seen, 21);
  EXPECT_EQ(r.generations_run, 20);
  ASSERT_FALSE(r.best_fitness_per_generation.empty());
  for (std::size_t i = 1; i < r.best_fitness_per_generation.size(); ++i) {
    EXPECT_LE(r.best_fitness_per_generation[i], r.best_fitness_per_generation[i - 1]);
  }
  EXPECT_EQ(r.fitness, r.best_fitness_per_generation.back());
}

TEST(Solver, ReproducibleForFixedSeed) {
  const BlockGrid g = split_blocks(natural_image(6, 112), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  const SolveResult a = solve_puzzle(t, 7, 7, small_ga(9));
  const SolveResult b = solve_puzzle(t, 7, 7, small_ga(9));
  EXPECT_EQ(a.assembly, b.assembly);
  EXPECT_EQ(a.best_fitness_per_generation, b.best_fitness_per_generation);
}

TEST(Solver, TimeBudgetReturnsBestSoFar) {
  const BlockGrid g = split_blocks(natural_image(7), 16);
  const CompatibilityTable t = build_compatibility(g.blocks);
  GaParams p;
  p.time_budget = std::chrono::milliseconds(1);
  const SolveResult r = solve_puzzle(t, 14, 14, p);
  EXPECT_TRUE(r.timed_out);
  EXPECT_TRUE(r.assembly.is_bijection());
  EXPECT_EQ(fitness(r.assembly, t), r.fitness);
}

TEST(Solver, SolvesNoiseFreeNaturalImage) {
  const Image img = natural_image(2);
  const BlockGrid g = split_blocks(img, 16);
  RandomStream s(31);
  const std::vector<int> perm = draw_permutation(s, 196);
  std::vector<Image> shuffled(196);
  for (int q = 0; q < 196; ++q) {
    shuffled[static_cast<std::size_t>(q)] = g.blocks[static_cast<std::size_t>(perm[static_cast<std::size_t>(q)])];
  }
  const SolveResult r = solve_puzzle(build_compatibility(shuffled), 14, 14, GaParams{});
  int correct = 0;
  for (int pos = 0; pos < 196; ++pos) {
    correct += perm[static_cast<std::size_t>(r.assembly.cells[static_cast<std::size_t>(pos)])] == pos;
  }
  EXPECT_GT(correct, 150);
}

TEST(Solver, RejectsBadParameters) {
  const CompatibilityTable t = truth_table(2, 2);
  GaParams p;
  p.population_size = 1;
  EXPECT_THROW(solve_puzzle(t, 2, 2, p), ParameterError);
  p = GaParams{};
  p.mutation_rate = 2;
  EXPECT_THROW(solve_puzzle(t, 2, 2, p), ParameterError);
  EXPECT_THROW(solve_puzzle(t, 3, 2, GaParams{}), ShapeError);
}

TEST(Render, PlacesPiecesByAssembly) {
  const BlockGrid g = split_blocks(natural_image(0, 32), 16);
  const Image out = render_assembly(Assembly{2, 2, {3, 2, 1, 0}}, g.blocks);
  EXPECT_EQ(out.crop(0, 0, 16, 16), g.blocks[3]);
  EXPECT_EQ(out.crop(16, 16, 16, 16), g.blocks[0]);
}

}  // namespace
}  // namespace jigsaw
