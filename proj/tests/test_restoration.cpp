#include <gtest/gtest.h>

#include <numeric>

#include "jigsaw/attack.hpp"
#include "jigsaw/restoration.hpp"
#include "jigsaw/solver.hpp"
#include "support.hpp"

namespace jigsaw {
namespace {

using testing::natural_image;

CipherPlan unpermuted_plan(std::uint64_t seed, int blocks) {
  CipherPlan plan = generate_pattern(derive_keys(seed), {}, blocks);
  std::iota(plan.block_perm.begin(), plan.block_perm.end(), 0);
  return plan;
}

// Applies `g` to every m×m block of img in place.
Image orient_blocks(const Image& img, Orientation g, int m) {
  BlockGrid grid = split_blocks(img, m);
  for (Image& b : grid.blocks) {
    Image out(m, m);
    for (int c = 0; c < 3; ++c) {
      orient_plane(g, m, b.data().subspan(c), m * 3, 3, out.data().subspan(c), m * 3, 3);
    }
    b = out;
  }
  return merge_blocks(grid);
}

// True when every channel of `got` equals some channel of `want`, possibly
// inverted, with the three channels used once each.
bool equal_up_to_channel_relabel(const Image& got, const Image& want) {
  std::array<bool, 3> used{};
  for (int c = 0; c < 3; ++c) {
    bool matched = false;
    for (int s = 0; s < 3 && !matched; ++s) {
      for (bool inv : {false, true}) {
        if (used[static_cast<std::size_t>(s)] || matched) {
          continue;
        }
        bool same = true;
        for (int y = 0; y < got.height() && same; ++y) {
          for (int x = 0; x < got.width() && same; ++x) {
            same = got.at(x, y, c) == negpos(want.at(x, y, s), inv);
          }
        }
        if (same) {
          used[static_cast<std::size_t>(s)] = true;
          matched = true;
        }
      }
    }
    if (!matched) {
      return false;
    }
  }
  return true;
}

TEST(Restoration, TrueInverseUndoesThePattern) {
  const Image img = natural_image(0);
  const CipherPlan plan = unpermuted_plan(5, 196);
  const Image enc = encrypt_with(img, plan, 16);
  EXPECT_EQ(apply_hypothesis(enc, true_inverse(plan.patterns[0]), 16), img);
}

TEST(Restoration, RecoversUnpermutedEncryptionUpToGlobalSymmetries) {
  for (int i = 0; i < 3; ++i) {
    const Image img = natural_image(i);
    const CipherPlan plan = unpermuted_plan(100 + i, 196);
    const Image enc = encrypt_with(img, plan, 16);
    const auto [restored, hyp] = restore_subblocks(enc, {});
    EXPECT_EQ(restored.width(), img.width());
    EXPECT_EQ(restored.height(), img.height());
    const RestorationHypothesis truth = true_inverse(plan.patterns[0]);
    EXPECT_LE(hyp.score, hypothesis_score(enc, truth, 16) + 1e-9);
    EXPECT_DOUBLE_EQ(hyp.score, hypothesis_score(enc, hyp, 16));
    EXPECT_GE(hyp.tied_arrangements, 8);
    const auto g = block_symmetry(hyp, truth);
    ASSERT_TRUE(g.has_value()) << "image " << i;
    EXPECT_TRUE(equal_up_to_channel_relabel(restored, orient_blocks(img, *g, 16))) << "image " << i;
  }
}

TEST(Restoration, PlainImageKeepsIdentityOptimal) {
  const Image img = natural_image(2);
  const auto [restored, hyp] = restore_subblocks(img, {});
  EXPECT_LE(hyp.score, hypothesis_score(img, RestorationHypothesis{}, 16) + 1e-9);
  const auto g = block_symmetry(hyp, RestorationHypothesis{});
  ASSERT_TRUE(g.has_value());
  EXPECT_TRUE(equal_up_to_channel_relabel(restored, orient_blocks(img, *g, 16)));
}

TEST(Restoration, WorksThroughTheBlockPermutation) {
  const Image img = natural_image(1);
  const CipherPlan plan = generate_pattern(derive_keys(8), {}, 196);
  const Image enc = encrypt_with(img, plan, 16);
  const auto [restored, hyp] = restore_subblocks(enc, {});
  EXPECT_TRUE(block_symmetry(hyp, true_inverse(plan.patterns[0])).has_value());
}

TEST(Restoration, Deterministic) {
  const Image enc = encrypt_with(natural_image(3), generate_pattern(derive_keys(9), {}, 196), 16);
  const auto a = restore_subblocks(enc, {});
  const auto b = restore_subblocks(enc, {});
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Restoration, BlockSymmetryOfTransformedHypothesis) {
  const RestorationHypothesis truth = true_inverse(generate_pattern(derive_keys(3), {}, 4).patterns[0]);
  EXPECT_EQ(block_symmetry(truth, truth), Orientation(0));
  RestorationHypothesis other = truth;
  std::swap(other.source_position[0], other.source_position[1]);
  EXPECT_FALSE(block_symmetry(other, truth).has_value());
}

// Inverting every sample or relabeling channels leaves every boundary score,
// and so the solver's output, unchanged.
TEST(Restoration, GlobalAmbiguitiesDoNotMoveTheAssembly) {
  const Image img = natural_image(4, 96);
  const Image enc = encrypt_with(img, generate_pattern(derive_keys(10), {}, 36), 16);
  const Image restored = restore_subblocks(enc, {}).first;
  Image inverted = restored;
  for (std::uint8_t& v : inverted.data()) {
    v = static_cast<std::uint8_t>(255 - v);
  }
  Image relabeled = restored;
  for (int y = 0; y < restored.height(); ++y) {
    for (int x = 0; x < restored.width(); ++x) {
      relabeled.at(x, y, 0) = restored.at(x, y, 2);
      relabeled.at(x, y, 1) = restored.at(x, y, 0);
      relabeled.at(x, y, 2) = restored.at(x, y, 1);
    }
  }
  GaParams ga;
  ga.population_size = 40;
  ga.generations = 10;
  auto solve = [&](const Image& im) {
    const BlockGrid grid = split_blocks(im, 16);
    return solve_puzzle(build_compatibility(grid.blocks), grid.rows, grid.cols, ga).assembly;
  };
  const Assembly base = solve(restored);
  EXPECT_EQ(solve(inverted), base);
  EXPECT_EQ(solve(relabeled), base);
}

TEST(Restoration, AttackScoresAgainstAlignedTruth) {
  const Image img = natural_image(0, 96);
  const CipherPlan plan = generate_pattern(derive_keys(2), {}, 36);
  const AttackResult r = attack(encrypt_with(img, plan, 16), {}, AttackOptions{});
  EXPECT_TRUE(r.assembly.is_bijection());
  const Assembly truth = aligned_truth(r, plan, 6, 6);
  EXPECT_TRUE(truth.is_bijection());
  const MetricsReport rep = score_attack(r, plan, 6, 6);
  EXPECT_EQ(rep.dc, evaluate(r.assembly, truth).dc);
}

}  // namespace
}  // namespace jigsaw
