#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "jigsaw/cipher.hpp"
#include "jigsaw/error.hpp"
#include "support.hpp"

namespace jigsaw {
namespace {

using testing::constant_image;
using testing::noise_image;
using testing::scratch_dir;

StreamFactory zero_streams() {
  return [](std::uint64_t) { return RandomStream::from_source([] { return std::uint64_t{0}; }); };
}

TEST(NegPos, TabledValues) {
  EXPECT_EQ(negpos(0, true), 255);
  EXPECT_EQ(negpos(200, false), 200);
  EXPECT_EQ(negpos(200, true), 55);
  EXPECT_EQ(negpos(128, true), 127);
}

TEST(NegPos, Involution) {
  for (int p = 0; p < 256; ++p) {
    for (bool r : {false, true}) {
      EXPECT_EQ(negpos(negpos(static_cast<std::uint8_t>(p), r), r), p);
    }
  }
}

TEST(GeneratePattern, Deterministic) {
  const KeySet k = derive_keys(11);
  const CipherPlan a = generate_pattern(k, {}, 196);
  const CipherPlan b = generate_pattern(k, {}, 196);
  EXPECT_EQ(a.block_perm, b.block_perm);
  EXPECT_EQ(a.patterns, b.patterns);
}

TEST(GeneratePattern, K1OnlyDrivesTheBlockPermutation) {
  KeySet a = derive_keys(3);
  KeySet b = a;
  b.k1 ^= 0x5555;
  const CipherPlan pa = generate_pattern(a, {}, 196);
  const CipherPlan pb = generate_pattern(b, {}, 196);
  EXPECT_EQ(pa.patterns, pb.patterns);
  EXPECT_NE(pa.block_perm, pb.block_perm);
}

TEST(GeneratePattern, SharedPatternUnlessPerBlock) {
  const KeySet k = derive_keys(4);
  EXPECT_EQ(generate_pattern(k, {}, 196).patterns.size(), 1u);
  CipherConfig cfg;
  cfg.per_block_pattern = true;
  const CipherPlan plan = generate_pattern(k, cfg, 196);
  ASSERT_EQ(plan.patterns.size(), 196u);
  EXPECT_NE(plan.patterns[0], plan.patterns[1]);
}

// Every polarity bit (4 positions × 3 channels) over 10^4 key sets is set
// with frequency 0.5 ± 3σ, σ = sqrt(0.25 / 10^4) = 0.005.
TEST(GeneratePattern, PolarityBitFrequency) {
  constexpr int kKeys = 10000;
  int ones[4][3] = {};
  for (int i = 0; i < kKeys; ++i) {
    const BlockPattern p = generate_pattern(derive_keys(1000000 + i), {}, 4).patterns[0];
    for (int s = 0; s < 4; ++s) {
      for (int c = 0; c < 3; ++c) {
        ones[s][c] += p.transforms[s].polarity[c] ? 1 : 0;
      }
    }
  }
  for (int s = 0; s < 4; ++s) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(ones[s][c] / static_cast<double>(kKeys), 0.5, 0.015) << "position " << s << " channel " << c;
    }
  }
}

TEST(GeneratePattern, RejectsBadConfig) {
  CipherConfig cfg;
  cfg.m = 15;
  EXPECT_THROW(validate(cfg), ParameterError);
  cfg.m = 16;
  cfg.negpos_probability = 1.5;
  EXPECT_THROW(validate(cfg), ParameterError);
  EXPECT_THROW(generate_pattern(derive_keys(1), {}, 0), ParameterError);
}

TEST(Encrypt, WorkingSizeCounts) {
  const Image img = noise_image(224, 224, 1);
  const CipherPlan plan = generate_pattern(derive_keys(1), {}, 196);
  EXPECT_EQ(plan.block_perm.size(), 196u);
  const Image enc = encrypt_with(img, plan, 16);
  EXPECT_EQ(enc.width(), 224);
  EXPECT_EQ(enc.height(), 224);
  EXPECT_EQ(split_blocks(enc, 16).count(), 196u);
  EXPECT_EQ(split_blocks(enc, 8).count(), 784u);
  EXPECT_NE(enc, img);
}

TEST(Encrypt, IdentityDrawsLeaveImageUnchanged) {
  const Image img = noise_image(64, 48, 2);
  EXPECT_EQ(encrypt(img, derive_keys(9), {}, zero_streams()), img);
}

TEST(Encrypt, MovesSamplesWithoutPolarityOrShuffle) {
  const KeySet keys = derive_keys(21);
  CipherConfig cfg;
  cfg.negpos_probability = 0;
  const StreamFactory fixed_channels = [&](std::uint64_t seed) {
    if (seed == keys.k5) {
      return RandomStream::from_source([] { return std::uint64_t{0}; });
    }
    return RandomStream(seed);
  };
  const Image img = noise_image(96, 96, 5);
  const Image enc = encrypt(img, keys, cfg, fixed_channels);
  EXPECT_NE(enc, img);
  for (int c = 0; c < 3; ++c) {
    std::vector<std::uint8_t> a;
    std::vector<std::uint8_t> b;
    for (int y = 0; y < 96; ++y) {
      for (int x = 0; x < 96; ++x) {
        a.push_back(img.at(x, y, c));
        b.push_back(enc.at(x, y, c));
      }
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b) << "channel " << c;
  }
}

TEST(Encrypt, RoundTripManyKeys) {
  for (int i = 0; i < 20; ++i) {
    const Image img = noise_image(224, 224, 500 + i);
    for (int k = 0; k < 5; ++k) {
      const KeySet keys = derive_keys(static_cast<std::uint64_t>(i) * 10 + k);
      EXPECT_EQ(decrypt(encrypt(img, keys, {}), keys, {}), img);
    }
  }
}

TEST(Encrypt, RoundTripPerBlockPatternAndOtherBlockSizes) {
  CipherConfig cfg;
  cfg.per_block_pattern = true;
  for (int m : {2, 8, 16, 32}) {
    cfg.m = m;
    const Image img = noise_image(96, 64, static_cast<std::uint64_t>(m));
    const KeySet keys = derive_keys(static_cast<std::uint64_t>(m) + 100);
    EXPECT_EQ(decrypt(encrypt(img, keys, cfg), keys, cfg), img) << "m=" << m;
  }
}

TEST(Encrypt, WrongKeyDoesNotDecrypt) {
  const Image img = testing::natural_image(0, 224);
  const Image enc = encrypt(img, derive_keys(1), {});
  EXPECT_NE(decrypt(enc, derive_keys(2), {}), img);
}

TEST(Encrypt, EverySingleKeyMatters) {
  const Image img = noise_image(224, 224, 8);
  for (int trial = 0; trial < 5; ++trial) {
    const KeySet base = derive_keys(300 + trial);
    const Image ref = encrypt(img, base, {});
    for (int which = 0; which < 5; ++which) {
      KeySet k = base;
      std::uint64_t* fields[] = {&k.k1, &k.k2, &k.k3, &k.k4, &k.k5};
      *fields[which] = mix64(*fields[which] + 1);
      EXPECT_NE(encrypt(img, k, {}), ref) << "key k" << which + 1;
    }
  }
}

TEST(Encrypt, GrayNeedsPolarityUndone) {
  const Image gray = constant_image(64, 64, 128, 128, 128);
  const KeySet keys = derive_keys(6);
  const CipherPlan plan = generate_pattern(keys, {}, 16);
  bool any_polarity = false;
  for (const SubBlockTransform& t : plan.patterns[0].transforms) {
    for (bool r : t.polarity) {
      any_polarity |= r;
    }
  }
  ASSERT_TRUE(any_polarity);
  const Image enc = encrypt_with(gray, plan, 16);
  EXPECT_NE(std::find(enc.data().begin(), enc.data().end(), 127), enc.data().end());
  EXPECT_EQ(decrypt_with(enc, plan, 16), gray);
}

TEST(Encrypt, RejectsIndivisibleImage) {
  EXPECT_THROW(encrypt(Image(224, 225), derive_keys(1), {}), DimensionError);
}

TEST(CipherSteps, EachStepInverts) {
  const Image block = noise_image(16, 16, 77);
  for (int i = 0; i < 30; ++i) {
    const BlockPattern p = generate_pattern(derive_keys(40 + i), {}, 1).patterns[0];
    EXPECT_EQ(steps::unpermute_subblocks(steps::permute_subblocks(block, p.subblock_perm), p.subblock_perm), block);
    EXPECT_EQ(steps::unorient(steps::orient(block, p), p), block);
    EXPECT_EQ(steps::negpos(steps::negpos(block, p), p), block);
    EXPECT_EQ(steps::unshuffle_channels(steps::shuffle_channels(block, p), p), block);
    EXPECT_EQ(steps::invert_pattern(steps::apply_pattern(block, p), p), block);
  }
  const BlockGrid grid = split_blocks(noise_image(64, 64, 78), 16);
  RandomStream s(5);
  const std::vector<int> perm = draw_permutation(s, 16);
  const BlockGrid back = steps::unpermute_blocks(steps::permute_blocks(grid, perm), perm);
  EXPECT_EQ(back.blocks, grid.blocks);
}

TEST(CipherSteps, BlockPermutationPlacesSourceBlock) {
  const BlockGrid grid = split_blocks(noise_image(64, 32, 3), 16);
  const std::vector<int> perm{3, 0, 7, 1, 2, 6, 5, 4};
  const BlockGrid out = steps::permute_blocks(grid, perm);
  for (int q = 0; q < 8; ++q) {
    EXPECT_EQ(out.blocks[static_cast<std::size_t>(q)], grid.blocks[static_cast<std::size_t>(perm[q])]);
  }
}

TEST(TruthLayout, NamesEncryptedCellOfEachPosition) {
  const CipherPlan plan = generate_pattern(derive_keys(12), {}, 196);
  const std::vector<int> layout = truth_layout(plan);
  for (int q = 0; q < 196; ++q) {
    EXPECT_EQ(layout[static_cast<std::size_t>(plan.block_perm[static_cast<std::size_t>(q)])], q);
  }
}

TEST(KeyFile, RoundTrip) {
  const auto dir = scratch_dir("keyfile");
  const KeySet k = derive_keys(77);
  write_key_file(dir / "k.json", k);
  EXPECT_EQ(read_key_file(dir / "k.json"), k);
  EXPECT_EQ(parse_keys(format_keys(k)), k);
}

TEST(KeyFile, RejectsMalformed) {
  EXPECT_THROW(parse_keys("{}"), FormatError);
  EXPECT_THROW(parse_keys("[1,2]"), FormatError);
  EXPECT_THROW(parse_keys(R"({"k1":"0xzz","k2":"0x1","k3":"0x1","k4":"0x1","k5":"0x1"})"), FormatError);
  EXPECT_THROW(parse_keys("not json"), FormatError);
}

}  // namespace
}  // namespace jigsaw
