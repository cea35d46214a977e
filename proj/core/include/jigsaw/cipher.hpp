#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "jigsaw/dihedral.hpp"
#include "jigsaw/image.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {

using ChannelPerm = std::array<int, 3>;

// The six orderings of (R, G, B), lexicographic.
const std::array<ChannelPerm, 6>& channel_permutations();
ChannelPerm inverse(const ChannelPerm& p);

// Negative-positive transform of one sample: p when r is false, p XOR 255
// otherwise.
constexpr std::uint8_t negpos(std::uint8_t p, bool r) {
  return r ? static_cast<std::uint8_t>(p ^ 0xFF) : p;
}

// Per sub-block position. Orientation and polarity are indexed by the
// channel before shuffling; after shuffling, output channel c carries input
// channel channel_perm[c].
struct SubBlockTransform {
  std::array<Orientation, 3> orientation{};
  std::array<bool, 3> polarity{};
  ChannelPerm channel_perm{0, 1, 2};

  friend bool operator==(const SubBlockTransform&, const SubBlockTransform&) = default;
};

// Sub-block positions are numbered 0 top-left, 1 top-right, 2 bottom-left,
// 3 bottom-right. Position s of the output receives source sub-block
// subblock_perm[s], and transforms[s] is then applied to it.
struct BlockPattern {
  std::array<int, 4> subblock_perm{0, 1, 2, 3};
  std::array<SubBlockTransform, 4> transforms{};

  friend bool operator==(const BlockPattern&, const BlockPattern&) = default;
};

struct CipherConfig {
  int m = 16;
  double negpos_probability = 0.5;
  // Draw a fresh BlockPattern for every block instead of sharing one.
  bool per_block_pattern = false;
};

// Throws ParameterError for odd/non-positive m or a probability outside [0, 1].
void validate(const CipherConfig& cfg);

// Everything the key schedule produces for one image. Encrypted grid cell q
// holds plaintext block block_perm[q]. `patterns` has one entry, or one per
// block when per_block_pattern is set.
struct CipherPlan {
  std::vector<int> block_perm;
  std::vector<BlockPattern> patterns;

  const BlockPattern& pattern_for(std::size_t block) const {
    return patterns.size() == 1 ? patterns.front() : patterns[block];
  }
};

// Key usage: K1 block permutation, K2 sub-block permutation, K3 orientations
// and K4 polarity bits through one sub-stream per channel, K5 channel
// shuffles (one per sub-block position).
CipherPlan generate_pattern(const KeySet& keys, const CipherConfig& cfg, int block_count,
                            const StreamFactory& streams = default_stream_factory());

Image encrypt(const Image& img, const KeySet& keys, const CipherConfig& cfg,
              const StreamFactory& streams = default_stream_factory());
Image decrypt(const Image& img, const KeySet& keys, const CipherConfig& cfg,
              const StreamFactory& streams = default_stream_factory());

Image encrypt_with(const Image& img, const CipherPlan& plan, int m);
Image decrypt_with(const Image& img, const CipherPlan& plan, int m);

// Row-major grid of encrypted-cell indices: entry r*cols+c names the
// encrypted cell holding the plaintext block from (r, c).
std::vector<int> truth_layout(const CipherPlan& plan);

// Individual intra-block steps on one M×M block, forward and inverse.
namespace steps {
Image permute_subblocks(const Image& block, const std::array<int, 4>& perm);
Image unpermute_subblocks(const Image& block, const std::array<int, 4>& perm);
Image orient(const Image& block, const BlockPattern& pattern);
Image unorient(const Image& block, const BlockPattern& pattern);
// Involution.
Image negpos(const Image& block, const BlockPattern& pattern);
Image shuffle_channels(const Image& block, const BlockPattern& pattern);
Image unshuffle_channels(const Image& block, const BlockPattern& pattern);

Image apply_pattern(const Image& block, const BlockPattern& pattern);
Image invert_pattern(const Image& block, const BlockPattern& pattern);

BlockGrid permute_blocks(const BlockGrid& grid, const std::vector<int>& perm);
BlockGrid unpermute_blocks(const BlockGrid& grid, const std::vector<int>& perm);
}  // namespace steps

// Key files are JSON objects {"k1": "0x...", ..., "k5": "0x..."} holding
// 64-bit hexadecimal seeds.
KeySet read_key_file(const std::filesystem::path& path);
void write_key_file(const std::filesystem::path& path, const KeySet& keys);
std::string format_keys(const KeySet& keys);
KeySet parse_keys(const std::string& text);

}  // namespace jigsaw
