#pragma once

#include <array>
#include <optional>
#include <utility>

#include "jigsaw/cipher.hpp"
#include "jigsaw/dihedral.hpp"
#include "jigsaw/image.hpp"

namespace jigsaw {

// Estimated inverse of the shared intra-block pattern.
//
// Restored position t (0 top-left .. 3 bottom-right) takes the encrypted
// sub-block at source_position[t]. Its output channel c is built from the
// encrypted channel channel_source[t][c], first polarity-corrected
// (polarity[t][c]) and then reoriented (orientation[t][c]).
//
// Boundary smoothness cannot tell apart hypotheses that differ by
//  - inverting every sample of the image,
//  - relabeling the colour channels of the whole image,
//  - applying one dihedral transform to every block in place (the 8
//    equivalent arrangements are counted in `tied_arrangements`).
// None of these change block adjacency, so downstream assembly is unaffected
// up to the matching whole-image transform.
struct RestorationHypothesis {
  std::array<int, 4> source_position{0, 1, 2, 3};
  std::array<ChannelPerm, 4> channel_source{{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}}};
  std::array<std::array<Orientation, 3>, 4> orientation{};
  std::array<std::array<bool, 3>, 4> polarity{};
  // Mean squared difference per intra-block boundary sample (lower is better).
  double score = 0.0;
  int tied_arrangements = 1;

  friend bool operator==(const RestorationHypothesis& a, const RestorationHypothesis& b) {
    return a.source_position == b.source_position && a.channel_source == b.channel_source &&
           a.orientation == b.orientation && a.polarity == b.polarity;
  }
};

// The exact inverse of an encryption pattern, expressed as a hypothesis.
RestorationHypothesis true_inverse(const BlockPattern& pattern);

// Applies the hypothesis to every m×m block.
Image apply_hypothesis(const Image& img, const RestorationHypothesis& hyp, int m);

// Mean squared difference over the four inner sub-block boundaries of every
// block and channel once `hyp` is applied. Computed directly from pixels.
double hypothesis_score(const Image& img, const RestorationHypothesis& hyp, int m);

// Searches all 24 sub-block arrangements, all channel assignments and all
// 16 orientation × polarity corrections per plane for the global minimum of
// hypothesis_score (exact, by dynamic programming over the 4-cycle of inner
// boundaries). The per-channel polarity left open by that objective is then
// fixed by requiring positively correlated colour channels. Deterministic.
std::pair<Image, RestorationHypothesis> restore_subblocks(const Image& img, const CipherConfig& cfg);

// The whole-block dihedral transform g relating a found hypothesis to the
// true one (found position t holds the true content of g.source(2, t)), if
// the arrangements are related that way.
std::optional<Orientation> block_symmetry(const RestorationHypothesis& found,
                                          const RestorationHypothesis& truth);

}  // namespace jigsaw
