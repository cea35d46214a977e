#pragma once

#include <optional>

#include "jigsaw/assembly.hpp"
#include "jigsaw/cipher.hpp"
#include "jigsaw/metrics.hpp"
#include "jigsaw/restoration.hpp"
#include "jigsaw/solver.hpp"

namespace jigsaw {

struct AttackOptions {
  // Without restoration the solver sees the encrypted blocks as they are.
  bool restore = true;
  bool solve = true;
  Metric metric = Metric::Ssd;
  GaParams ga;
};

struct AttackResult {
  RestorationHypothesis hypothesis;
  Image restored;     // every block corrected by the hypothesis
  Assembly assembly;  // encrypted cell index per grid position
  Image reassembled;  // restored blocks laid out by `assembly`
  double solver_fitness = 0.0;
  bool timed_out = false;
};

// Ciphertext-only: sub-block restoration, then the genetic jigsaw solver.
AttackResult attack(const Image& encrypted, const CipherConfig& cfg, const AttackOptions& options);

// Ground-truth layout of the encrypted cells as an assembly.
Assembly truth_assembly(const CipherPlan& plan, int rows, int cols);

// The layout the attack should reach when its restoration hypothesis differs
// from the true inverse by a whole-block dihedral transform g: the original
// image transformed by g. Identity when no such g relates the two.
Assembly aligned_truth(const AttackResult& result, const CipherPlan& plan, int rows, int cols);

// Dc/Nc/Lc of the attack against `aligned_truth`.
MetricsReport score_attack(const AttackResult& result, const CipherPlan& plan, int rows, int cols);

// Encryption by block permutation alone (K1), leaving every block intact.
CipherPlan scramble_only_plan(const KeySet& keys, const CipherConfig& cfg, int block_count);

}  // namespace jigsaw
