#include "jigsaw/attack.hpp"

#include "jigsaw/error.hpp"

namespace jigsaw {

AttackResult attack(const Image& encrypted, const CipherConfig& cfg, const AttackOptions& options) {
  validate(cfg);
  AttackResult res;
  if (options.restore) {
    auto [restored, hyp] = restore_subblocks(encrypted, cfg);
    res.restored = std::move(restored);
    res.hypothesis = hyp;
  } else {
    res.restored = encrypted;
  }

  const BlockGrid grid = split_blocks(res.restored, cfg.m);
  if (options.solve && grid.count() > 1) {
    const CompatibilityTable table = build_compatibility(grid.blocks, options.metric);
    SolveResult solved = solve_puzzle(table, grid.rows, grid.cols, options.ga);
    res.assembly = std::move(solved.assembly);
    res.solver_fitness = solved.fitness;
    res.timed_out = solved.timed_out;
  } else {
    res.assembly = identity_assembly(grid.rows, grid.cols);
  }
  res.reassembled = render_assembly(res.assembly, grid.blocks);
  return res;
}

Assembly truth_assembly(const CipherPlan& plan, int rows, int cols) {
  if (static_cast<std::size_t>(rows) * cols != plan.block_perm.size()) {
    throw ShapeError("a " + std::to_string(rows) + "x" + std::to_string(cols) + " grid cannot hold " +
                     std::to_string(plan.block_perm.size()) + " blocks");
  }
  return Assembly{rows, cols, truth_layout(plan)};
}

Assembly aligned_truth(const AttackResult& result, const CipherPlan& plan, int rows, int cols) {
  const Assembly truth = truth_assembly(plan, rows, cols);
  if (rows != cols) {
    return truth;
  }
  const auto g = block_symmetry(result.hypothesis, true_inverse(plan.pattern_for(0)));
  return g ? transform(truth, *g) : truth;
}

MetricsReport score_attack(const AttackResult& result, const CipherPlan& plan, int rows, int cols) {
  return evaluate(result.assembly, aligned_truth(result, plan, rows, cols));
}

CipherPlan scramble_only_plan(const KeySet& keys, const CipherConfig& cfg, int block_count) {
  CipherPlan plan = generate_pattern(keys, cfg, block_count);
  plan.patterns.assign(1, BlockPattern{});
  return plan;
}

}  // namespace jigsaw
