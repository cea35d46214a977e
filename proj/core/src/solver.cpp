#include "jigsaw/solver.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include "jigsaw/error.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {
namespace {

constexpr int kRowStep[4] = {0, 0, -1, 1};  // Right, Left, Above, Below
constexpr int kColStep[4] = {1, -1, 0, 0};
constexpr Relation kRelations[4] = {Relation::Right, Relation::Left, Relation::Above,
                                    Relation::Below};

struct Individual {
  std::vector<int> cells;
  // neighbors[piece * 4 + rel]: the piece placed at `rel` of `piece`, or -1.
  std::vector<int> neighbors;
  double fitness = 0.0;
};

void index_neighbors(Individual& ind, int rows, int cols) {
  const std::size_t n = ind.cells.size();
  ind.neighbors.assign(n * 4, -1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int p = ind.cells[static_cast<std::size_t>(r) * cols + c];
      for (int rel = 0; rel < 4; ++rel) {
        const int nr = r + kRowStep[rel];
        const int nc = c + kColStep[rel];
        if (nr >= 0 && nr < rows && nc >= 0 && nc < cols) {
          ind.neighbors[static_cast<std::size_t>(p) * 4 + rel] =
              ind.cells[static_cast<std::size_t>(nr) * cols + nc];
        }
      }
    }
  }
}

double grid_fitness(std::span<const int> cells, int rows, int cols, const CompatibilityTable& t) {
  double total = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int p = cells[static_cast<std::size_t>(r) * cols + c];
      if (c + 1 < cols) {
        total += t.score(p, cells[static_cast<std::size_t>(r) * cols + c + 1], Relation::Right);
      }
      if (r + 1 < rows) {
        total += t.score(p, cells[static_cast<std::size_t>(r + 1) * cols + c], Relation::Below);
      }
    }
  }
  return total;
}

// Kernel-growing crossover. The child is grown piece by piece on a canvas
// large enough to hold any rows×cols window around the seed; a placement is
// only allowed while the kernel's bounding box still fits the frame.
class KernelGrower {
 public:
  KernelGrower(const CompatibilityTable& table, int rows, int cols, double mutation_rate)
      : table_(table),
        rows_(rows),
        cols_(cols),
        n_(rows * cols),
        canvas_rows_(2 * rows + 1),
        canvas_cols_(2 * cols + 1),
        mutation_rate_(mutation_rate) {
    for (int r = 0; r < canvas_rows_; ++r) {
      for (int c = 0; c < canvas_cols_; ++c) {
        slot_row_.push_back(r);
        slot_col_.push_back(c);
      }
    }
    for (int d = 0; d < 4; ++d) {
      step_[d] = kRowStep[d] * canvas_cols_ + kColStep[d];
    }
  }

  std::vector<int> grow(const Individual& a, const Individual& b, RandomStream& rng) {
    reset();
    parent_a_ = &a;
    parent_b_ = &b;
    const int seed_piece = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(n_)));
    place(rows_ * canvas_cols_ + cols_, seed_piece);

    while (placed_ < n_) {
      candidates_.clear();
      collect(agree_);
      if (candidates_.empty()) {
        collect(buddies_);
      }
      if (!candidates_.empty()) {
        auto [slot, piece] = candidates_[rng.uniform(candidates_.size())];
        if (rng.unit() < mutation_rate_) {
          piece = unused_[rng.uniform(unused_.size())];
        }
        place(slot, piece);
        continue;
      }
      const auto [slot, piece] = most_compatible();
      place(slot, piece);
    }

    std::vector<int> cells(static_cast<std::size_t>(n_));
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        cells[static_cast<std::size_t>(r) * cols_ + c] =
            canvas_[static_cast<std::size_t>(min_row_ + r) * canvas_cols_ + (min_col_ + c)];
      }
    }
    return cells;
  }

 private:
  struct Candidate {
    int slot;
    int piece;
  };
  struct Phase3Entry {
    double score;
    int slot;
    int piece;
    unsigned version;
    friend bool operator>(const Phase3Entry& a, const Phase3Entry& b) {
      if (a.score != b.score) {
        return a.score > b.score;
      }
      if (a.slot != b.slot) {
        return a.slot > b.slot;
      }
      return a.piece > b.piece;
    }
  };

  void reset() {
    canvas_.assign(static_cast<std::size_t>(canvas_rows_) * canvas_cols_, -1);
    used_.assign(static_cast<std::size_t>(n_), 0);
    unused_.resize(static_cast<std::size_t>(n_));
    std::iota(unused_.begin(), unused_.end(), 0);
    unused_index_ = unused_;
    rank_cursor_.assign(static_cast<std::size_t>(n_) * 4, 0);
    agree_.clear();
    buddies_.clear();
    slot_version_.assign(canvas_.size(), 0);
    slot_dirty_.assign(canvas_.size(), 0);
    dirty_.clear();
    heap_.clear();
    for (auto& w : watchers_) {
      w.clear();
    }
    watchers_.resize(static_cast<std::size_t>(n_));
    placed_ = 0;
    min_row_ = canvas_rows_;
    max_row_ = -1;
    min_col_ = canvas_cols_;
    max_col_ = -1;
  }

  // Once false, stays false: the bounding box only grows.
  bool fits(int slot) const {
    const int r = slot_row_[static_cast<std::size_t>(slot)];
    const int c = slot_col_[static_cast<std::size_t>(slot)];
    return std::max(max_row_, r) - std::min(min_row_, r) < rows_ &&
           std::max(max_col_, c) - std::min(min_col_, c) < cols_;
  }

  // Piece placed next to `slot` in direction d, or -1. The canvas keeps a
  // free border ring, so every slot a kernel can reach has four neighbors.
  int neighbor_of_slot(int slot, int d) const { return canvas_[static_cast<std::size_t>(slot + step_[d])]; }

  void place(int slot, int piece) {
    canvas_[static_cast<std::size_t>(slot)] = piece;
    used_[static_cast<std::size_t>(piece)] = 1;
    // O(1) removal from the unused list.
    const int idx = unused_index_[static_cast<std::size_t>(piece)];
    const int last = unused_.back();
    unused_[static_cast<std::size_t>(idx)] = last;
    unused_index_[static_cast<std::size_t>(last)] = idx;
    unused_.pop_back();
    ++placed_;
    ++slot_version_[static_cast<std::size_t>(slot)];
    for (const int w : watchers_[static_cast<std::size_t>(piece)]) {
      mark_dirty(w);
    }
    watchers_[static_cast<std::size_t>(piece)].clear();

    const int r = slot_row_[static_cast<std::size_t>(slot)];
    const int c = slot_col_[static_cast<std::size_t>(slot)];
    min_row_ = std::min(min_row_, r);
    max_row_ = std::max(max_row_, r);
    min_col_ = std::min(min_col_, c);
    max_col_ = std::max(max_col_, c);

    for (int rel = 0; rel < 4; ++rel) {
      const int ns = slot + step_[rel];
      if (canvas_[static_cast<std::size_t>(ns)] >= 0) {
        continue;
      }
      // The empty slot lies at rel of the new piece.
      const std::size_t nb = static_cast<std::size_t>(piece) * 4 + rel;
      const int pa = parent_a_->neighbors[nb];
      if (pa >= 0 && pa == parent_b_->neighbors[nb] && !used_[static_cast<std::size_t>(pa)]) {
        agree_.push_back({ns, pa});
      }
      const int buddy = table_.best(piece, kRelations[rel]);
      if (buddy >= 0 && !used_[static_cast<std::size_t>(buddy)] &&
          (pa == buddy || parent_b_->neighbors[nb] == buddy) &&
          table_.best_buddies(piece, buddy, kRelations[rel])) {
        buddies_.push_back({ns, buddy});
      }
      mark_dirty(ns);
    }
  }

  // Phase 1 (agree_) or phase 2 (buddies_): every proposal whose slot is
  // still empty, whose piece is unused and which keeps the kernel inside the
  // frame. Dead proposals are dropped for good.
  void collect(std::vector<Candidate>& proposals) {
    std::size_t keep = 0;
    for (const Candidate& c : proposals) {
      if (canvas_[static_cast<std::size_t>(c.slot)] >= 0 || used_[static_cast<std::size_t>(c.piece)]) {
        continue;
      }
      proposals[keep++] = c;
      if (fits(c.slot)) {
        candidates_.push_back(c);
      }
    }
    proposals.resize(keep);
  }

  double slot_score(const int (&owners)[4], int piece) const {
    double total = 0.0;
    int count = 0;
    for (int d = 0; d < 4; ++d) {
      if (owners[d] >= 0) {
        total += table_.score(owners[d], piece, mirror(kRelations[d]));
        ++count;
      }
    }
    return total / count;
  }

  void mark_dirty(int slot) {
    if (!slot_dirty_[static_cast<std::size_t>(slot)]) {
      slot_dirty_[static_cast<std::size_t>(slot)] = 1;
      dirty_.push_back(slot);
    }
  }

  // For every kernel edge of the slot, the first unused piece in its ranking;
  // pushes the best-scoring one. The slot is re-examined when a neighbor is
  // placed or one of its proposals gets used.
  void refresh_slot(int slot) {
    const std::size_t s = static_cast<std::size_t>(slot);
    slot_dirty_[s] = 0;
    if (canvas_[s] >= 0 || !fits(slot)) {
      return;
    }
    Phase3Entry best{std::numeric_limits<double>::infinity(), slot, -1, ++slot_version_[s]};
    int owners[4];
    for (int d = 0; d < 4; ++d) {
      owners[d] = neighbor_of_slot(slot, d);
    }
    for (int d = 0; d < 4; ++d) {
      const int owner = owners[d];
      if (owner < 0) {
        continue;
      }
      const Relation rel = mirror(kRelations[d]);
      const auto ranking = table_.ranked(owner, rel);
      int& cursor = rank_cursor_[static_cast<std::size_t>(owner) * 4 + static_cast<int>(rel)];
      while (used_[static_cast<std::size_t>(ranking[static_cast<std::size_t>(cursor)])]) {
        ++cursor;
      }
      const int piece = ranking[static_cast<std::size_t>(cursor)];
      watchers_[static_cast<std::size_t>(piece)].push_back(slot);
      const double score = slot_score(owners, piece);
      if (score < best.score || (score == best.score && piece < best.piece)) {
        best.score = score;
        best.piece = piece;
      }
    }
    heap_.push_back(best);
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
  }

  // Phase 3: the (slot, unused piece) pair of lowest score; ties by lower
  // slot index, then lower piece index.
  Candidate most_compatible() {
    for (const int slot : dirty_) {
      if (slot_dirty_[static_cast<std::size_t>(slot)]) {
        refresh_slot(slot);
      }
    }
    dirty_.clear();
    while (!heap_.empty()) {
      const Phase3Entry& top = heap_.front();
      const std::size_t s = static_cast<std::size_t>(top.slot);
      if (top.version == slot_version_[s] && canvas_[s] < 0 && fits(top.slot)) {
        return {top.slot, top.piece};
      }
      std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
      heap_.pop_back();
    }
    throw ShapeError("kernel cannot grow: no free slot inside the frame");
  }

  const CompatibilityTable& table_;
  int rows_;
  int cols_;
  int n_;
  int canvas_rows_;
  int canvas_cols_;
  int step_[4] = {};
  double mutation_rate_;

  std::vector<int> slot_row_;
  std::vector<int> slot_col_;
  std::vector<int> canvas_;
  std::vector<char> used_;
  std::vector<int> unused_;
  std::vector<int> unused_index_;
  std::vector<int> rank_cursor_;
  std::vector<Candidate> agree_;
  std::vector<Candidate> buddies_;
  // Per canvas slot × direction of the placed neighbor.
  std::vector<unsigned> slot_version_;
  std::vector<char> slot_dirty_;
  std::vector<int> dirty_;
  std::vector<Phase3Entry> heap_;  // min-heap, stale entries skipped on pop
  std::vector<std::vector<int>> watchers_;  // piece -> slots proposing it
  std::vector<Candidate> candidates_;
  const Individual* parent_a_ = nullptr;
  const Individual* parent_b_ = nullptr;
  int placed_ = 0;
  int min_row_ = 0;
  int max_row_ = 0;
  int min_col_ = 0;
  int max_col_ = 0;
};

void sort_population(std::vector<Individual>& pop) {
  std::stable_sort(pop.begin(), pop.end(),
                   [](const Individual& x, const Individual& y) { return x.fitness < y.fitness; });
}

}  // namespace

Relation mirror(Relation r) {
  switch (r) {
    case Relation::Right:
      return Relation::Left;
    case Relation::Left:
      return Relation::Right;
    case Relation::Above:
      return Relation::Below;
    case Relation::Below:
      break;
  }
  return Relation::Above;
}

CompatibilityTable::CompatibilityTable(int n, std::vector<double> horizontal,
                                       std::vector<double> vertical)
    : n_(n), horizontal_(std::move(horizontal)), vertical_(std::move(vertical)) {
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  if (n < 1 || horizontal_.size() != nn || vertical_.size() != nn) {
    throw ShapeError("compatibility score matrices must be n*n");
  }
  const std::size_t stride = static_cast<std::size_t>(n - 1);
  ranked_.resize(static_cast<std::size_t>(n) * 4 * stride);
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    for (const Relation rel : kRelations) {
      order.clear();
      for (int j = 0; j < n; ++j) {
        if (j != i) {
          order.push_back(j);
        }
      }
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return score(i, x, rel) < score(i, y, rel);
      });
      std::copy(order.begin(), order.end(),
                ranked_.begin() +
                    static_cast<std::ptrdiff_t>((static_cast<std::size_t>(i) * 4 + static_cast<int>(rel)) * stride));
    }
  }
}

CompatibilityTable build_compatibility(std::span<const Image> blocks, Metric metric) {
  if (blocks.size() < 2) {
    throw ShapeError("need at least two pieces");
  }
  const int w = blocks.front().width();
  const int h = blocks.front().height();
  std::vector<TileEdges> edges;
  edges.reserve(blocks.size());
  for (const Image& b : blocks) {
    if (b.width() != w || b.height() != h) {
      throw ShapeError("pieces must share one size");
    }
    edges.push_back(extract_edges(b));
  }
  const int n = static_cast<int>(blocks.size());
  std::vector<double> horizontal(static_cast<std::size_t>(n) * n);
  std::vector<double> vertical(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      if (metric == Metric::Ssd) {
        horizontal[k] = static_cast<double>(edge_ssd(edges[i], edges[j], Side::Right));
        vertical[k] = static_cast<double>(edge_ssd(edges[i], edges[j], Side::Bottom));
      } else {
        horizontal[k] = edge_mgc(edges[i], edges[j], Side::Right);
        vertical[k] = edge_mgc(edges[i], edges[j], Side::Bottom);
      }
    }
  }
  return CompatibilityTable(n, std::move(horizontal), std::move(vertical));
}

void validate(const GaParams& p) {
  if (p.population_size < 2) {
    throw ParameterError("population size must be >= 2");
  }
  if (p.generations < 0) {
    throw ParameterError("generation count must be >= 0");
  }
  if (!(p.elite_fraction >= 0.0 && p.elite_fraction <= 1.0) ||
      !(p.mutation_rate >= 0.0 && p.mutation_rate <= 1.0)) {
    throw ParameterError("elite fraction and mutation rate must lie in [0, 1]");
  }
}

double fitness(const Assembly& assembly, const CompatibilityTable& table) {
  if (assembly.size() != static_cast<std::size_t>(table.size())) {
    throw ShapeError("assembly does not match the compatibility table");
  }
  return grid_fitness(assembly.cells, assembly.rows, assembly.cols, table);
}

SolveResult solve_puzzle(const CompatibilityTable& table, int rows, int cols, const GaParams& params,
                         const PopulationObserver& observer) {
  validate(params);
  if (rows < 1 || cols < 1 || rows * cols != table.size()) {
    throw ShapeError("frame " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " does not hold " + std::to_string(table.size()) + " pieces");
  }
  const auto start = std::chrono::steady_clock::now();
  const int n = rows * cols;
  const int pop_size = params.population_size;

  auto finish = [&](std::vector<int> cells, double fit, int gens, bool timed_out,
                    std::vector<double> history) {
    SolveResult res;
    res.assembly = Assembly{rows, cols, std::move(cells)};
    res.fitness = fit;
    res.generations_run = gens;
    res.timed_out = timed_out;
    res.best_fitness_per_generation = std::move(history);
    return res;
  };
  if (n == 1) {
    return finish({0}, 0.0, 0, false, {0.0});
  }

  auto notify = [&](int gen, const std::vector<Individual>& pop) {
    if (!observer) {
      return;
    }
    std::vector<Assembly> view;
    view.reserve(pop.size());
    for (const Individual& ind : pop) {
      view.push_back(Assembly{rows, cols, ind.cells});
    }
    observer(gen, view);
  };

  std::vector<Individual> pop(static_cast<std::size_t>(pop_size));
  for (int k = 0; k < pop_size; ++k) {
    RandomStream rng(hash_combine(hash_combine(params.random_seed, ~std::uint64_t{0}),
                                  static_cast<std::uint64_t>(k)));
    Individual& ind = pop[static_cast<std::size_t>(k)];
    ind.cells = draw_permutation(rng, n);
    ind.fitness = grid_fitness(ind.cells, rows, cols, table);
    index_neighbors(ind, rows, cols);
  }
  sort_population(pop);
  notify(0, pop);

  std::vector<double> history{pop.front().fitness};
  const int elites = std::min(
      pop_size, std::max(1, static_cast<int>(std::lround(params.elite_fraction * pop_size))));
  KernelGrower grower(table, rows, cols, params.mutation_rate);
  std::vector<double> cumulative(static_cast<std::size_t>(pop_size));
  bool timed_out = false;
  int gen = 1;
  for (; gen <= params.generations; ++gen) {
    double total = 0.0;
    for (int k = 0; k < pop_size; ++k) {
      total += 1.0 / (pop[static_cast<std::size_t>(k)].fitness + 1e-9);
      cumulative[static_cast<std::size_t>(k)] = total;
    }
    auto roulette = [&](RandomStream& rng) {
      const double u = rng.unit() * total;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      return std::min<std::ptrdiff_t>(it - cumulative.begin(), pop_size - 1);
    };

    std::vector<Individual> next(pop.begin(), pop.begin() + elites);
    next.resize(static_cast<std::size_t>(pop_size));
    const std::uint64_t gen_seed = hash_combine(params.random_seed, static_cast<std::uint64_t>(gen));
    for (int k = elites; k < pop_size; ++k) {
      RandomStream rng(hash_combine(gen_seed, static_cast<std::uint64_t>(k)));
      const auto ia = roulette(rng);
      auto ib = roulette(rng);
      if (ib == ia) {
        ib = roulette(rng);
      }
      Individual& child = next[static_cast<std::size_t>(k)];
      child.cells = grower.grow(pop[static_cast<std::size_t>(ia)], pop[static_cast<std::size_t>(ib)], rng);
      child.fitness = grid_fitness(child.cells, rows, cols, table);
      index_neighbors(child, rows, cols);
    }
    pop = std::move(next);
    sort_population(pop);
    notify(gen, pop);
    history.push_back(pop.front().fitness);

    if (params.time_budget &&
        std::chrono::steady_clock::now() - start >= *params.time_budget && gen < params.generations) {
      timed_out = true;
      break;
    }
  }
  const int gens_run = timed_out ? gen : params.generations;
  return finish(pop.front().cells, pop.front().fitness, gens_run, timed_out, std::move(history));
}

Assembly ga_solve(const CompatibilityTable& table, int rows, int cols, const GaParams& params) {
  return solve_puzzle(table, rows, cols, params).assembly;
}

Image render_assembly(const Assembly& assembly, std::span<const Image> blocks) {
  if (assembly.size() != blocks.size() || !assembly.is_bijection()) {
    throw ShapeError("assembly does not match the piece list");
  }
  BlockGrid grid;
  grid.rows = assembly.rows;
  grid.cols = assembly.cols;
  grid.block_size = blocks.front().width();
  for (const int id : assembly.cells) {
    grid.blocks.push_back(blocks[static_cast<std::size_t>(id)]);
  }
  return merge_blocks(grid);
}

}  // namespace jigsaw
