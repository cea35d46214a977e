#include "jigsaw/restoration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jigsaw/error.hpp"

namespace jigsaw {
namespace {

constexpr int kLabels = 16;  // 8 orientations × 2 polarities
enum EdgeSide { kRight = 0, kLeft = 1, kTop = 2, kBottom = 3 };

Orientation label_orientation(int label) { return Orientation(label % 8); }
bool label_polarity(int label) { return label >= 8; }

// Cell (row, col) of the restored n×n plane for sample k of an edge.
std::pair<int, int> edge_cell(int side, int n, int k) {
  switch (side) {
    case kRight:
      return {k, n - 1};
    case kLeft:
      return {k, 0};
    case kTop:
      return {0, k};
    default:
      return {n - 1, k};
  }
}

Image restore_block(const Image& block, const RestorationHypothesis& hyp) {
  const int n = block.width() / 2;
  Image out(block.width(), block.height());
  for (int t = 0; t < 4; ++t) {
    const int q = hyp.source_position[t];
    const int qx = (q % 2) * n;
    const int qy = (q / 2) * n;
    const int tx = (t % 2) * n;
    const int ty = (t / 2) * n;
    for (int c = 0; c < 3; ++c) {
      const int x = hyp.channel_source[t][c];
      const Orientation o = hyp.orientation[t][c];
      const bool pol = hyp.polarity[t][c];
      for (int r = 0; r < n; ++r) {
        for (int col = 0; col < n; ++col) {
          const auto [sr, sc] = o.source(n, r, col);
          out.at(tx + col, ty + r, c) = negpos(block.at(qx + sc, qy + sr, x), pol);
        }
      }
    }
  }
  return out;
}

void check_input(const Image& img, int m) {
  if (m <= 0 || m % 2 != 0) {
    throw ParameterError("block size must be a positive even number");
  }
  if (img.width() % m != 0 || img.height() % m != 0 || img.empty()) {
    throw DimensionError("image " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()) + " is not divisible into " +
                         std::to_string(m) + "x" + std::to_string(m) + " blocks");
  }
}

// Restored-edge samples of every (encrypted position, channel, label, side),
// each stored as one contiguous run over all blocks.
class EdgeBank {
 public:
  EdgeBank(const Image& img, int m) : n_(m / 2) {
    const int cols = img.width() / m;
    blocks_ = (img.width() / m) * (img.height() / m);
    run_ = static_cast<std::size_t>(blocks_) * n_;
    data_.resize(4 * 3 * kLabels * 4 * run_);

    // Source cell in the encrypted plane for every orientation/side/sample.
    std::vector<int> source(8 * 4 * static_cast<std::size_t>(n_));
    for (int o = 0; o < 8; ++o) {
      for (int side = 0; side < 4; ++side) {
        for (int k = 0; k < n_; ++k) {
          const auto [r, c] = edge_cell(side, n_, k);
          const auto [sr, sc] = Orientation(o).source(n_, r, c);
          source[(static_cast<std::size_t>(o) * 4 + side) * n_ + k] = sr * n_ + sc;
        }
      }
    }
    std::vector<std::uint8_t> plane(static_cast<std::size_t>(n_) * n_);
    for (int b = 0; b < blocks_; ++b) {
      const int bx = (b % cols) * m;
      const int by = (b / cols) * m;
      for (int q = 0; q < 4; ++q) {
        for (int x = 0; x < 3; ++x) {
          for (int r = 0; r < n_; ++r) {
            for (int c = 0; c < n_; ++c) {
              plane[static_cast<std::size_t>(r) * n_ + c] =
                  img.at(bx + (q % 2) * n_ + c, by + (q / 2) * n_ + r, x);
            }
          }
          for (int label = 0; label < kLabels; ++label) {
            const int o = label % 8;
            const std::int16_t flip = label_polarity(label) ? 255 : 0;
            for (int side = 0; side < 4; ++side) {
              std::int16_t* dst = run(q, x, label, side) + static_cast<std::size_t>(b) * n_;
              const int* src = &source[(static_cast<std::size_t>(o) * 4 + side) * n_];
              for (int k = 0; k < n_; ++k) {
                const std::int16_t v = plane[static_cast<std::size_t>(src[k])];
                dst[k] = flip ? static_cast<std::int16_t>(255 - v) : v;
              }
            }
          }
        }
      }
    }
  }

  std::int16_t* run(int q, int x, int label, int side) {
    return &data_[(((static_cast<std::size_t>(q) * 3 + x) * kLabels + label) * 4 + side) * run_];
  }
  const std::int16_t* run(int q, int x, int label, int side) const {
    return &data_[(((static_cast<std::size_t>(q) * 3 + x) * kLabels + label) * 4 + side) * run_];
  }
  std::size_t run_length() const { return run_; }
  int blocks() const { return blocks_; }
  int half() const { return n_; }

 private:
  int n_;
  int blocks_ = 0;
  std::size_t run_ = 0;
  std::vector<std::int16_t> data_;
};

std::int64_t run_ssd(const std::int16_t* a, const std::int16_t* b, std::size_t len) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const std::int32_t d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

// Summed boundary SSD between two encrypted positions for every channel and
// label pairing: horizontal (qa left of qb) and vertical (qa above qb).
class PairTables {
 public:
  explicit PairTables(const EdgeBank& bank) {
    horizontal_.assign(kEntries, 0);
    vertical_.assign(kEntries, 0);
    const std::size_t len = bank.run_length();
    for (int qa = 0; qa < 4; ++qa) {
      for (int qb = 0; qb < 4; ++qb) {
        if (qa == qb) {
          continue;
        }
        for (int xa = 0; xa < 3; ++xa) {
          for (int xb = 0; xb < 3; ++xb) {
            for (int la = 0; la < kLabels; ++la) {
              for (int lb = 0; lb < kLabels; ++lb) {
                const std::size_t k = index(qa, qb, xa, xb, la, lb);
                horizontal_[k] = run_ssd(bank.run(qa, xa, la, kRight), bank.run(qb, xb, lb, kLeft), len);
                vertical_[k] = run_ssd(bank.run(qa, xa, la, kBottom), bank.run(qb, xb, lb, kTop), len);
              }
            }
          }
        }
      }
    }
  }

  // Row-major 16×16 matrix over (label of qa, label of qb).
  const std::int64_t* horizontal(int qa, int qb, int xa, int xb) const {
    return &horizontal_[index(qa, qb, xa, xb, 0, 0)];
  }
  const std::int64_t* vertical(int qa, int qb, int xa, int xb) const {
    return &vertical_[index(qa, qb, xa, xb, 0, 0)];
  }

 private:
  static constexpr std::size_t kEntries = 4 * 4 * 3 * 3 * kLabels * kLabels;
  static std::size_t index(int qa, int qb, int xa, int xb, int la, int lb) {
    return ((((static_cast<std::size_t>(qa) * 4 + qb) * 3 + xa) * 3 + xb) * kLabels + la) * kLabels + lb;
  }
  std::vector<std::int64_t> horizontal_;
  std::vector<std::int64_t> vertical_;
};

struct CycleSolution {
  std::int64_t cost = std::numeric_limits<std::int64_t>::max();
  std::array<int, 4> labels{};  // per restored position
};

// Exact minimum over the four labels of
//   h01(l0,l1) + v13(l1,l3) + h23(l2,l3) + v02(l0,l2)
// by fixing the two opposite corners (l0, l3).
CycleSolution solve_cycle(const std::int64_t* h01, const std::int64_t* v13, const std::int64_t* h23,
                          const std::int64_t* v02) {
  CycleSolution best;
  for (int l0 = 0; l0 < kLabels; ++l0) {
    for (int l3 = 0; l3 < kLabels; ++l3) {
      std::int64_t top = std::numeric_limits<std::int64_t>::max();
      int l1 = 0;
      for (int k = 0; k < kLabels; ++k) {
        const std::int64_t v = h01[l0 * kLabels + k] + v13[k * kLabels + l3];
        if (v < top) {
          top = v;
          l1 = k;
        }
      }
      std::int64_t bottom = std::numeric_limits<std::int64_t>::max();
      int l2 = 0;
      for (int k = 0; k < kLabels; ++k) {
        const std::int64_t v = v02[l0 * kLabels + k] + h23[k * kLabels + l3];
        if (v < bottom) {
          bottom = v;
          l2 = k;
        }
      }
      if (top + bottom < best.cost) {
        best.cost = top + bottom;
        best.labels = {l0, l1, l2, l3};
      }
    }
  }
  return best;
}

// Pearson correlation between two channels of an image; 0 when either is flat.
double channel_correlation(const Image& img, int a, int b) {
  const auto px = img.data();
  const double n = static_cast<double>(px.size() / 3);
  double sa = 0;
  double sb = 0;
  for (std::size_t i = 0; i < px.size(); i += 3) {
    sa += px[i + a];
    sb += px[i + b];
  }
  const double ma = sa / n;
  const double mb = sb / n;
  double cab = 0;
  double caa = 0;
  double cbb = 0;
  for (std::size_t i = 0; i < px.size(); i += 3) {
    const double da = px[i + a] - ma;
    const double db = px[i + b] - mb;
    cab += da * db;
    caa += da * da;
    cbb += db * db;
  }
  if (caa <= 0 || cbb <= 0) {
    return 0.0;
  }
  return cab / std::sqrt(caa * cbb);
}

}  // namespace

RestorationHypothesis true_inverse(const BlockPattern& pattern) {
  RestorationHypothesis h;
  for (int s = 0; s < 4; ++s) {
    const int t = pattern.subblock_perm[s];
    const SubBlockTransform& tr = pattern.transforms[s];
    h.source_position[t] = s;
    const ChannelPerm inv = inverse(tr.channel_perm);
    for (int c = 0; c < 3; ++c) {
      h.channel_source[t][c] = inv[c];
      h.polarity[t][c] = tr.polarity[c];
      h.orientation[t][c] = tr.orientation[c].inverse();
    }
  }
  return h;
}

Image apply_hypothesis(const Image& img, const RestorationHypothesis& hyp, int m) {
  check_input(img, m);
  Image out(img.width(), img.height());
  for (int by = 0; by < img.height(); by += m) {
    for (int bx = 0; bx < img.width(); bx += m) {
      out.paste(restore_block(img.crop(bx, by, m, m), hyp), bx, by);
    }
  }
  return out;
}

double hypothesis_score(const Image& img, const RestorationHypothesis& hyp, int m) {
  const Image restored = apply_hypothesis(img, hyp, m);
  const int n = m / 2;
  std::int64_t total = 0;
  std::int64_t samples = 0;
  for (int by = 0; by < img.height(); by += m) {
    for (int bx = 0; bx < img.width(); bx += m) {
      for (int k = 0; k < n; ++k) {
        for (int c = 0; c < 3; ++c) {
          auto sq = [&](int x0, int y0, int x1, int y1) {
            const std::int64_t d = restored.at(bx + x0, by + y0, c) - restored.at(bx + x1, by + y1, c);
            total += d * d;
          };
          sq(n - 1, k, n, k);          // top-left | top-right
          sq(n - 1, n + k, n, n + k);  // bottom-left | bottom-right
          sq(k, n - 1, k, n);          // top-left / bottom-left
          sq(n + k, n - 1, n + k, n);  // top-right / bottom-right
          samples += 4;
        }
      }
    }
  }
  return static_cast<double>(total) / static_cast<double>(samples);
}

std::pair<Image, RestorationHypothesis> restore_subblocks(const Image& img, const CipherConfig& cfg) {
  validate(cfg);
  check_input(img, cfg.m);
  const EdgeBank bank(img, cfg.m);
  const PairTables tables(bank);
  const auto& perms = channel_permutations();

  std::array<int, 4> arrangement{0, 1, 2, 3};
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
  std::array<int, 4> best_arrangement{};
  std::array<int, 4> best_sigma{};  // indices into channel_permutations(), [0] unused
  std::array<CycleSolution, 3> best_cycles{};
  int tied = 0;

  do {
    const auto [q0, q1, q2, q3] = arrangement;
    // cycles[c][x1][x2][x3]: final channel c drawn from channel c at t0 and
    // channels x1..x3 at t1..t3.
    CycleSolution cycles[3][3][3][3];
    for (int c = 0; c < 3; ++c) {
      for (int x1 = 0; x1 < 3; ++x1) {
        for (int x2 = 0; x2 < 3; ++x2) {
          for (int x3 = 0; x3 < 3; ++x3) {
            cycles[c][x1][x2][x3] =
                solve_cycle(tables.horizontal(q0, q1, c, x1), tables.vertical(q1, q3, x1, x3),
                            tables.horizontal(q2, q3, x2, x3), tables.vertical(q0, q2, c, x2));
          }
        }
      }
    }
    std::int64_t arrangement_best = std::numeric_limits<std::int64_t>::max();
    for (int s1 = 0; s1 < 6; ++s1) {
      for (int s2 = 0; s2 < 6; ++s2) {
        for (int s3 = 0; s3 < 6; ++s3) {
          std::int64_t total = 0;
          for (int c = 0; c < 3; ++c) {
            total += cycles[c][perms[s1][c]][perms[s2][c]][perms[s3][c]].cost;
          }
          arrangement_best = std::min(arrangement_best, total);
          if (total < best_cost) {
            best_cost = total;
            best_arrangement = arrangement;
            best_sigma = {0, s1, s2, s3};
            for (int c = 0; c < 3; ++c) {
              best_cycles[c] = cycles[c][perms[s1][c]][perms[s2][c]][perms[s3][c]];
            }
          }
        }
      }
    }
    if (arrangement_best < best_cost) {
      tied = 0;
    }
    if (arrangement_best == best_cost) {
      ++tied;
    }
  } while (std::next_permutation(arrangement.begin(), arrangement.end()));

  RestorationHypothesis hyp;
  hyp.source_position = best_arrangement;
  hyp.tied_arrangements = tied;
  for (int t = 0; t < 4; ++t) {
    hyp.channel_source[t] = perms[best_sigma[t]];
    for (int c = 0; c < 3; ++c) {
      const int label = best_cycles[c].labels[t];
      hyp.orientation[t][c] = label_orientation(label);
      hyp.polarity[t][c] = label_polarity(label);
    }
  }
  const std::int64_t samples = static_cast<std::int64_t>(bank.blocks()) * 4 * bank.half() * 3;
  hyp.score = static_cast<double>(best_cost) / static_cast<double>(samples);

  // Each channel's polarity is only fixed up to a flip of all its planes;
  // choose the flips under which the colour channels correlate positively.
  Image restored = apply_hypothesis(img, hyp, cfg.m);
  const double r01 = channel_correlation(restored, 0, 1);
  const double r02 = channel_correlation(restored, 0, 2);
  const double r12 = channel_correlation(restored, 1, 2);
  int best_flip = 0;
  double best_agreement = -std::numeric_limits<double>::infinity();
  for (int flip = 0; flip < 4; ++flip) {  // channel 0 stays as found
    const double s1 = (flip & 1) ? -1.0 : 1.0;
    const double s2 = (flip & 2) ? -1.0 : 1.0;
    const double agreement = s1 * r01 + s2 * r02 + s1 * s2 * r12;
    if (agreement > best_agreement + 1e-12) {
      best_agreement = agreement;
      best_flip = flip;
    }
  }
  if (best_flip != 0) {
    for (int t = 0; t < 4; ++t) {
      for (int c = 1; c < 3; ++c) {
        if (best_flip & (1 << (c - 1))) {
          hyp.polarity[t][c] = !hyp.polarity[t][c];
        }
      }
    }
    restored = apply_hypothesis(img, hyp, cfg.m);
  }
  return {std::move(restored), hyp};
}

std::optional<Orientation> block_symmetry(const RestorationHypothesis& found,
                                          const RestorationHypothesis& truth) {
  for (int g = 0; g < Orientation::kCount; ++g) {
    const Orientation o(g);
    bool match = true;
    for (int t = 0; t < 4 && match; ++t) {
      const auto [sr, sc] = o.source(2, t / 2, t % 2);
      match = found.source_position[t] == truth.source_position[sr * 2 + sc];
    }
    if (match) {
      return o;
    }
  }
  return std::nullopt;
}

}  // namespace jigsaw
