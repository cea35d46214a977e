#include "jigsaw/cipher.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>

#include "jigsaw/error.hpp"
#include "jigsaw/image_io.hpp"

namespace jigsaw {
namespace {

// Per-channel sub-stream seeds for K3/K4.
constexpr std::array<std::uint64_t, 3> kChannelSalt = {
    0x52ED2A7C3F1B0001ULL, 0x47A5C19E8D6B0002ULL, 0x42D7F03B5C9E0003ULL};

int half_of(const Image& block) {
  if (block.width() != block.height() || block.width() % 2 != 0 || block.width() == 0) {
    throw DimensionError("block must be square with even side, got " +
                         std::to_string(block.width()) + "x" + std::to_string(block.height()));
  }
  return block.width() / 2;
}

Image sub_block(const Image& block, int s, int h) {
  return block.crop((s % 2) * h, (s / 2) * h, h, h);
}

void put_sub_block(Image& block, const Image& sb, int s, int h) {
  block.paste(sb, (s % 2) * h, (s / 2) * h);
}

Image orient_channels(const Image& sb, const std::array<Orientation, 3>& o) {
  const int n = sb.width();
  Image out(n, n);
  for (int c = 0; c < 3; ++c) {
    orient_plane(o[c], n, sb.data().subspan(c), n * 3, 3, out.data().subspan(c), n * 3, 3);
  }
  return out;
}

template <typename Fn>
Image map_sub_blocks(const Image& block, Fn&& fn) {
  const int h = half_of(block);
  Image out(block.width(), block.height());
  for (int s = 0; s < 4; ++s) {
    put_sub_block(out, fn(sub_block(block, s, h), s), s, h);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const nlohmann::json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_string()) {
    throw FormatError(std::string("key file: missing string field '") + name + "'");
  }
  const std::string s = j[name].get<std::string>();
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 16);
    if (used != s.size()) {
      throw FormatError("key file: bad hex value for " + std::string(name));
    }
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("key file: bad hex value for " + std::string(name));
  }
}

}  // namespace

const std::array<ChannelPerm, 6>& channel_permutations() {
  static const std::array<ChannelPerm, 6> perms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  return perms;
}

ChannelPerm inverse(const ChannelPerm& p) {
  ChannelPerm inv{};
  for (int c = 0; c < 3; ++c) {
    inv[p[c]] = c;
  }
  return inv;
}

void validate(const CipherConfig& cfg) {
  if (cfg.m <= 0 || cfg.m % 2 != 0) {
    throw ParameterError("block size must be a positive even number, got " + std::to_string(cfg.m));
  }
  if (!(cfg.negpos_probability >= 0.0 && cfg.negpos_probability <= 1.0)) {
    throw ParameterError("negpos probability must lie in [0, 1]");
  }
}

CipherPlan generate_pattern(const KeySet& keys, const CipherConfig& cfg, int block_count,
                            const StreamFactory& streams) {
  validate(cfg);
  if (block_count < 1) {
    throw ParameterError("block count must be >= 1");
  }
  RandomStream k1 = streams(keys.k1);
  RandomStream k2 = streams(keys.k2);
  std::vector<RandomStream> k3;
  std::vector<RandomStream> k4;
  for (int c = 0; c < 3; ++c) {
    k3.push_back(streams(keys.k3 ^ kChannelSalt[c]));
    k4.push_back(streams(keys.k4 ^ kChannelSalt[c]));
  }
  RandomStream k5 = streams(keys.k5);

  CipherPlan plan;
  plan.block_perm = draw_permutation(k1, block_count);
  const int pattern_count = cfg.per_block_pattern ? block_count : 1;
  plan.patterns.reserve(static_cast<std::size_t>(pattern_count));
  for (int b = 0; b < pattern_count; ++b) {
    BlockPattern p;
    const auto sub = draw_permutation(k2, 4);
    std::copy(sub.begin(), sub.end(), p.subblock_perm.begin());
    for (int s = 0; s < 4; ++s) {
      for (int c = 0; c < 3; ++c) {
        p.transforms[s].orientation[c] = Orientation(static_cast<int>(k3[c].uniform(8)));
      }
    }
    for (int s = 0; s < 4; ++s) {
      for (int c = 0; c < 3; ++c) {
        p.transforms[s].polarity[c] = k4[c].bernoulli(cfg.negpos_probability);
      }
    }
    for (int s = 0; s < 4; ++s) {
      p.transforms[s].channel_perm = channel_permutations()[k5.uniform(6)];
    }
    plan.patterns.push_back(p);
  }
  return plan;
}

namespace steps {

Image permute_subblocks(const Image& block, const std::array<int, 4>& perm) {
  const int h = half_of(block);
  return map_sub_blocks(block, [&](const Image&, int s) { return sub_block(block, perm[s], h); });
}

Image unpermute_subblocks(const Image& block, const std::array<int, 4>& perm) {
  const int h = half_of(block);
  Image out(block.width(), block.height());
  for (int s = 0; s < 4; ++s) {
    put_sub_block(out, sub_block(block, s, h), perm[s], h);
  }
  return out;
}

Image orient(const Image& block, const BlockPattern& pattern) {
  return map_sub_blocks(block, [&](const Image& sb, int s) {
    return orient_channels(sb, pattern.transforms[s].orientation);
  });
}

Image unorient(const Image& block, const BlockPattern& pattern) {
  return map_sub_blocks(block, [&](const Image& sb, int s) {
    std::array<Orientation, 3> inv{};
    for (int c = 0; c < 3; ++c) {
      inv[c] = pattern.transforms[s].orientation[c].inverse();
    }
    return orient_channels(sb, inv);
  });
}

Image negpos(const Image& block, const BlockPattern& pattern) {
  return map_sub_blocks(block, [&](const Image& sb, int s) {
    Image out = sb;
    auto px = out.data();
    for (std::size_t i = 0; i < px.size(); ++i) {
      px[i] = jigsaw::negpos(px[i], pattern.transforms[s].polarity[i % 3]);
    }
    return out;
  });
}

Image shuffle_channels(const Image& block, const BlockPattern& pattern) {
  return map_sub_blocks(block, [&](const Image& sb, int s) {
    const ChannelPerm& p = pattern.transforms[s].channel_perm;
    Image out(sb.width(), sb.height());
    auto src = sb.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); i += 3) {
      for (int c = 0; c < 3; ++c) {
        dst[i + c] = src[i + p[c]];
      }
    }
    return out;
  });
}

Image unshuffle_channels(const Image& block, const BlockPattern& pattern) {
  return map_sub_blocks(block, [&](const Image& sb, int s) {
    const ChannelPerm& p = pattern.transforms[s].channel_perm;
    Image out(sb.width(), sb.height());
    auto src = sb.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); i += 3) {
      for (int c = 0; c < 3; ++c) {
        dst[i + p[c]] = src[i + c];
      }
    }
    return out;
  });
}

Image apply_pattern(const Image& block, const BlockPattern& pattern) {
  Image b = permute_subblocks(block, pattern.subblock_perm);
  b = orient(b, pattern);
  b = negpos(b, pattern);
  return shuffle_channels(b, pattern);
}

Image invert_pattern(const Image& block, const BlockPattern& pattern) {
  Image b = unshuffle_channels(block, pattern);
  b = negpos(b, pattern);
  b = unorient(b, pattern);
  return unpermute_subblocks(b, pattern.subblock_perm);
}

BlockGrid permute_blocks(const BlockGrid& grid, const std::vector<int>& perm) {
  if (perm.size() != grid.blocks.size()) {
    throw ShapeError("block permutation size does not match grid");
  }
  BlockGrid out = grid;
  for (std::size_t q = 0; q < perm.size(); ++q) {
    out.blocks[q] = grid.blocks[static_cast<std::size_t>(perm[q])];
  }
  return out;
}

BlockGrid unpermute_blocks(const BlockGrid& grid, const std::vector<int>& perm) {
  if (perm.size() != grid.blocks.size()) {
    throw ShapeError("block permutation size does not match grid");
  }
  BlockGrid out = grid;
  for (std::size_t q = 0; q < perm.size(); ++q) {
    out.blocks[static_cast<std::size_t>(perm[q])] = grid.blocks[q];
  }
  return out;
}

}  // namespace steps

Image encrypt_with(const Image& img, const CipherPlan& plan, int m) {
  BlockGrid grid = steps::permute_blocks(split_blocks(img, m), plan.block_perm);
  for (std::size_t q = 0; q < grid.blocks.size(); ++q) {
    grid.blocks[q] = steps::apply_pattern(grid.blocks[q], plan.pattern_for(q));
  }
  return merge_blocks(grid);
}

Image decrypt_with(const Image& img, const CipherPlan& plan, int m) {
  BlockGrid grid = split_blocks(img, m);
  if (plan.block_perm.size() != grid.blocks.size()) {
    throw ShapeError("cipher plan does not match image block count");
  }
  for (std::size_t q = 0; q < grid.blocks.size(); ++q) {
    grid.blocks[q] = steps::invert_pattern(grid.blocks[q], plan.pattern_for(q));
  }
  return merge_blocks(steps::unpermute_blocks(grid, plan.block_perm));
}

Image encrypt(const Image& img, const KeySet& keys, const CipherConfig& cfg,
              const StreamFactory& streams) {
  validate(cfg);
  if (img.width() % cfg.m != 0 || img.height() % cfg.m != 0) {
    split_blocks(img, cfg.m);  // throws the dimension error
  }
  const int count = (img.width() / cfg.m) * (img.height() / cfg.m);
  return encrypt_with(img, generate_pattern(keys, cfg, count, streams), cfg.m);
}

Image decrypt(const Image& img, const KeySet& keys, const CipherConfig& cfg,
              const StreamFactory& streams) {
  validate(cfg);
  if (img.width() % cfg.m != 0 || img.height() % cfg.m != 0) {
    split_blocks(img, cfg.m);
  }
  const int count = (img.width() / cfg.m) * (img.height() / cfg.m);
  return decrypt_with(img, generate_pattern(keys, cfg, count, streams), cfg.m);
}

std::vector<int> truth_layout(const CipherPlan& plan) {
  std::vector<int> truth(plan.block_perm.size());
  for (std::size_t q = 0; q < plan.block_perm.size(); ++q) {
    truth[static_cast<std::size_t>(plan.block_perm[q])] = static_cast<int>(q);
  }
  return truth;
}

std::string format_keys(const KeySet& keys) {
  nlohmann::ordered_json j;
  j["k1"] = hex64(keys.k1);
  j["k2"] = hex64(keys.k2);
  j["k3"] = hex64(keys.k3);
  j["k4"] = hex64(keys.k4);
  j["k5"] = hex64(keys.k5);
  return j.dump(2) + "\n";
}

KeySet parse_keys(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("key file: ") + e.what());
  }
  if (!j.is_object()) {
    throw FormatError("key file: expected a JSON object");
  }
  return KeySet{parse_hex64(j, "k1"), parse_hex64(j, "k2"), parse_hex64(j, "k3"),
                parse_hex64(j, "k4"), parse_hex64(j, "k5")};
}

KeySet read_key_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_keys(std::string(bytes.begin(), bytes.end()));
}

void write_key_file(const std::filesystem::path& path, const KeySet& keys) {
  const std::string text = format_keys(keys);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace jigsaw
