#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

namespace jigsaw {

// Deterministic keyed random stream.
//
// Backed by std::mt19937_64 seeded with the 64-bit key, whose output sequence
// is fixed by the C++ standard. Integer draws use rejection sampling so that
// uniform(n) is exactly unbiased, and do not depend on the (unspecified)
// behavior of std::uniform_int_distribution.
class RandomStream {
 public:
  using Source = std::function<std::uint64_t()>;

  explicit RandomStream(std::uint64_t seed);

  // Stream that draws raw words from an arbitrary source. Used to inject
  // scripted draws in tests.
  static RandomStream from_source(Source source);

  std::uint64_t next();
  // Uniform integer in [0, n). n must be >= 1.
  std::uint64_t uniform(std::uint64_t n);
  // Uniform double in [0, 1) with 53 bits of resolution.
  double unit();
  // True with probability p. A zero word maps to false for every p < 1.
  bool bernoulli(double p);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return position_; }
  // Rewinds an engine-backed stream to its first draw.
  void reset();

 private:
  RandomStream() = default;

  std::uint64_t seed_ = 0;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
  Source source_;
};

// Creates a stream for a given seed; the default builds an mt19937_64 stream.
using StreamFactory = std::function<RandomStream(std::uint64_t)>;
StreamFactory default_stream_factory();

// Uniformly random permutation of {0..n-1} via Fisher–Yates:
// for i in [0, n-1): swap(p[i], p[i + uniform(n - i)]).
// A stream that always draws zero yields the identity.
std::vector<int> draw_permutation(RandomStream& stream, int n);

// Five independent seeds, one per key K1..K5.
struct KeySet {
  std::uint64_t k1 = 0;
  std::uint64_t k2 = 0;
  std::uint64_t k3 = 0;
  std::uint64_t k4 = 0;
  std::uint64_t k5 = 0;

  friend bool operator==(const KeySet&, const KeySet&) = default;
};

// SplitMix64 finalizer; used to derive sub-seeds.
std::uint64_t mix64(std::uint64_t x);
// Order-sensitive combination of seeds.
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);
// Stable 64-bit FNV-1a of a string.
std::uint64_t hash_string(std::string_view s);

// Deterministic KeySet from a 64-bit seed (five SplitMix64 outputs).
KeySet derive_keys(std::uint64_t seed);

}  // namespace jigsaw
