#include "jigsaw/random.hpp"

#include <numeric>
#include <utility>

#include "jigsaw/error.hpp"

namespace jigsaw {

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RandomStream RandomStream::from_source(Source source) {
  RandomStream s;
  s.source_ = std::move(source);
  return s;
}

std::uint64_t RandomStream::next() {
  ++position_;
  return source_ ? source_() : engine_();
}

std::uint64_t RandomStream::uniform(std::uint64_t n) {
  if (n == 0) {
    throw ParameterError("uniform(0) is undefined");
  }
  if (n == 1) {
    return 0;
  }
  constexpr std::uint64_t kMax = ~std::uint64_t{0};
  // 2^64 mod n; the top `excess` words would bias the low residues.
  const std::uint64_t excess = (kMax % n + 1) % n;
  for (;;) {
    const std::uint64_t x = next();
    if (x <= kMax - excess) {
      return x % n;
    }
  }
}

double RandomStream::unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

bool RandomStream::bernoulli(double p) {
  return unit() >= 1.0 - p;
}

void RandomStream::reset() {
  if (source_) {
    throw ParameterError("scripted streams cannot be reset");
  }
  engine_.seed(seed_);
  position_ = 0;
}

StreamFactory default_stream_factory() {
  return [](std::uint64_t seed) { return RandomStream(seed); };
}

std::vector<int> draw_permutation(RandomStream& stream, int n) {
  if (n < 1) {
    throw ParameterError("permutation size must be >= 1");
  }
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = 0; i + 1 < n; ++i) {
    const auto j = i + static_cast<int>(stream.uniform(static_cast<std::uint64_t>(n - i)));
    std::swap(p[i], p[j]);
  }
  return p;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ mix64(v + 0x632BE59BD9B4E019ULL));
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

KeySet derive_keys(std::uint64_t seed) {
  KeySet k;
  k.k1 = mix64(seed);
  k.k2 = mix64(k.k1);
  k.k3 = mix64(k.k2);
  k.k4 = mix64(k.k3);
  k.k5 = mix64(k.k4);
  return k;
}

}  // namespace jigsaw
