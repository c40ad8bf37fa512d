#include "cougar/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cougar {

std::string_view stream_name(Stream s) {
  switch (s) {
    case Stream::topology: return "topology";
    case Stream::overlay: return "overlay";
    case Stream::mining: return "mining";
    case Stream::failures: return "failures";
  }
  return "unknown";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed, Stream stream) : Rng(seed, stream_name(stream)) {}

Rng::Rng(std::uint64_t seed, std::string_view label)
    : engine_(splitmix64(seed ^ splitmix64(fnv1a64(label)))) {}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  // Lemire's multiply-shift with rejection; unbiased for every n.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::exponential() { return -std::log1p(-unit()); }

}  // namespace cougar
