#include "jointsampler/nn/rng.hpp"

#include <cmath>

namespace jointsampler::nn {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::derive(uint64_t master, uint64_t stream, uint64_t index) {
  uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (0xa5a5a5a5a5a5a5a5ULL + stream));
  s = splitmix64(s ^ (0x5a5a5a5a5a5a5a5aULL + index));
  return Rng(s);
}

double Rng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  // Rejection-free modulo bias is negligible for our n (<= a few thousand),
  // but reject anyway to keep draws exact.
  const uint64_t bound = ~0ULL - ~0ULL % static_cast<uint64_t>(n);
  uint64_t x;
  do {
    x = gen_();
  } while (x >= bound);
  return static_cast<int>(x % static_cast<uint64_t>(n));
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = uniform_int(i + 1);
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace jointsampler::nn
