#ifndef JOINTSAMPLER_NN_RNG_HPP_
#define JOINTSAMPLER_NN_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace jointsampler::nn {

// Deterministic random stream. All sampling primitives are hand-rolled on top
// of the raw 64-bit output so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Named stream derivation: mixes (master, stream, index) so that adding a new
  // consumer never perturbs existing streams.
  static Rng derive(uint64_t master, uint64_t stream, uint64_t index = 0);

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform();

  // Uniform integer in [0, n).
  int uniform_int(int n);

  // Standard normal (Box-Muller, cached pair).
  double normal();

  // Fisher-Yates shuffle of indices 0..n-1.
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// SplitMix64 finalizer, used for seed mixing.
uint64_t splitmix64(uint64_t x);

}  // namespace jointsampler::nn

#endif  // JOINTSAMPLER_NN_RNG_HPP_
