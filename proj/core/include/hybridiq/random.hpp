#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hybridiq/operator_core.hpp"

namespace hybridiq {

// Seeded 64-bit generator with deterministic stream splitting: split(k)
// depends only on the parent seed and k, never on how many draws the parent
// has made, so adding a new consumer does not perturb existing ones.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  Rng split(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x51ed270b27e9a3f1ULL))); }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() noexcept { return engine_; }

  static std::uint64_t mix(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

CMatrix random_ginibre(int rows, int cols, Rng& rng);
CMatrix random_unitary(int dim, Rng& rng);
// Random density matrix of the given rank (rank ≤ 0 means full rank).
CMatrix random_density(int dim, Rng& rng, int rank = 0);
CMatrix random_hermitian(int dim, Rng& rng);
// Random effects E_1..E_k with Σ E_k ≤ I (strictly below I unless
// `complete` is set, in which case Σ E_k = I).
std::vector<CMatrix> random_effect_decomposition(int dim, int parts, Rng& rng, bool complete = false);
CMatrix random_effect(int dim, Rng& rng);
// Column-stochastic rows×cols matrix.
RMatrix random_stochastic(int rows, int cols, Rng& rng);
// Kraus operators of a random CPTP map on C^dim.
std::vector<CMatrix> random_kraus(int dim, int count, Rng& rng);
// Probability vector; `sparsity` is the chance each entry is forced to zero
// (at least one entry stays positive).
std::vector<double> random_probabilities(int size, Rng& rng, double sparsity = 0.0);

}  // namespace hybridiq
