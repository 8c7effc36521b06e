#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hybridiq/classical_space.hpp"
#include "hybridiq/hybrid_state.hpp"
#include "hybridiq/operator_core.hpp"
#include "hybridiq/random.hpp"

namespace hybridiq {

// Kraus blocks L_α(m, n) moving quantum content from source cell n to
// destination cell m; each is qdim_dst × qdim_src.
struct BlockEntry {
  std::size_t m;
  std::size_t n;
  std::vector<CMatrix> ops;
};

struct CompletenessReport {
  bool ok = true;
  std::vector<double> deviations;  // per source cell, ‖Σ L†L − I‖_max
  std::optional<std::size_t> worst_cell;
  double worst = 0.0;
};

// Checks shapes (throws ShapeMismatch) and per-source completeness
// Σ_{m,α} L_α(m,n)† L_α(m,n) = I within `tolerance` entrywise.
CompletenessReport check_completeness(std::size_t src_cells, std::size_t dst_cells, int qdim_src,
                                      int qdim_dst, const std::vector<BlockEntry>& blocks,
                                      double tolerance = tol::kCompleteness);

// Hybrid operation in discrete generalized-Kraus form:
//   σ'_m = Σ_n Σ_α L_α(m,n) σ_n L_α(m,n)†.
// Blocks are stored sparsely per source cell; absent (m, n) pairs are empty.
class HybridChannel {
 public:
  struct Transition {
    std::size_t m;
    std::vector<CMatrix> ops;
  };

  // Validates shapes and completeness: throws ShapeMismatch,
  // IncompleteChannel (naming the source cell and its deviation). Entries
  // repeating an (m, n) pair are concatenated.
  HybridChannel(ClassicalSpace src, ClassicalSpace dst, int qdim_src, int qdim_dst,
                std::vector<BlockEntry> blocks);

  const ClassicalSpace& src() const noexcept { return src_; }
  const ClassicalSpace& dst() const noexcept { return dst_; }
  int qdim_src() const noexcept { return qdim_src_; }
  int qdim_dst() const noexcept { return qdim_dst_; }

  // Transitions out of source cell n, sorted by destination.
  const std::vector<Transition>& column(std::size_t n) const { return columns_.at(n); }
  // L_α(m, n); empty when the pair carries no blocks.
  const std::vector<CMatrix>& block(std::size_t m, std::size_t n) const;
  std::size_t block_count() const;
  std::vector<BlockEntry> entries() const;

  // (source n, transition index) pairs feeding destination m, n ascending.
  const std::vector<std::pair<std::size_t, std::size_t>>& feeders(std::size_t m) const {
    return rows_.at(m);
  }

 private:
  void index_rows();

  ClassicalSpace src_;
  ClassicalSpace dst_;
  int qdim_src_;
  int qdim_dst_;
  std::vector<std::vector<Transition>> columns_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rows_;
};

inline HybridChannel from_blocks(ClassicalSpace src, ClassicalSpace dst, int qdim_src, int qdim_dst,
                                 std::vector<BlockEntry> blocks) {
  return HybridChannel(std::move(src), std::move(dst), qdim_src, qdim_dst, std::move(blocks));
}

// Throws SpaceMismatch when the channel source does not match the state.
HybridState apply(const HybridChannel& channel, const HybridState& w);

// ch2 ∘ ch1 with eagerly materialized product blocks L2_β(k,m)·L1_α(m,n).
HybridChannel compose(const HybridChannel& second, const HybridChannel& first);

HybridChannel identity_channel(const ClassicalSpace& space, int qdim);

// Non-interacting channel: blocks √P(m,n)·L_α. Throws BadKernel when P is
// not column-stochastic, IncompleteKraus when Σ L_α†L_α ≠ I.
HybridChannel non_interacting(const MarkovKernel& kernel, const std::vector<CMatrix>& kraus);

// Coefficients k_{αβ}(m, n) of a channel written against an operator basis:
// coefficients(m, n) is the d²×d² matrix [k_{αβ}(m, n)]. Unset pairs are 0.
class CoefficientKernel {
 public:
  CoefficientKernel(ClassicalSpace src, ClassicalSpace dst, int basis_size);

  const ClassicalSpace& src() const noexcept { return src_; }
  const ClassicalSpace& dst() const noexcept { return dst_; }
  int basis_size() const noexcept { return basis_size_; }

  void set(std::size_t m, std::size_t n, CMatrix k);
  // nullptr when unset.
  const CMatrix* get(std::size_t m, std::size_t n) const;

 private:
  ClassicalSpace src_;
  ClassicalSpace dst_;
  int basis_size_;
  std::vector<std::optional<CMatrix>> k_;
};

// Lowers Σ_{α,β} k_{αβ}(m,n) L_α σ_n L_β† to Kraus blocks by diagonalizing
// the Hermitian part of each coefficient matrix. Throws BadBasis,
// NotPSDCoefficients, IncompleteChannel.
HybridChannel from_coeff_kernel(const std::vector<CMatrix>& basis, const CoefficientKernel& k);

// Blocks L_α(m,n) ⊗ I_q.
HybridChannel extend_with_ancilla(const HybridChannel& channel, int ancilla_dim);

// `branching` Gaussian blocks per (m, n) pair, each pair scaled by a random
// weight, then right-normalized by (Σ L†L)^{-1/2} per source cell. Throws
// NumericalFailure after three singular draws.
HybridChannel random_channel(const ClassicalSpace& src, const ClassicalSpace& dst, int qdim_src,
                             int qdim_dst, int branching, std::uint64_t seed);
HybridChannel random_channel(const ClassicalSpace& src, const ClassicalSpace& dst, int qdim_src,
                             int qdim_dst, int branching, Rng& rng);

// Apply-only pipeline. then() merges a channel into the last stage with
// compose() unless some merged cell pair would exceed kMaxMergedBlocks
// blocks, in which case it starts a new stage.
class ChannelSequence {
 public:
  static constexpr std::size_t kMaxMergedBlocks = 10'000;

  ChannelSequence& then(const HybridChannel& channel);
  HybridState apply(const HybridState& w) const;

  std::size_t stages() const noexcept { return stages_.size(); }
  const std::vector<HybridChannel>& stage_list() const noexcept { return stages_; }

 private:
  std::vector<HybridChannel> stages_;
};

}  // namespace hybridiq
