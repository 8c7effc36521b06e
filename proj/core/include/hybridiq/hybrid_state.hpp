#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "hybridiq/classical_space.hpp"
#include "hybridiq/error.hpp"
#include "hybridiq/operator_core.hpp"
#include "hybridiq/random.hpp"

namespace hybridiq {

// Operator E with 0 ≤ E ≤ I.
class Effect {
 public:
  // Throws BadEffect unless E and I − E are PSD within tol::kState.
  explicit Effect(CMatrix matrix);
  static Effect identity(int dim);

  const CMatrix& matrix() const noexcept { return e_; }
  int dim() const noexcept { return static_cast<int>(e_.rows()); }

 private:
  CMatrix e_;
};

// A subset of the cells of a classical space.
class Event {
 public:
  static Event all(std::size_t cells);
  static Event none(std::size_t cells);
  // Throws BadEvent when a cell index is out of range.
  static Event of(std::size_t cells, const std::vector<std::size_t>& members);

  std::size_t universe() const noexcept { return member_.size(); }
  bool contains(std::size_t cell) const { return member_.at(cell); }
  std::vector<std::size_t> cells() const;
  Event complement() const;

 private:
  explicit Event(std::vector<bool> member) : member_(std::move(member)) {}
  std::vector<bool> member_;
};

// Simple hybrid state stored as cell masses σ_n = μ_n ω_n: every σ_n is PSD
// and Σ_n tr σ_n = 1.
class HybridState {
 public:
  // Validating constructor. Throws ShapeMismatch when the mass count or
  // dimensions disagree, NotPositive naming the first non-PSD cell,
  // NotNormalized when |Σ tr σ_n − 1| > tol::kState. With `renormalize`,
  // totals within [0.9, 1.1] are rescaled to one first.
  HybridState(ClassicalSpace space, std::vector<CMatrix> masses, bool renormalize = false);

  // Skips validation; for results that hold the invariants by construction.
  static HybridState unchecked(ClassicalSpace space, int qdim, std::vector<CMatrix> masses);

  const ClassicalSpace& space() const noexcept { return space_; }
  int qdim() const noexcept { return qdim_; }
  std::size_t cells() const noexcept { return masses_.size(); }
  const CMatrix& mass(std::size_t cell) const { return masses_.at(cell); }
  const std::vector<CMatrix>& masses() const noexcept { return masses_; }
  double total_trace() const;

 private:
  struct Trusted {};
  HybridState(Trusted, ClassicalSpace space, int qdim, std::vector<CMatrix> masses);

  ClassicalSpace space_;
  int qdim_;
  std::vector<CMatrix> masses_;
};

// Result of checking the state invariants without throwing.
struct StateCheck {
  bool ok = true;
  std::optional<ErrorCode> failure;
  std::optional<std::size_t> cell;
  double min_eigenvalue = 0.0;  // smallest eigenvalue over all blocks
  double total_trace = 0.0;
  double hermiticity_defect = 0.0;
  std::string message;
};

StateCheck check_state(const std::vector<CMatrix>& masses, double tolerance = tol::kState);

// w(A, E) = Σ_{n∈A} tr(σ_n E). Throws BadEvent / BadEffect on size mismatch.
double probability(const HybridState& w, const Event& event, const Effect& effect);

struct ClassicalMarginal {
  std::vector<double> masses;     // p_n = tr σ_n
  std::vector<double> densities;  // f_n = p_n / μ_n
};

ClassicalMarginal classical_marginal(const HybridState& w);
CMatrix quantum_marginal(const HybridState& w);
// η_n = σ_n / tr σ_n. Throws ZeroMassCell when tr σ_n ≤ tol::kProbability.
CMatrix conditional_quantum(const HybridState& w, std::size_t cell);

// d(w1, w2) = Σ_n ‖σ1_n − σ2_n‖₁. Throws SpaceMismatch.
double distance(const HybridState& w1, const HybridState& w2);

// σ_n = f_n ρ for per-cell masses f. Throws NotAState.
HybridState product_state(const ClassicalSpace& space, const std::vector<double>& masses,
                          const CMatrix& rho);

// σ'_n = σ_n ⊗ ρ_q (ancilla is the second tensor factor).
HybridState tensor_with_quantum(const HybridState& w, const CMatrix& rho_q);

struct Conditioned {
  double probability;
  HybridState state;
};

// Conditions the ancilla factor of w (qdim = d·d_q) on the effect F of
// dimension d_q: returns w(X, I⊗F) and the state tr_q(σ_n (I⊗F)) / w(X, I⊗F).
// Throws DimensionMismatch, ZeroProbability.
Conditioned condition_on_effect(const HybridState& w, const Effect& ancilla_effect);

// ω̂ = Σ_n σ_n ⊗ |n⟩⟨n| on C^qdim ⊗ C^N.
CMatrix embed_quantum(const HybridState& w);

// t·w1 + (1 − t)·w2, cellwise on masses. Throws SpaceMismatch.
HybridState mix(double t, const HybridState& w1, const HybridState& w2);

struct RandomStateOptions {
  int rank = 0;                   // rank of each block; ≤ 0 means full rank
  double empty_cell_chance = 0.0;  // probability that a cell carries no mass
};

// Normalized Wishart blocks G_n G_n† with random cell masses. Deterministic
// in the seed.
HybridState random_state(const ClassicalSpace& space, int qdim, std::uint64_t seed);
HybridState random_state(const ClassicalSpace& space, int qdim, Rng& rng,
                         const RandomStateOptions& options = {});

}  // namespace hybridiq
