#pragma once

#include <vector>

#include "hybridiq/hybrid_channel.hpp"
#include "hybridiq/hybrid_state.hpp"

namespace hybridiq {

struct Ensemble {
  std::vector<double> probabilities;
  std::vector<CMatrix> states;
};

// Throws NotAnEnsemble unless the probabilities are non-negative, sum to one
// within tol::kState, and every state is a density matrix of a common size.
void validate_ensemble(const Ensemble& ensemble);

// χ = S(Σ p_r ρ_r) − Σ p_r S(ρ_r), in nats.
double holevo(const Ensemble& ensemble);

// The ensemble {(p_n, η_n)} over cells with p_n > tol::kProbability.
Ensemble cell_ensemble(const HybridState& w);

// Classical-quantum mutual information, evaluated as the Holevo quantity of
// cell_ensemble(w).
double mutual_information(const HybridState& w);

// Σ_n tr(σ_n ln σ_n) − Σ_n p_n ln p_n − tr(ρ ln ρ). Same value as
// mutual_information but ill-conditioned when blocks are near-singular;
// kept as a cross-check.
double mutual_information_three_term(const HybridState& w);

struct MonotonicityReport {
  double i_before = 0.0;
  double i_after = 0.0;
  bool violation = false;
  double bound_2s = 0.0;  // 2·S(quantum marginal of the input)
};

// Mutual information before and after `channel`; flags I_after > I_before +
// 1e-8. Meant for channels built by non_interacting().
MonotonicityReport monotonicity_report(const HybridState& w, const HybridChannel& channel);

}  // namespace hybridiq
