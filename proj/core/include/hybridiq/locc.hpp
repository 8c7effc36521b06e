#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hybridiq/classical_space.hpp"
#include "hybridiq/hybrid_channel.hpp"
#include "hybridiq/hybrid_state.hpp"
#include "hybridiq/random.hpp"

namespace hybridiq {

// Outcome labels of earlier rounds, each ≥ 1. Label 0 means "not measured
// yet" and only appears in record-space cells.
using History = std::vector<int>;
using OutcomeRecord = std::vector<int>;

// "x1.x2.….x_{r−1}", "" for the first round.
std::string history_key(const History& history);
// Throws ParseError.
History parse_history_key(const std::string& key);

struct LoccRound {
  int side = 1;      // 1 or 2
  int outcomes = 1;  // y_r
  // History → instrument elements V_1..V_{y_r} acting on the round's side.
  // Only reachable histories need entries.
  std::map<History, std::vector<CMatrix>> instrument;
};

// Odd rounds (1-based) on side 1, even rounds on side 2.
int default_side(std::size_t round_index);

class LoccProtocol {
 public:
  // Throws ShapeMismatch on bad dims/sides/element shapes and
  // IncompleteInstrument when a given instrument violates Σ V†V = I.
  LoccProtocol(int d1, int d2, std::vector<LoccRound> rounds);

  int d1() const noexcept { return d1_; }
  int d2() const noexcept { return d2_; }
  int side_dim(int side) const noexcept { return side == 1 ? d1_ : d2_; }
  const std::vector<LoccRound>& rounds() const noexcept { return rounds_; }
  // nullptr when the history has no entry.
  const std::vector<CMatrix>* instrument(std::size_t round, const History& history) const;
  // V ⊗ I₂ or I₁ ⊗ V for the round's side.
  CMatrix lift(std::size_t round, const CMatrix& local) const;

 private:
  int d1_;
  int d2_;
  std::vector<LoccRound> rounds_;
};

// W_x for one complete record, with its per-side factors W_x = W¹ ⊗ W².
struct RecordOperator {
  OutcomeRecord record;
  CMatrix full;
  CMatrix first;
  CMatrix second;
};

// All complete records in lexicographic order. Records below an unreachable
// history (accumulated W = 0) get W = 0. Throws IncompleteInstrument for a
// reachable history without an instrument, RecordSpaceTooLarge past 1e5
// records.
std::vector<RecordOperator> record_operators(const LoccProtocol& protocol);

struct LoccResult {
  HybridState state;  // counting measure over complete records
  CMatrix lambda;     // Λ(ρ) = Σ_x W_x ρ W_x†
  std::vector<OutcomeRecord> records;
};

// Throws NotAState unless ρ is a density matrix of dimension d1·d2.
LoccResult run(const LoccProtocol& protocol, const CMatrix& rho);

// Full record space Π_r {0, …, y_r}, counting measure, mixed radix with
// x_1 most significant. Throws RecordSpaceTooLarge past 1e5 cells.
ClassicalSpace record_space(const LoccProtocol& protocol);
std::size_t record_index(const LoccProtocol& protocol, const OutcomeRecord& record);
// Point mass at (0, …, 0) with quantum part ρ.
HybridState initial_record_state(const LoccProtocol& protocol, const CMatrix& rho);

// One hybrid channel per round over record_space(): source x′ with a
// complete prefix (x′_1..x′_{r−1} ≥ 1) moves to x′ with x_r = k via the
// lifted V^r_k(prefix). Sources whose prefix contains 0 or is unreachable
// keep an identity block.
std::vector<HybridChannel> as_hybrid_channels(const LoccProtocol& protocol);

// Σ_n p_n η1_n ⊗ η2_n. Throws NotAState.
CMatrix separable_from_ensemble(const std::vector<double>& masses, const std::vector<CMatrix>& eta1,
                                const std::vector<CMatrix>& eta2);
CMatrix separable_from_ensemble(const ClassicalSpace& space, const std::vector<double>& masses,
                                const std::vector<CMatrix>& eta1, const std::vector<CMatrix>& eta2);

struct PptReport {
  bool ppt = false;
  bool conclusive = false;  // PPT ⇔ separable only when d1·d2 ≤ 6
  double min_eigenvalue = 0.0;
};

// Partial transpose on side 2. Throws DimensionMismatch.
PptReport ppt_report(const CMatrix& rho, int d1, int d2, double tolerance = 1e-9);
bool is_ppt(const CMatrix& rho, int d1, int d2);

struct SeparableTarget {
  ClassicalSpace space;
  std::vector<double> masses;
  std::vector<CMatrix> eta1;
  std::vector<CMatrix> eta2;
};

// Turns any ρ into the target's Σ p_n η1_n ⊗ η2_n: a two-round local
// protocol collapses ρ to |0⟩⟨0| ⊗ |0⟩⟨0|, then two cell-dependent channels
// prepare η1_n and η2_n on the target's classical space.
struct SteeringScript {
  SeparableTarget target;
  LoccProtocol collapse;
  HybridChannel prepare_first;
  HybridChannel prepare_second;

  // Final hybrid state; its quantum marginal is the target separable state.
  HybridState run(const CMatrix& rho) const;
};

// Throws NotAState when the target is invalid.
SteeringScript steer_to_separable(const SeparableTarget& target, int d1, int d2);

// Random instruments for every history; rounds alternate sides.
LoccProtocol random_protocol(int d1, int d2, int rounds, int max_outcomes, Rng& rng);

}  // namespace hybridiq
