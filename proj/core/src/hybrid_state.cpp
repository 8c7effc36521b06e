#include "hybridiq/hybrid_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hybridiq {

namespace {

void require_same_space(const HybridState& a, const HybridState& b, const char* what) {
  if (!a.space().same_as(b.space()) || a.qdim() != b.qdim()) {
    throw Error(ErrorCode::SpaceMismatch, std::string(what) + ": states live on different spaces");
  }
}

// Lexicographic order on (re, im) entries.
bool precedes(const CMatrix& a, const CMatrix& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Complex x = a.data()[i];
    const Complex y = b.data()[i];
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return true;
}

}  // namespace

Effect::Effect(CMatrix matrix) : e_(std::move(matrix)) {
  if (e_.rows() != e_.cols() || e_.rows() == 0 || !all_finite(e_) ||
      hermiticity_defect(e_) > tol::kHermitian) {
    throw Error(ErrorCode::BadEffect, "effect must be a finite Hermitian square matrix");
  }
  e_ = hermitian_part(e_);
  const HermEig eig = hermitian_eig(e_);
  const double lo = eig.values.minCoeff();
  const double hi = eig.values.maxCoeff();
  if (lo < -tol::kState || hi > 1.0 + tol::kState) {
    throw Error(ErrorCode::BadEffect, "effect spectrum [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "] is outside [0, 1]");
  }
}

Effect Effect::identity(int dim) { return Effect(hybridiq::identity(dim)); }

Event Event::all(std::size_t cells) { return Event(std::vector<bool>(cells, true)); }
Event Event::none(std::size_t cells) { return Event(std::vector<bool>(cells, false)); }

Event Event::of(std::size_t cells, const std::vector<std::size_t>& members) {
  std::vector<bool> member(cells, false);
  for (std::size_t n : members) {
    if (n >= cells) {
      throw Error(ErrorCode::BadEvent,
                  "cell " + std::to_string(n) + " is outside a space of " + std::to_string(cells));
    }
    member[n] = true;
  }
  return Event(std::move(member));
}

std::vector<std::size_t> Event::cells() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < member_.size(); ++n)
    if (member_[n]) out.push_back(n);
  return out;
}

Event Event::complement() const {
  std::vector<bool> flipped(member_.size());
  for (std::size_t n = 0; n < member_.size(); ++n) flipped[n] = !member_[n];
  return Event(std::move(flipped));
}

StateCheck check_state(const std::vector<CMatrix>& masses, double tolerance) {
  StateCheck check;
  check.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < masses.size(); ++n) {
    const CMatrix& sigma = masses[n];
    const double defect = hermiticity_defect(sigma);
    check.hermiticity_defect = std::max(check.hermiticity_defect, defect);
    if (!all_finite(sigma) || defect > tol::kHermitian) {
      if (check.ok) {
        check.ok = false;
        check.failure = ErrorCode::NotPositive;
        check.cell = n;
        check.message = "cell " + std::to_string(n) + " is not Hermitian";
      }
      continue;
    }
    const HermEig eig = hermitian_eig(sigma);
    const double lo = eig.values.minCoeff();
    check.min_eigenvalue = std::min(check.min_eigenvalue, lo);
    check.total_trace += sigma.trace().real();
    if (lo < -tolerance * std::max(1.0, eig.values.cwiseAbs().sum()) && check.ok) {
      check.ok = false;
      check.failure = ErrorCode::NotPositive;
      check.cell = n;
      check.message = "cell " + std::to_string(n) + " has eigenvalue " + std::to_string(lo);
    }
  }
  if (check.ok && std::abs(check.total_trace - 1.0) > tolerance) {
    check.ok = false;
    check.failure = ErrorCode::NotNormalized;
    check.message = "total trace " + std::to_string(check.total_trace);
  }
  return check;
}

HybridState::HybridState(ClassicalSpace space, std::vector<CMatrix> masses, bool renormalize)
    : space_(std::move(space)), qdim_(0), masses_(std::move(masses)) {
  if (masses_.size() != space_.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(masses_.size()) + " masses for " +
                                              std::to_string(space_.size()) + " cells");
  }
  qdim_ = static_cast<int>(masses_.front().rows());
  for (const CMatrix& sigma : masses_) {
    if (sigma.rows() != qdim_ || sigma.cols() != qdim_ || qdim_ == 0) {
      throw Error(ErrorCode::ShapeMismatch, "cell masses must share one square dimension");
    }
  }
  if (renormalize) {
    double total = 0.0;
    for (const CMatrix& sigma : masses_) total += sigma.trace().real();
    if (total >= 0.9 && total <= 1.1) {
      for (CMatrix& sigma : masses_) sigma /= total;
    }
  }
  const StateCheck check = check_state(masses_);
  if (!check.ok) {
    if (check.failure == ErrorCode::NotPositive) {
      throw Error(ErrorCode::NotPositive, "cell " + std::to_string(*check.cell) + ": " + check.message);
    }
    throw Error(ErrorCode::NotNormalized, check.message);
  }
  for (CMatrix& sigma : masses_) sigma = hermitian_part(sigma);
}

HybridState::HybridState(Trusted, ClassicalSpace space, int qdim, std::vector<CMatrix> masses)
    : space_(std::move(space)), qdim_(qdim), masses_(std::move(masses)) {}

HybridState HybridState::unchecked(ClassicalSpace space, int qdim, std::vector<CMatrix> masses) {
  if (masses.size() != space.size()) {
    throw Error(ErrorCode::ShapeMismatch, "mass count does not match cell count");
  }
  return HybridState(Trusted{}, std::move(space), qdim, std::move(masses));
}

double HybridState::total_trace() const {
  double total = 0.0;
  for (const CMatrix& sigma : masses_) total += sigma.trace().real();
  return total;
}

double probability(const HybridState& w, const Event& event, const Effect& effect) {
  if (event.universe() != w.cells()) {
    throw Error(ErrorCode::BadEvent, "event is over " + std::to_string(event.universe()) +
                                         " cells, state has " + std::to_string(w.cells()));
  }
  if (effect.dim() != w.qdim()) {
    throw Error(ErrorCode::BadEffect, "effect dimension " + std::to_string(effect.dim()) +
                                          " != qdim " + std::to_string(w.qdim()));
  }
  double total = 0.0;
  for (std::size_t n = 0; n < w.cells(); ++n) {
    if (!event.contains(n)) continue;
    // tr(σ E) = Σ_ij σ_ij E_ji
    total += (w.mass(n).cwiseProduct(effect.matrix().transpose())).sum().real();
  }
  return total;
}

ClassicalMarginal classical_marginal(const HybridState& w) {
  ClassicalMarginal out;
  out.masses.reserve(w.cells());
  out.densities.reserve(w.cells());
  for (std::size_t n = 0; n < w.cells(); ++n) {
    const double p = w.mass(n).trace().real();
    out.masses.push_back(p);
    out.densities.push_back(p / w.space().weight(n));
  }
  return out;
}

CMatrix quantum_marginal(const HybridState& w) {
  CMatrix rho = CMatrix::Zero(w.qdim(), w.qdim());
  for (const CMatrix& sigma : w.masses()) rho += sigma;
  return rho;
}

CMatrix conditional_quantum(const HybridState& w, std::size_t cell) {
  const double p = w.mass(cell).trace().real();
  if (!(p > tol::kProbability)) {
    throw Error(ErrorCode::ZeroMassCell, "cell " + std::to_string(cell) + " has mass " + std::to_string(p));
  }
  return w.mass(cell) / p;
}

double distance(const HybridState& w1, const HybridState& w2) {
  require_same_space(w1, w2, "distance");
  double d = 0.0;
  for (std::size_t n = 0; n < w1.cells(); ++n) {
    // Fixed operand order per pair keeps d(w1, w2) and d(w2, w1) bitwise equal.
    const CMatrix& a = w1.mass(n);
    const CMatrix& b = w2.mass(n);
    d += precedes(a, b) ? trace_norm(a - b) : trace_norm(b - a);
  }
  return d;
}

HybridState product_state(const ClassicalSpace& space, const std::vector<double>& masses,
                          const CMatrix& rho) {
  if (masses.size() != space.size()) {
    throw Error(ErrorCode::NotAState, "product_state: mass vector has wrong length");
  }
  double total = 0.0;
  for (double f : masses) {
    if (!std::isfinite(f) || f < 0.0) throw Error(ErrorCode::NotAState, "product_state: negative mass");
    total += f;
  }
  if (std::abs(total - 1.0) > tol::kState) {
    throw Error(ErrorCode::NotAState, "product_state: masses sum to " + std::to_string(total));
  }
  if (!is_density_matrix(rho)) throw Error(ErrorCode::NotAState, "product_state: ρ is not a density matrix");
  const CMatrix clean = hermitian_part(rho);
  std::vector<CMatrix> sigma;
  sigma.reserve(masses.size());
  for (double f : masses) sigma.push_back(f * clean);
  return HybridState::unchecked(space, static_cast<int>(rho.rows()), std::move(sigma));
}

HybridState tensor_with_quantum(const HybridState& w, const CMatrix& rho_q) {
  if (!is_density_matrix(rho_q)) {
    throw Error(ErrorCode::NotAState, "tensor_with_quantum: ancilla is not a density matrix");
  }
  const CMatrix clean = hermitian_part(rho_q);
  std::vector<CMatrix> sigma;
  sigma.reserve(w.cells());
  for (const CMatrix& s : w.masses()) sigma.push_back(kron(s, clean));
  return HybridState::unchecked(w.space(), w.qdim() * static_cast<int>(rho_q.rows()), std::move(sigma));
}

Conditioned condition_on_effect(const HybridState& w, const Effect& ancilla_effect) {
  const int dq = ancilla_effect.dim();
  if (dq < 1 || w.qdim() % dq != 0) {
    throw Error(ErrorCode::DimensionMismatch, "ancilla dimension " + std::to_string(dq) +
                                                  " does not divide qdim " + std::to_string(w.qdim()));
  }
  const int d = w.qdim() / dq;
  const CMatrix lifted = kron(identity(d), ancilla_effect.matrix());
  double prob = 0.0;
  std::vector<CMatrix> reduced;
  reduced.reserve(w.cells());
  for (const CMatrix& sigma : w.masses()) {
    const CMatrix weighted = sigma * lifted;
    prob += weighted.trace().real();
    reduced.push_back(partial_trace(weighted, d, dq, Subsystem::B));
  }
  if (!(prob > tol::kProbability)) {
    throw Error(ErrorCode::ZeroProbability, "w(X, I⊗F) = " + std::to_string(prob));
  }
  for (CMatrix& s : reduced) s = hermitian_part(s) / prob;
  return {prob, HybridState(w.space(), std::move(reduced))};
}

CMatrix embed_quantum(const HybridState& w) {
  const int q = w.qdim();
  const auto cells = static_cast<int>(w.cells());
  CMatrix out = CMatrix::Zero(q * cells, q * cells);
  for (int n = 0; n < cells; ++n) {
    const CMatrix& sigma = w.mass(n);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) out(i * cells + n, j * cells + n) = sigma(i, j);
  }
  return out;
}

HybridState mix(double t, const HybridState& w1, const HybridState& w2) {
  require_same_space(w1, w2, "mix");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::BadRange, "mix: t must lie in [0, 1]");
  std::vector<CMatrix> sigma;
  sigma.reserve(w1.cells());
  for (std::size_t n = 0; n < w1.cells(); ++n) sigma.push_back(t * w1.mass(n) + (1.0 - t) * w2.mass(n));
  return HybridState::unchecked(w1.space(), w1.qdim(), std::move(sigma));
}

HybridState random_state(const ClassicalSpace& space, int qdim, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(space, qdim, rng);
}

HybridState random_state(const ClassicalSpace& space, int qdim, Rng& rng,
                         const RandomStateOptions& options) {
  const auto cells = static_cast<int>(space.size());
  std::vector<double> p = random_probabilities(cells, rng, options.empty_cell_chance);
  std::vector<CMatrix> sigma;
  sigma.reserve(space.size());
  for (int n = 0; n < cells; ++n) {
    const int rank = options.rank <= 0 ? qdim : std::min(options.rank, qdim);
    const CMatrix g = random_ginibre(qdim, rank, rng);
    CMatrix block = g * g.adjoint();
    block *= p[n] / block.trace().real();
    sigma.push_back(hermitian_part(block));
  }
  return HybridState::unchecked(space, qdim, std::move(sigma));
}

}  // namespace hybridiq
