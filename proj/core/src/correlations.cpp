#include "hybridiq/correlations.hpp"

#include <algorithm>
#include <cmath>

#include "hybridiq/error.hpp"

namespace hybridiq {

namespace {

double x_log_x_sum(const CMatrix& m) {
  const HermEig eig = hermitian_eig(m);
  double total = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda > tol::kSpectralZero) total += lambda * std::log(lambda);
  }
  return total;
}

}  // namespace

void validate_ensemble(const Ensemble& ensemble) {
  if (ensemble.probabilities.empty() || ensemble.probabilities.size() != ensemble.states.size()) {
    throw Error(ErrorCode::NotAnEnsemble, "need one state per probability");
  }
  double total = 0.0;
  for (double p : ensemble.probabilities) {
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorCode::NotAnEnsemble, "negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > tol::kState) {
    throw Error(ErrorCode::NotAnEnsemble, "probabilities sum to " + std::to_string(total));
  }
  const Eigen::Index d = ensemble.states.front().rows();
  for (const CMatrix& rho : ensemble.states) {
    if (rho.rows() != d || !is_density_matrix(rho)) {
      throw Error(ErrorCode::NotAnEnsemble, "ensemble member is not a density matrix of dimension " + std::to_string(d));
    }
  }
}

double holevo(const Ensemble& ensemble) {
  validate_ensemble(ensemble);
  const Eigen::Index d = ensemble.states.front().rows();
  CMatrix average = CMatrix::Zero(d, d);
  double conditional = 0.0;
  for (std::size_t r = 0; r < ensemble.states.size(); ++r) {
    const double p = ensemble.probabilities[r];
    if (p == 0.0) continue;
    average += p * ensemble.states[r];
    conditional -= p * x_log_x_sum(ensemble.states[r]);
  }
  return -x_log_x_sum(hermitian_part(average)) - conditional;
}

Ensemble cell_ensemble(const HybridState& w) {
  Ensemble out;
  double kept = 0.0;
  for (std::size_t n = 0; n < w.cells(); ++n) {
    const double p = w.mass(n).trace().real();
    if (!(p > tol::kProbability)) continue;
    out.probabilities.push_back(p);
    out.states.push_back(w.mass(n) / p);
    kept += p;
  }
  // Excluded cells carry at most N·ptol; fold it back into the weights.
  for (double& p : out.probabilities) p /= kept;
  return out;
}

double mutual_information(const HybridState& w) { return holevo(cell_ensemble(w)); }

double mutual_information_three_term(const HybridState& w) {
  double blocks = 0.0;
  double classical = 0.0;
  for (const CMatrix& sigma : w.masses()) {
    blocks += x_log_x_sum(sigma);
    const double p = sigma.trace().real();
    if (p > tol::kSpectralZero) classical += p * std::log(p);
  }
  return blocks - classical - x_log_x_sum(quantum_marginal(w));
}

MonotonicityReport monotonicity_report(const HybridState& w, const HybridChannel& channel) {
  MonotonicityReport report;
  report.i_before = mutual_information(w);
  report.i_after = mutual_information(apply(channel, w));
  report.violation = report.i_after > report.i_before + 1e-8;
  report.bound_2s = 2.0 * von_neumann_entropy(quantum_marginal(w));
  return report;
}

}  // namespace hybridiq
