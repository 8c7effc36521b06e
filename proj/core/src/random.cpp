#include "hybridiq/random.hpp"

#include <cmath>

#include <Eigen/QR>

namespace hybridiq {

CMatrix random_ginibre(int rows, int cols, Rng& rng) {
  CMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
  return g;
}

CMatrix random_unitary(int dim, Rng& rng) {
  const CMatrix g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phases so the distribution is Haar.
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    if (a > 0) q.col(i) *= d / a;
  }
  return q;
}

CMatrix random_density(int dim, Rng& rng, int rank) {
  if (rank <= 0 || rank > dim) rank = dim;
  const CMatrix g = random_ginibre(dim, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

CMatrix random_hermitian(int dim, Rng& rng) { return hermitian_part(random_ginibre(dim, dim, rng)); }

std::vector<CMatrix> random_effect_decomposition(int dim, int parts, Rng& rng, bool complete) {
  std::vector<CMatrix> raw;
  raw.reserve(parts);
  CMatrix total = CMatrix::Zero(dim, dim);
  for (int k = 0; k < parts; ++k) {
    const CMatrix g = random_ginibre(dim, rng.uniform_int(1, dim), rng);
    raw.push_back(g * g.adjoint());
    total += raw.back();
  }
  if (!complete) {
    const CMatrix g = random_ginibre(dim, dim, rng);
    total += rng.uniform(0.05, 1.0) * g * g.adjoint();
  }
  const CMatrix t = inverse_sqrt_pd(hermitian_part(total), 1e-14);
  std::vector<CMatrix> out;
  out.reserve(parts);
  for (const CMatrix& a : raw) out.push_back(hermitian_part(t * a * t));
  return out;
}

CMatrix random_effect(int dim, Rng& rng) {
  const HermEig eig = hermitian_eig(random_hermitian(dim, rng));
  RVector spectrum(dim);
  for (int i = 0; i < dim; ++i) spectrum(i) = rng.uniform();
  return hermitian_part(eig.vectors * spectrum.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
}

RMatrix random_stochastic(int rows, int cols, Rng& rng) {
  RMatrix p(rows, cols);
  for (int n = 0; n < cols; ++n) {
    const std::vector<double> column = random_probabilities(rows, rng, 0.3);
    for (int m = 0; m < rows; ++m) p(m, n) = column[m];
  }
  return p;
}

std::vector<CMatrix> random_kraus(int dim, int count, Rng& rng) {
  std::vector<CMatrix> ops;
  CMatrix total = CMatrix::Zero(dim, dim);
  for (int k = 0; k < count; ++k) {
    ops.push_back(random_ginibre(dim, dim, rng));
    total += ops.back().adjoint() * ops.back();
  }
  const CMatrix t = inverse_sqrt_pd(hermitian_part(total), 1e-14);
  for (CMatrix& op : ops) op = op * t;
  return ops;
}

std::vector<double> random_probabilities(int size, Rng& rng, double sparsity) {
  std::vector<double> p(size);
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    p[i] = rng.uniform() < sparsity ? 0.0 : -std::log(rng.uniform(1e-12, 1.0));
    total += p[i];
  }
  if (total == 0.0) {
    p[rng.uniform_int(0, size - 1)] = 1.0;
    return p;
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace hybridiq
