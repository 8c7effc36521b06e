#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridiq::oracle {

CMatrix loop_product(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("loop_product: shape");
  CMatrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Complex acc = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

CMatrix loop_sandwich(const CMatrix& left, const CMatrix& sigma, const CMatrix& right) {
  CMatrix out = CMatrix::Zero(left.rows(), right.rows());
  for (Eigen::Index i = 0; i < left.rows(); ++i)
    for (Eigen::Index j = 0; j < right.rows(); ++j)
      for (Eigen::Index k = 0; k < sigma.rows(); ++k)
        for (Eigen::Index l = 0; l < sigma.cols(); ++l)
          out(i, j) += left(i, k) * sigma(k, l) * std::conj(right(j, l));
  return out;
}

CMatrix loop_kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

double loop_probability(const std::vector<CMatrix>& masses, const std::vector<std::size_t>& event,
                        const CMatrix& effect) {
  Complex total = 0.0;
  for (std::size_t n : event) {
    const CMatrix& s = masses[n];
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (Eigen::Index j = 0; j < s.cols(); ++j) total += s(i, j) * effect(j, i);
  }
  return total.real();
}

CMatrix loop_partial_trace(const CMatrix& m, int dim_a, int dim_b, int traced) {
  const int keep = traced == 0 ? dim_b : dim_a;
  const int sum = traced == 0 ? dim_a : dim_b;
  CMatrix out = CMatrix::Zero(keep, keep);
  for (int i = 0; i < keep; ++i) {
    for (int j = 0; j < keep; ++j) {
      for (int s = 0; s < sum; ++s) {
        const int row = traced == 0 ? s * dim_b + i : i * dim_b + s;
        const int col = traced == 0 ? s * dim_b + j : j * dim_b + s;
        out(i, j) += m(row, col);
      }
    }
  }
  return out;
}

std::vector<CMatrix> naive_apply(const HybridChannel& channel, const std::vector<CMatrix>& masses) {
  const int q = channel.qdim_dst();
  std::vector<CMatrix> out(channel.dst().size(), CMatrix::Zero(q, q));
  for (std::size_t m = 0; m < channel.dst().size(); ++m)
    for (std::size_t n = 0; n < channel.src().size(); ++n)
      for (const CMatrix& l : channel.block(m, n)) out[m] += loop_sandwich(l, masses[n], l);
  return out;
}

std::vector<CMatrix> direct_non_interacting(const RMatrix& p, const std::vector<CMatrix>& kraus,
                                            const std::vector<CMatrix>& masses) {
  const auto q = kraus.front().rows();
  std::vector<CMatrix> evolved;
  for (const CMatrix& sigma : masses) {
    CMatrix acc = CMatrix::Zero(q, q);
    for (const CMatrix& k : kraus) acc += loop_sandwich(k, sigma, k);
    evolved.push_back(acc);
  }
  std::vector<CMatrix> out(static_cast<std::size_t>(p.rows()), CMatrix::Zero(q, q));
  for (Eigen::Index m = 0; m < p.rows(); ++m)
    for (Eigen::Index n = 0; n < p.cols(); ++n) out[m] += p(m, n) * evolved[n];
  return out;
}

std::vector<CMatrix> direct_coeff_kernel(const std::vector<CMatrix>& basis,
                                         const std::function<const CMatrix*(std::size_t, std::size_t)>& coeff,
                                         std::size_t dst_cells, const std::vector<CMatrix>& masses) {
  const auto d = basis.front().rows();
  const std::size_t b = basis.size();
  std::vector<CMatrix> out(dst_cells, CMatrix::Zero(d, d));
  for (std::size_t m = 0; m < dst_cells; ++m) {
    for (std::size_t n = 0; n < masses.size(); ++n) {
      const CMatrix* k = coeff(m, n);
      if (k == nullptr) continue;
      for (std::size_t a = 0; a < b; ++a) {
        for (std::size_t c = 0; c < b; ++c) {
          const Complex s = 0.5 * ((*k)(a, c) + std::conj((*k)(c, a)));
          if (s == Complex(0.0)) continue;
          out[m] += s * loop_sandwich(basis[a], masses[n], basis[c]);
        }
      }
    }
  }
  return out;
}

std::vector<Complex> characteristic_polynomial(const CMatrix& m) {
  const auto d = m.rows();
  // M_k = A M_{k-1} + c_{d-k+1} I,  c_{d-k} = −tr(A M_k)/k.
  std::vector<Complex> c(static_cast<std::size_t>(d + 1), 0.0);
  c[d] = 1.0;
  CMatrix mk = CMatrix::Zero(d, d);
  for (Eigen::Index k = 1; k <= d; ++k) {
    mk = loop_product(m, mk);
    for (Eigen::Index i = 0; i < d; ++i) mk(i, i) += c[d - k + 1];
    const CMatrix am = loop_product(m, mk);
    Complex tr = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) tr += am(i, i);
    c[d - k] = -tr / static_cast<double>(k);
  }
  return c;
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coefficients) {
  const std::size_t d = coefficients.size() - 1;
  double radius = 0.0;
  for (std::size_t i = 0; i < d; ++i) radius = std::max(radius, std::abs(coefficients[i]));
  radius += 1.0;
  std::vector<Complex> z(d);
  for (std::size_t i = 0; i < d; ++i) z[i] = radius * std::polar(1.0, 0.4 + 2.0 * M_PI * static_cast<double>(i) / d);
  auto eval = [&](Complex x) {
    Complex acc = coefficients[d];
    for (std::size_t i = d; i-- > 0;) acc = acc * x + coefficients[i];
    return acc;
  };
  for (int iter = 0; iter < 5000; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) denom *= z[i] - z[j];
      if (std::abs(denom) == 0.0) denom = 1e-300;
      const Complex step = eval(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * radius) break;
  }
  // Newton polish for accuracy at clustered roots.
  for (Complex& r : z) {
    for (int iter = 0; iter < 3; ++iter) {
      Complex p = coefficients[d];
      Complex dp = 0.0;
      for (std::size_t i = d; i-- > 0;) {
        dp = dp * r + p;
        p = p * r + coefficients[i];
      }
      if (std::abs(dp) < 1e-300) break;
      r -= p / dp;
    }
  }
  return z;
}

std::vector<double> eigenvalues(const CMatrix& m) {
  std::vector<double> out;
  for (const Complex& r : polynomial_roots(characteristic_polynomial(m))) out.push_back(r.real());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double entropy_of_spectrum(const std::vector<double>& spectrum) {
  double s = 0.0;
  for (double v : spectrum)
    if (v > 1e-14) s -= v * std::log(v);
  return s;
}

double entropy(const CMatrix& rho) { return entropy_of_spectrum(eigenvalues(rho)); }

double hermitian_trace_norm(const CMatrix& m) {
  double s = 0.0;
  for (double v : eigenvalues(m)) s += std::abs(v);
  return s;
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs_diff(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, max_abs(a[i] - b[i]));
  return worst;
}

std::vector<std::size_t> random_subset(std::size_t cells, Rng& rng) {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < cells; ++n)
    if (rng.uniform() < 0.5) out.push_back(n);
  return out;
}

CMatrix ket(int dim, int index) {
  CMatrix v = CMatrix::Zero(dim, 1);
  v(index, 0) = 1.0;
  return v;
}

CMatrix projector(const CMatrix& vector) { return vector * vector.adjoint(); }

CMatrix bell_phi_plus() {
  CMatrix v = (ket(4, 0) + ket(4, 3)) / std::sqrt(2.0);
  return projector(v);
}

}  // namespace hybridiq::oracle
