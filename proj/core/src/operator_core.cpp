#include "hybridiq/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hybridiq/error.hpp"

namespace hybridiq {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected square");
  }
}

void require_bipartite(const CMatrix& m, int dim_a, int dim_b, const char* what) {
  require_square(m, what);
  if (dim_a < 1 || dim_b < 1 || m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dim " + std::to_string(m.rows()) + " != " +
                    std::to_string(dim_a) + "*" + std::to_string(dim_b));
  }
}

void require_state(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0 || !all_finite(m) ||
      hermiticity_defect(m) > tol::kHermitian) {
    throw Error(ErrorCode::NotAState, std::string(what) + " is not a Hermitian matrix");
  }
  if (!is_density_matrix(m)) {
    throw Error(ErrorCode::NotAState,
                std::string(what) + " is not PSD with unit trace (trace " +
                    std::to_string(m.trace().real()) + ")");
  }
}

}  // namespace

HermEig hermitian_eig(const CMatrix& m) {
  require_square(m, "hermitian_eig");
  if (!all_finite(m)) {
    throw Error(ErrorCode::NumericalFailure, "hermitian_eig: non-finite entries");
  }
  const double defect = hermiticity_defect(m);
  if (defect > tol::kHermitian) {
    throw Error(ErrorCode::NotHermitian,
                "hermitian_eig: ‖M − M†‖_max = " + std::to_string(defect));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "hermitian_eig: eigensolver did not converge");
  }
  // Eigen returns ascending order.
  HermEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double trace_norm(const CMatrix& m) {
  if (!all_finite(m)) {
    throw Error(ErrorCode::NumericalFailure, "trace_norm: non-finite entries");
  }
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Subsystem traced) {
  require_bipartite(m, dim_a, dim_b, "partial_trace");
  if (traced == Subsystem::B) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        out(i, j) = m.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int a = 0; a < dim_a; ++a) out += m.block(a * dim_b, a * dim_b, dim_b, dim_b);
  return out;
}

CMatrix partial_transpose(const CMatrix& m, int dim_a, int dim_b, Subsystem side) {
  require_bipartite(m, dim_a, dim_b, "partial_transpose");
  CMatrix out(m.rows(), m.cols());
  for (int i = 0; i < dim_a; ++i) {
    for (int j = 0; j < dim_a; ++j) {
      if (side == Subsystem::B) {
        out.block(i * dim_b, j * dim_b, dim_b, dim_b) =
            m.block(i * dim_b, j * dim_b, dim_b, dim_b).transpose();
      } else {
        out.block(i * dim_b, j * dim_b, dim_b, dim_b) =
            m.block(j * dim_b, i * dim_b, dim_b, dim_b);
      }
    }
  }
  return out;
}

bool is_psd(const CMatrix& m, double tolerance) {
  const HermEig eig = hermitian_eig(m);
  if (eig.values.size() == 0) return true;
  const double norm1 = eig.values.cwiseAbs().sum();
  return eig.values.minCoeff() >= -tolerance * std::max(1.0, norm1);
}

double min_eigenvalue(const CMatrix& m) {
  const HermEig eig = hermitian_eig(m);
  return eig.values.size() == 0 ? 0.0 : eig.values.minCoeff();
}

double von_neumann_entropy(const CMatrix& rho) {
  require_state(rho, "von_neumann_entropy: ρ");
  const HermEig eig = hermitian_eig(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda > tol::kSpectralZero) s -= lambda * std::log(lambda);
  }
  return std::max(s, 0.0);
}

double relative_entropy(const CMatrix& rho, const CMatrix& tau) {
  require_state(rho, "relative_entropy: ρ");
  require_state(tau, "relative_entropy: τ");
  if (rho.rows() != tau.rows()) {
    throw Error(ErrorCode::NotAState, "relative_entropy: dimension mismatch");
  }
  const HermEig er = hermitian_eig(rho);
  const HermEig et = hermitian_eig(tau);

  double rho_log_rho = 0.0;
  for (Eigen::Index i = 0; i < er.values.size(); ++i) {
    const double lambda = er.values(i);
    if (lambda > tol::kSpectralZero) rho_log_rho += lambda * std::log(lambda);
  }

  // Weight of ρ on each eigenvector of τ: ⟨t_j|ρ|t_j⟩.
  const CMatrix rotated = et.vectors.adjoint() * hermitian_part(rho) * et.vectors;
  double rho_log_tau = 0.0;
  for (Eigen::Index j = 0; j < et.values.size(); ++j) {
    const double weight = rotated(j, j).real();
    const double mu = et.values(j);
    if (mu > tol::kSpectralZero) {
      rho_log_tau += weight * std::log(mu);
    } else if (weight > 1e-12) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return std::max(rho_log_rho - rho_log_tau, 0.0);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

bool is_density_matrix(const CMatrix& m, double tolerance) {
  if (m.rows() != m.cols() || m.rows() == 0 || !all_finite(m)) return false;
  if (hermiticity_defect(m) > tol::kHermitian) return false;
  if (std::abs(m.trace().real() - 1.0) > tolerance) return false;
  return is_psd(m, tolerance);
}

CMatrix inverse_sqrt_pd(const CMatrix& a, double floor) {
  const HermEig eig = hermitian_eig(a);
  const double top = eig.values.size() ? eig.values(0) : 0.0;
  const double bottom = eig.values.size() ? eig.values.minCoeff() : 0.0;
  if (!(top > 0.0) || bottom < floor * top) {
    throw Error(ErrorCode::NumericalFailure, "inverse_sqrt_pd: matrix is singular");
  }
  const RVector scale = eig.values.cwiseSqrt().cwiseInverse();
  return eig.vectors * scale.asDiagonal() * eig.vectors.adjoint();
}

CMatrix sqrt_psd(const CMatrix& a) {
  const HermEig eig = hermitian_eig(a);
  const RVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

CMatrix matrix_unit(int dim, int row, int col) {
  CMatrix out = CMatrix::Zero(dim, dim);
  out(row, col) = 1.0;
  return out;
}

}  // namespace hybridiq
