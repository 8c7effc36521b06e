#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace hybridiq {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

namespace tol {
// Hermiticity acceptance, ‖M − M†‖_max.
inline constexpr double kHermitian = 1e-9;
// Eigenvalues below this are exactly zero in entropy formulas.
inline constexpr double kSpectralZero = 1e-14;
// Positivity and normalization slack for states and effects.
inline constexpr double kState = 1e-9;
// Probabilities at or below this count as zero when conditioning.
inline constexpr double kProbability = 1e-12;
// Column-sum slack of Markov kernels.
inline constexpr double kKernel = 1e-12;
// Entrywise slack of Kraus completeness relations.
inline constexpr double kCompleteness = 1e-9;
}  // namespace tol

enum class Subsystem { A, B };

// Spectral decomposition of a Hermitian matrix. Eigenvalues are sorted
// non-increasing; the columns of `vectors` are the matching orthonormal
// eigenvectors.
struct HermEig {
  RVector values;
  CMatrix vectors;
};

// Throws NotHermitian when ‖M − M†‖_max > tol::kHermitian, NumericalFailure
// when the solver does not converge or M has non-finite entries. The input is
// symmetrized to (M + M†)/2 before decomposition.
HermEig hermitian_eig(const CMatrix& m);

// Sum of singular values.
double trace_norm(const CMatrix& m);

// Traces out `traced` from M acting on C^dA ⊗ C^dB.
CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Subsystem traced);

// Transposes the `side` factor of M acting on C^dA ⊗ C^dB.
CMatrix partial_transpose(const CMatrix& m, int dim_a, int dim_b, Subsystem side);

// True iff λ_min(M) ≥ −tol·max(1, ‖M‖₁). Throws NotHermitian.
bool is_psd(const CMatrix& m, double tolerance);

double min_eigenvalue(const CMatrix& m);

// Natural-log entropies, in nats. Both throw NotAState unless every argument
// is PSD with unit trace within tol::kState.
double von_neumann_entropy(const CMatrix& rho);
// Returns +infinity when supp(ρ) ⊄ supp(τ).
double relative_entropy(const CMatrix& rho, const CMatrix& tau);

// -- helpers shared by the other modules --

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix identity(int dim);
double hermiticity_defect(const CMatrix& m);
bool all_finite(const CMatrix& m);
CMatrix hermitian_part(const CMatrix& m);

// PSD and unit trace within tolerance (Hermiticity within tol::kHermitian).
bool is_density_matrix(const CMatrix& m, double tolerance = tol::kState);

// A^{-1/2} for Hermitian positive-definite A. Throws NumericalFailure when
// the smallest eigenvalue is below `floor`·λ_max.
CMatrix inverse_sqrt_pd(const CMatrix& a, double floor = 1e-12);

// √A for PSD A (negative eigenvalues clipped to zero).
CMatrix sqrt_psd(const CMatrix& a);

// Basis ket |k⟩⟨l| of dimension `dim`.
CMatrix matrix_unit(int dim, int row, int col);

}  // namespace hybridiq
