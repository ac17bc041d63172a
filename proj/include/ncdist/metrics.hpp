#pragma once

// Distance and fidelity kernels on truncated density matrices. All kernels factorize over the joint
// block structure of their arguments, so large but sparse states (number-diagonal classical states,
// states with few nonzero amplitudes) stay cheap.

#include "ncdist/fock.hpp"

namespace ncdist {

struct SpectralDecomp {
  Eigen::VectorXd eigenvalues;  // descending
  ComplexMatrix eigenvectors;   // columns, matching eigenvalues
  double residual = 0.0;        // max |V diag(lambda) V^dagger - A|
};

/// Eigen decomposition of (A + A^dagger)/2 in descending order. Throws NumericalError if A is not
/// Hermitian within `herm_tol` or the reconstruction residual exceeds 1e-9 * dimension.
SpectralDecomp spectral_decomposition(const ComplexMatrix& A, double herm_tol = kDefaultHermTol);

/// D(rho, sigma) = 1/2 ||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)), evaluated as the nuclear norm of sqrt(rho) sqrt(sigma).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct FuchsVdgChain {
  double lower;     // 1 - F
  double distance;  // D
  double upper;     // sqrt(1 - F^2)
};

/// Returns (1 - F, D, sqrt(1 - F^2)) and throws NumericalError unless 1 - F <= D <= sqrt(1 - F^2) within 1e-9.
FuchsVdgChain fuchs_vdg_check(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Kolmogorov distance of the outcome distributions of the two-outcome measurement {P+, 1 - P+},
/// P+ the projector onto the nonnegative eigenspace of rho - sigma.
double helstrom_saturation(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Kolmogorov distance of the outcome distributions of a projective measurement onto the columns of
/// `basis` (orthonormal, dimension x dimension).
double kolmogorov_distance(const DensityMatrix& rho, const DensityMatrix& sigma, const ComplexMatrix& basis);

}  // namespace ncdist
