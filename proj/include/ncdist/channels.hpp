#pragma once

// Classicality-preserving channels: affine optics (passive linear optics plus displacements),
// number-basis dephasing, and adjoining a classical ancilla.

#include "ncdist/fock.hpp"
#include "ncdist/states.hpp"

namespace ncdist {

/// b = U a + gamma. Sends |alpha> to |U alpha + gamma>.
struct AffineOptics {
  ComplexMatrix U;
  std::vector<Complex> gamma;

  AffineOptics(ComplexMatrix U, std::vector<Complex> gamma);
  static AffineOptics identity(int modes);
  static AffineOptics passive(ComplexMatrix U);

  int modes() const noexcept { return static_cast<int>(gamma.size()); }
  CoherentPoint map(const CoherentPoint& alpha) const;
};

struct AffineResult {
  DensityMatrix state;
  /// Probability lost from the truncated space by the passive and displacement stages together.
  double leakage = 0.0;
  double unitarity_defect = 0.0;
};

/// V rho V^dagger with V = D(gamma) P(U). Throws TruncationTooSmall if more than 10 tail_tol of the trace leaks.
AffineResult apply_affine_detailed(const AffineOptics& T, const DensityMatrix& rho);
DensityMatrix apply_affine(const AffineOptics& T, const DensityMatrix& rho);
/// Pure-state path; agrees with apply_affine on outer(psi).
FockVector apply_affine(const AffineOptics& T, const FockVector& psi);

/// Keeps the multi-index diagonal only (ideal photon counting in every mode, or independent random phase shifts).
DensityMatrix dephase_number(const DensityMatrix& rho);

/// rho tensor realize(sigma); sigma is realized over `sigma_trunc`.
DensityMatrix adjoin(const DensityMatrix& rho, const ClassicalEnsemble& sigma, const TruncationSpec& sigma_trunc);
/// Same, with sigma realized at cutoffs sufficient for rho's tail tolerance.
DensityMatrix adjoin(const DensityMatrix& rho, const ClassicalEnsemble& sigma);

/// The image of a classical ensemble under the affine map, when it stays inside the supported family.
/// A component alpha_fixed + sum_g e^{i theta_g} alpha_g maps to (U alpha_fixed + gamma) + sum_g e^{i theta_g} U alpha_g,
/// which is again a component when the output supports of these pieces are disjoint. Coherent points always
/// map; otherwise throws InvalidArgument.
ClassicalEnsemble map_ensemble(const AffineOptics& T, const ClassicalEnsemble& sigma);
/// Image under dephase_number: every mode's phase randomized independently.
ClassicalEnsemble dephase_ensemble(const ClassicalEnsemble& sigma);

/// Per-mode cutoffs at which every component's coherent tail fits within tail_tol.
std::vector<int> sufficient_cutoffs(const ClassicalEnsemble& sigma, double tail_tol);

}  // namespace ncdist
