#pragma once

// Seeded random states and unitaries for property suites.

#include <random>

#include "ncdist/fock.hpp"

namespace ncdist {

using Rng = std::mt19937_64;

/// Haar-random pure state on the first `support` basis states of `trunc` (all of it when support <= 0).
FockVector random_pure(const TruncationSpec& trunc, Rng& rng, int support = 0);
/// Ginibre-induced density matrix of the given rank on the first `support` basis states.
DensityMatrix random_density(const TruncationSpec& trunc, int rank, Rng& rng, int support = 0);
/// Haar-random M x M unitary (QR of a complex Ginibre matrix with phase correction).
ComplexMatrix random_unitary(int modes, Rng& rng);
/// Unit vector with Gaussian complex entries.
std::vector<Complex> random_coefficients(int modes, Rng& rng);

}  // namespace ncdist
