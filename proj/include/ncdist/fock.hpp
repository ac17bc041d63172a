#pragma once

// Truncated multimode Fock space: cutoffs, pure amplitude tensors, sparse density matrices and the
// operators (passive linear optics, displacements) that act on them.
//
// Basis layout: a multi-index (n_1, ..., n_M) is flattened row-major with mode 1 slowest, i.e.
// flat = sum_m n_m * stride_m with stride_M = 1 and stride_m = stride_{m+1} * (N_{m+1} + 1).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ncdist/errors.hpp"

namespace ncdist {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double kDefaultTailTol = 1e-12;
inline constexpr double kDefaultHermTol = 1e-10;
inline constexpr std::size_t kDefaultDimensionCap = 4'000'000;

class TruncationSpec {
 public:
  explicit TruncationSpec(std::vector<int> cutoffs, double tail_tol = kDefaultTailTol,
                          std::size_t dimension_cap = kDefaultDimensionCap);

  static TruncationSpec uniform(int modes, int cutoff, double tail_tol = kDefaultTailTol);

  int modes() const noexcept { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
  const std::vector<int>& cutoffs() const noexcept { return cutoffs_; }
  double tail_tol() const noexcept { return tail_tol_; }
  std::size_t dimension_cap() const noexcept { return dimension_cap_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t stride(int mode) const { return strides_.at(static_cast<std::size_t>(mode)); }

  std::size_t index(std::span<const int> occupation) const;
  void decode(std::size_t flat, std::span<int> occupation) const;
  std::vector<int> multi_index(std::size_t flat) const;
  int occupation(std::size_t flat, int mode) const {
    return static_cast<int>((flat / strides_[static_cast<std::size_t>(mode)]) %
                            static_cast<std::size_t>(cutoffs_[static_cast<std::size_t>(mode)] + 1));
  }
  int total_photons(std::size_t flat) const;

  /// Truncation of the product space (this modes first, then `other`'s). Uses the smaller tail_tol.
  TruncationSpec tensor(const TruncationSpec& other) const;
  /// Truncation restricted to the listed modes, in the listed order.
  TruncationSpec select(std::span<const int> modes) const;
  TruncationSpec with_tail_tol(double tail_tol) const;

  bool same_shape(const TruncationSpec& other) const noexcept { return cutoffs_ == other.cutoffs_; }
  friend bool operator==(const TruncationSpec& a, const TruncationSpec& b) noexcept {
    return a.cutoffs_ == b.cutoffs_ && a.tail_tol_ == b.tail_tol_;
  }

 private:
  std::vector<int> cutoffs_;
  std::vector<std::size_t> strides_;
  double tail_tol_;
  std::size_t dimension_cap_;
  std::size_t dimension_ = 1;
};

/// Coherent amplitude vector, one complex number per mode.
struct CoherentPoint {
  std::vector<Complex> alpha;

  int modes() const noexcept { return static_cast<int>(alpha.size()); }
  double norm_squared() const noexcept;
  static CoherentPoint vacuum(int modes) { return {std::vector<Complex>(static_cast<std::size_t>(modes))}; }
};

class FockVector {
 public:
  FockVector(TruncationSpec trunc, ComplexVector amps);

  const TruncationSpec& trunc() const noexcept { return trunc_; }
  const ComplexVector& amps() const noexcept { return amps_; }
  Complex amp(std::span<const int> occupation) const { return amps_[static_cast<Eigen::Index>(trunc_.index(occupation))]; }
  /// |1 - sum |amps|^2|.
  double norm_defect() const noexcept { return norm_defect_; }
  double norm() const { return amps_.norm(); }

 private:
  TruncationSpec trunc_;
  ComplexVector amps_;
  double norm_defect_;
};

/// Hermitian, positive semidefinite, (nearly) unit-trace operator over the truncated product basis.
/// Stored sparse; the stored matrix is the Hermitian part (A + A^dagger)/2 of the validated input.
class DensityMatrix {
 public:
  DensityMatrix(TruncationSpec trunc, const SparseMatrix& mat, double herm_tol = kDefaultHermTol);

  static DensityMatrix from_dense(TruncationSpec trunc, const ComplexMatrix& mat, double herm_tol = kDefaultHermTol);
  static DensityMatrix diagonal(TruncationSpec trunc, std::span<const double> diag);

  const TruncationSpec& trunc() const noexcept { return trunc_; }
  const SparseMatrix& matrix() const noexcept { return mat_; }
  double herm_tol() const noexcept { return herm_tol_; }
  std::size_t dimension() const noexcept { return trunc_.dimension(); }
  double trace() const;
  Complex entry(std::size_t row, std::size_t col) const;
  ComplexMatrix to_dense() const;
  bool is_number_diagonal() const;
  /// Mean total photon number Tr(rho N).
  double mean_photons() const;
  /// Tr(rho a_m) for every mode.
  std::vector<Complex> mean_amplitudes() const;
  /// Throws NumericalError if some eigenvalue is below -herm_tol (block-wise eigen decomposition).
  void check_positive() const;

 private:
  TruncationSpec trunc_;
  SparseMatrix mat_;
  double herm_tol_;
};

/// An operator on the truncated space together with how faithfully it represents the ideal one.
struct TruncatedOperator {
  TruncationSpec trunc;
  SparseMatrix matrix;
  /// max |O^dagger O - I| entry.
  double unitarity_defect = 0.0;
  /// Probability that leaves the truncated space when acting on the states the operator was certified for.
  double leakage = 0.0;
};

// Single-mode helpers.

/// <n|alpha> for n = 0..cutoff.
std::vector<Complex> coherent_table(Complex alpha, int cutoff);
/// P(X > cutoff) for X ~ Poisson(mean).
double poisson_tail(double mean, int cutoff);
/// Smallest cutoff with poisson_tail(mean, cutoff) <= tol.
int poisson_sufficient_cutoff(double mean, double tol);
/// Default per-mode cutoff for a component of amplitude |a|: ceil(a^2 + 8a + 20).
int default_cutoff(double amplitude);

FockVector coherent_amps(const CoherentPoint& alpha, const TruncationSpec& trunc);
Complex overlap(const FockVector& psi, const FockVector& phi);
DensityMatrix outer(const FockVector& psi);

FockVector tensor(const FockVector& a, const FockVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// Amplitude-space 50:50-style beam splitter matrix. The operator built from it sends
/// |alpha_1, alpha_2> to |sqrt(eta) alpha_1 - sqrt(1-eta) alpha_2, sqrt(1-eta) alpha_1 + sqrt(eta) alpha_2>,
/// i.e. in the Heisenberg form V a V^dagger: b_1 = sqrt(eta) a_1 + sqrt(1-eta) a_2,
/// b_2 = -sqrt(1-eta) a_1 + sqrt(eta) a_2.
ComplexMatrix beam_splitter(double eta);

/// Operator V with V|alpha> = |U alpha>, assembled per total-photon-number block from images of
/// creation-operator monomials. Blocks with total photon number above the smallest cutoff are not
/// closed under V; there the operator is the compression and `leakage` records the worst lost norm.
TruncatedOperator passive_unitary(const ComplexMatrix& U, const TruncationSpec& trunc);

/// Displacement operator D(gamma), exponentiated per mode at an enlarged cutoff
/// N + ceil(4|gamma| sqrt(N)) + 10 and cropped. `leakage` is |D(gamma)|0> - coherent_amps(gamma)|.
TruncatedOperator displacement(std::span<const Complex> gamma, const TruncationSpec& trunc);

FockVector apply(const TruncatedOperator& op, const FockVector& psi);
/// O rho O^dagger. The result is not renormalized.
DensityMatrix conjugate(const TruncatedOperator& op, const DensityMatrix& rho);

/// Unitary check used by the operator builders.
double unitarity_defect(const ComplexMatrix& U);

}  // namespace ncdist
