#include "ncdist/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "ncdist/linalg.hpp"

namespace ncdist {

namespace {

std::string describe_cutoffs(const std::vector<int>& cutoffs) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < cutoffs.size(); ++i) out << (i ? "," : "") << cutoffs[i];
  out << ']';
  return out.str();
}

void require_same_shape(const TruncationSpec& a, const TruncationSpec& b, const char* what) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(what) + ": truncation mismatch " + describe_cutoffs(a.cutoffs()) + " vs " +
                          describe_cutoffs(b.cutoffs()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// TruncationSpec

TruncationSpec::TruncationSpec(std::vector<int> cutoffs, double tail_tol, std::size_t dimension_cap)
    : cutoffs_(std::move(cutoffs)), tail_tol_(tail_tol), dimension_cap_(dimension_cap) {
  if (cutoffs_.empty()) throw InvalidArgument("TruncationSpec: at least one mode is required");
  if (!(tail_tol_ >= 0.0 && tail_tol_ < 1.0)) throw InvalidArgument("TruncationSpec: tail_tol must lie in [0, 1)");
  for (int n : cutoffs_) {
    if (n < 1) throw InvalidArgument("TruncationSpec: every cutoff must be >= 1");
  }
  strides_.assign(cutoffs_.size(), 1);
  dimension_ = 1;
  for (std::size_t m = cutoffs_.size(); m-- > 0;) {
    strides_[m] = dimension_;
    const auto local = static_cast<std::size_t>(cutoffs_[m]) + 1;
    if (dimension_ > dimension_cap_ / local) {
      throw InvalidArgument("TruncationSpec: dimension of " + describe_cutoffs(cutoffs_) + " exceeds the cap of " +
                            std::to_string(dimension_cap_));
    }
    dimension_ *= local;
  }
}

TruncationSpec TruncationSpec::uniform(int modes, int cutoff, double tail_tol) {
  if (modes < 1) throw InvalidArgument("TruncationSpec: at least one mode is required");
  return TruncationSpec(std::vector<int>(static_cast<std::size_t>(modes), cutoff), tail_tol);
}

std::size_t TruncationSpec::index(std::span<const int> occupation) const {
  if (occupation.size() != cutoffs_.size()) throw InvalidArgument("TruncationSpec::index: wrong number of modes");
  std::size_t flat = 0;
  for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
    if (occupation[m] < 0 || occupation[m] > cutoffs_[m]) {
      throw InvalidArgument("TruncationSpec::index: occupation " + std::to_string(occupation[m]) + " of mode " +
                            std::to_string(m) + " exceeds cutoff " + std::to_string(cutoffs_[m]));
    }
    flat += static_cast<std::size_t>(occupation[m]) * strides_[m];
  }
  return flat;
}

void TruncationSpec::decode(std::size_t flat, std::span<int> occupation) const {
  for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
    occupation[m] = static_cast<int>(flat / strides_[m]);
    flat %= strides_[m];
  }
}

std::vector<int> TruncationSpec::multi_index(std::size_t flat) const {
  std::vector<int> out(cutoffs_.size());
  decode(flat, out);
  return out;
}

int TruncationSpec::total_photons(std::size_t flat) const {
  int total = 0;
  for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
    total += static_cast<int>(flat / strides_[m]);
    flat %= strides_[m];
  }
  return total;
}

TruncationSpec TruncationSpec::tensor(const TruncationSpec& other) const {
  std::vector<int> joined = cutoffs_;
  joined.insert(joined.end(), other.cutoffs_.begin(), other.cutoffs_.end());
  return TruncationSpec(std::move(joined), std::min(tail_tol_, other.tail_tol_), std::max(dimension_cap_, other.dimension_cap_));
}

TruncationSpec TruncationSpec::select(std::span<const int> modes) const {
  std::vector<int> picked;
  for (int m : modes) {
    if (m < 0 || m >= this->modes()) throw InvalidArgument("TruncationSpec::select: invalid mode index " + std::to_string(m));
    picked.push_back(cutoffs_[static_cast<std::size_t>(m)]);
  }
  return TruncationSpec(std::move(picked), tail_tol_, dimension_cap_);
}

TruncationSpec TruncationSpec::with_tail_tol(double tail_tol) const {
  return TruncationSpec(cutoffs_, tail_tol, dimension_cap_);
}

double CoherentPoint::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& a : alpha) s += std::norm(a);
  return s;
}

// ---------------------------------------------------------------------------------------------
// FockVector / DensityMatrix

FockVector::FockVector(TruncationSpec trunc, ComplexVector amps) : trunc_(std::move(trunc)), amps_(std::move(amps)) {
  if (static_cast<std::size_t>(amps_.size()) != trunc_.dimension()) {
    throw InvalidArgument("FockVector: amplitude count does not match truncation dimension");
  }
  for (Eigen::Index i = 0; i < amps_.size(); ++i) {
    if (!std::isfinite(amps_[i].real()) || !std::isfinite(amps_[i].imag())) throw InvalidArgument("FockVector: non-finite amplitude");
  }
  norm_defect_ = std::abs(1.0 - amps_.squaredNorm());
}

DensityMatrix::DensityMatrix(TruncationSpec trunc, const SparseMatrix& mat, double herm_tol)
    : trunc_(std::move(trunc)), herm_tol_(herm_tol) {
  const auto dim = static_cast<Eigen::Index>(trunc_.dimension());
  if (mat.rows() != dim || mat.cols() != dim) throw InvalidArgument("DensityMatrix: matrix shape does not match truncation");
  const SparseMatrix adj = mat.adjoint();
  const SparseMatrix skew = mat - adj;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < skew.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(skew, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  if (worst > herm_tol_) throw NumericalError("DensityMatrix: not Hermitian (max |A - A^dagger| = " + std::to_string(worst) + ")");
  mat_ = (mat + adj) * 0.5;
  mat_.prune(Complex(0.0, 0.0));
  mat_.makeCompressed();
  const double tr = trace();
  const double slack = 10.0 * trunc_.tail_tol() + 1e-10;
  if (std::abs(tr - 1.0) > slack) {
    throw NumericalError("DensityMatrix: trace " + std::to_string(tr) + " differs from 1 by more than " + std::to_string(slack));
  }
}

DensityMatrix DensityMatrix::from_dense(TruncationSpec trunc, const ComplexMatrix& mat, double herm_tol) {
  SparseMatrix sparse = mat.sparseView(Complex(0.0, 0.0), 0.0);
  return DensityMatrix(std::move(trunc), sparse, herm_tol);
}

DensityMatrix DensityMatrix::diagonal(TruncationSpec trunc, std::span<const double> diag) {
  if (diag.size() != trunc.dimension()) throw InvalidArgument("DensityMatrix::diagonal: length does not match truncation");
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag[i] < 0.0) throw NumericalError("DensityMatrix::diagonal: negative population");
    if (diag[i] != 0.0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag[i]);
  }
  const auto dim = static_cast<Eigen::Index>(trunc.dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return DensityMatrix(std::move(trunc), m);
}

double DensityMatrix::trace() const {
  double tr = 0.0;
  for (Eigen::Index k = 0; k < mat_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mat_, k); it; ++it) {
      if (it.row() == it.col()) tr += it.value().real();
    }
  }
  return tr;
}

Complex DensityMatrix::entry(std::size_t row, std::size_t col) const {
  return mat_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

ComplexMatrix DensityMatrix::to_dense() const { return ComplexMatrix(mat_); }

bool DensityMatrix::is_number_diagonal() const {
  for (Eigen::Index k = 0; k < mat_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mat_, k); it; ++it) {
      if (it.row() != it.col() && std::abs(it.value()) > herm_tol_) return false;
    }
  }
  return true;
}

double DensityMatrix::mean_photons() const {
  double n = 0.0;
  for (Eigen::Index k = 0; k < mat_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mat_, k); it; ++it) {
      if (it.row() == it.col()) n += it.value().real() * trunc_.total_photons(static_cast<std::size_t>(it.row()));
    }
  }
  return n;
}

std::vector<Complex> DensityMatrix::mean_amplitudes() const {
  // Tr(rho a_m) = sum_n sqrt(n_m) rho_{n - e_m, n}.
  const int modes = trunc_.modes();
  std::vector<Complex> out(static_cast<std::size_t>(modes));
  for (Eigen::Index k = 0; k < mat_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mat_, k); it; ++it) {
      const auto row = static_cast<std::size_t>(it.row());
      const auto col = static_cast<std::size_t>(it.col());
      if (col <= row) continue;
      for (int m = 0; m < modes; ++m) {
        const std::size_t s = trunc_.stride(m);
        if (col - row != s) continue;
        const int ncol = trunc_.occupation(col, m);
        if (ncol == 0 || trunc_.occupation(row, m) != ncol - 1) continue;
        // rho_{n, n - e_m} = conj(rho_{n - e_m, n}).
        out[static_cast<std::size_t>(m)] += std::sqrt(static_cast<double>(ncol)) * std::conj(it.value());
      }
    }
  }
  return out;
}

void DensityMatrix::check_positive() const {
  const double lowest = min_eigenvalue(mat_);
  if (lowest < -herm_tol_) throw NumericalError("DensityMatrix: eigenvalue " + std::to_string(lowest) + " below -h_tol");
}

// ---------------------------------------------------------------------------------------------
// Single-mode helpers

std::vector<Complex> coherent_table(Complex alpha, int cutoff) {
  std::vector<Complex> amps(static_cast<std::size_t>(cutoff) + 1);
  amps[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n) {
    amps[static_cast<std::size_t>(n)] = amps[static_cast<std::size_t>(n - 1)] * alpha / std::sqrt(static_cast<double>(n));
  }
  return amps;
}

double poisson_tail(double mean, int cutoff) {
  if (mean <= 0.0) return 0.0;
  // Sum the terms above the cutoff directly so that tiny tails keep full relative accuracy.
  double log_term = -mean + (cutoff + 1) * std::log(mean) - std::lgamma(cutoff + 2.0);
  double sum = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double term = std::exp(log_term);
    sum += term;
    if (n > mean && term <= 1e-18 * sum) break;
    if (n > cutoff + 100000) break;
    log_term += std::log(mean) - std::log(n + 1.0);
  }
  // For a small cutoff relative to the mean the direct sum is fine too, but clamp rounding.
  return std::min(sum, 1.0);
}

int poisson_sufficient_cutoff(double mean, double tol) {
  int n = std::max(1, static_cast<int>(std::ceil(mean)));
  while (poisson_tail(mean, n) > tol) ++n;
  return n;
}

int default_cutoff(double amplitude) {
  const double a = std::abs(amplitude);
  return static_cast<int>(std::ceil(a * a + 8.0 * a + 20.0));
}

FockVector coherent_amps(const CoherentPoint& alpha, const TruncationSpec& trunc) {
  if (alpha.modes() != trunc.modes()) throw InvalidArgument("coherent_amps: mode count mismatch");
  double kept = 1.0;
  std::vector<int> sufficient(static_cast<std::size_t>(trunc.modes()));
  std::vector<std::vector<Complex>> tables;
  for (int m = 0; m < trunc.modes(); ++m) {
    const Complex a = alpha.alpha[static_cast<std::size_t>(m)];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw InvalidArgument("coherent_amps: non-finite amplitude");
    const double tail = poisson_tail(std::norm(a), trunc.cutoff(m));
    kept *= 1.0 - tail;
    sufficient[static_cast<std::size_t>(m)] =
        std::max(trunc.cutoff(m), poisson_sufficient_cutoff(std::norm(a), trunc.tail_tol() / trunc.modes()));
    tables.push_back(coherent_table(a, trunc.cutoff(m)));
  }
  const double tail = 1.0 - kept;
  if (tail > trunc.tail_tol()) {
    throw TruncationTooSmall("coherent_amps: Poisson tail " + std::to_string(tail) + " exceeds tail_tol; sufficient cutoffs " +
                                 describe_cutoffs(sufficient),
                             sufficient);
  }
  ComplexVector amps(static_cast<Eigen::Index>(trunc.dimension()));
  std::vector<int> occ(static_cast<std::size_t>(trunc.modes()));
  for (std::size_t i = 0; i < trunc.dimension(); ++i) {
    trunc.decode(i, occ);
    Complex v(1.0, 0.0);
    for (std::size_t m = 0; m < occ.size(); ++m) v *= tables[m][static_cast<std::size_t>(occ[m])];
    amps[static_cast<Eigen::Index>(i)] = v;
  }
  return FockVector(trunc, std::move(amps));
}

Complex overlap(const FockVector& psi, const FockVector& phi) {
  require_same_shape(psi.trunc(), phi.trunc(), "overlap");
  return psi.amps().dot(phi.amps());
}

DensityMatrix outer(const FockVector& psi) {
  std::vector<Eigen::Index> support;
  const auto& a = psi.amps();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != Complex(0.0, 0.0)) support.push_back(i);
  }
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(support.size() * support.size());
  for (Eigen::Index j : support) {
    for (Eigen::Index i : support) triplets.emplace_back(i, j, a[i] * std::conj(a[j]));
  }
  const auto dim = static_cast<Eigen::Index>(psi.trunc().dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return DensityMatrix(psi.trunc(), m);
}

FockVector tensor(const FockVector& a, const FockVector& b) {
  TruncationSpec joined = a.trunc().tensor(b.trunc());
  ComplexVector amps(static_cast<Eigen::Index>(joined.dimension()));
  const Eigen::Index nb = b.amps().size();
  for (Eigen::Index i = 0; i < a.amps().size(); ++i) amps.segment(i * nb, nb) = a.amps()[i] * b.amps();
  return FockVector(std::move(joined), std::move(amps));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  TruncationSpec joined = a.trunc().tensor(b.trunc());
  const auto nb = static_cast<Eigen::Index>(b.dimension());
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.matrix().nonZeros() * b.matrix().nonZeros()));
  for (Eigen::Index ka = 0; ka < a.matrix().outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(a.matrix(), ka); ia; ++ia) {
      for (Eigen::Index kb = 0; kb < b.matrix().outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(b.matrix(), kb); ib; ++ib) {
          triplets.emplace_back(ia.row() * nb + ib.row(), ia.col() * nb + ib.col(), ia.value() * ib.value());
        }
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(joined.dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return DensityMatrix(std::move(joined), m, std::max(a.herm_tol(), b.herm_tol()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const TruncationSpec& trunc = rho.trunc();
  std::vector<bool> kept(static_cast<std::size_t>(trunc.modes()), false);
  for (int m : keep) {
    if (m < 0 || m >= trunc.modes()) throw InvalidArgument("partial_trace: invalid mode index " + std::to_string(m));
    if (kept[static_cast<std::size_t>(m)]) throw InvalidArgument("partial_trace: duplicate mode index " + std::to_string(m));
    kept[static_cast<std::size_t>(m)] = true;
  }
  if (keep.empty()) throw InvalidArgument("partial_trace: at least one mode must be kept");
  TruncationSpec reduced = trunc.select(keep);
  std::vector<int> row_occ(static_cast<std::size_t>(trunc.modes()));
  std::vector<int> col_occ(row_occ.size());
  std::vector<int> sub(keep.size());
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (Eigen::Index k = 0; k < rho.matrix().outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(rho.matrix(), k); it; ++it) {
      trunc.decode(static_cast<std::size_t>(it.row()), row_occ);
      trunc.decode(static_cast<std::size_t>(it.col()), col_occ);
      bool traced_equal = true;
      for (std::size_t m = 0; m < row_occ.size(); ++m) {
        if (!kept[m] && row_occ[m] != col_occ[m]) {
          traced_equal = false;
          break;
        }
      }
      if (!traced_equal) continue;
      for (std::size_t i = 0; i < keep.size(); ++i) sub[i] = row_occ[static_cast<std::size_t>(keep[i])];
      const auto r = static_cast<Eigen::Index>(reduced.index(sub));
      for (std::size_t i = 0; i < keep.size(); ++i) sub[i] = col_occ[static_cast<std::size_t>(keep[i])];
      const auto c = static_cast<Eigen::Index>(reduced.index(sub));
      triplets.emplace_back(r, c, it.value());
    }
  }
  const auto dim = static_cast<Eigen::Index>(reduced.dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return DensityMatrix(std::move(reduced), m, rho.herm_tol());
}

// ---------------------------------------------------------------------------------------------
// Operators

double unitarity_defect(const ComplexMatrix& U) {
  if (U.rows() != U.cols()) return std::numeric_limits<double>::infinity();
  const ComplexMatrix gram = U.adjoint() * U - ComplexMatrix::Identity(U.rows(), U.cols());
  return gram.cwiseAbs().maxCoeff();
}

ComplexMatrix beam_splitter(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("beam_splitter: transmissivity must lie in [0, 1]");
  const double t = std::sqrt(eta);
  const double r = std::sqrt(1.0 - eta);
  ComplexMatrix U(2, 2);
  U << t, -r, r, t;
  return U;
}

TruncatedOperator passive_unitary(const ComplexMatrix& U, const TruncationSpec& trunc) {
  const int modes = trunc.modes();
  if (U.rows() != modes || U.cols() != modes) throw InvalidArgument("passive_unitary: U must be M x M");
  if (unitarity_defect(U) > 1e-12) throw InvalidArgument("passive_unitary: U is not unitary within 1e-12");

  // Images are built in an untruncated per-block basis: a multi-index with total photon number N is
  // keyed by its flat index in the (N+1)^M box, then mapped into the truncated space if it fits.
  const auto dim = static_cast<Eigen::Index>(trunc.dimension());
  std::vector<Eigen::Triplet<Complex>> triplets;
  std::vector<int> occ(static_cast<std::size_t>(modes));
  std::vector<int> key_occ(static_cast<std::size_t>(modes));
  double leakage = 0.0;

  for (std::size_t col = 0; col < trunc.dimension(); ++col) {
    trunc.decode(col, occ);
    int total = 0;
    for (int n : occ) total += n;
    const std::size_t base = static_cast<std::size_t>(total) + 1;
    auto encode = [&](const std::vector<int>& o) {
      std::size_t key = 0;
      for (int n : o) key = key * base + static_cast<std::size_t>(n);
      return key;
    };
    auto decode_key = [&](std::size_t key, std::vector<int>& o) {
      for (std::size_t m = o.size(); m-- > 0;) {
        o[m] = static_cast<int>(key % base);
        key /= base;
      }
    };
    // Normalized state after applying the creation monomial step by step.
    std::unordered_map<std::size_t, Complex> state{{0, Complex(1.0, 0.0)}};
    for (int j = 0; j < modes; ++j) {
      for (int rep = 1; rep <= occ[static_cast<std::size_t>(j)]; ++rep) {
        std::unordered_map<std::size_t, Complex> next;
        next.reserve(state.size() * static_cast<std::size_t>(modes));
        const double norm = 1.0 / std::sqrt(static_cast<double>(rep));
        for (const auto& [key, amp] : state) {
          decode_key(key, key_occ);
          for (int k = 0; k < modes; ++k) {
            const Complex u = U(k, j);
            if (u == Complex(0.0, 0.0)) continue;
            const double boson = std::sqrt(static_cast<double>(key_occ[static_cast<std::size_t>(k)] + 1));
            key_occ[static_cast<std::size_t>(k)] += 1;
            next[encode(key_occ)] += amp * u * boson * norm;
            key_occ[static_cast<std::size_t>(k)] -= 1;
          }
        }
        state = std::move(next);
      }
    }
    double lost = 0.0;
    for (const auto& [key, amp] : state) {
      decode_key(key, key_occ);
      bool fits = true;
      for (int m = 0; m < modes; ++m) fits = fits && key_occ[static_cast<std::size_t>(m)] <= trunc.cutoff(m);
      if (!fits) {
        lost += std::norm(amp);
        continue;
      }
      if (std::abs(amp) == 0.0) continue;
      triplets.emplace_back(static_cast<Eigen::Index>(trunc.index(key_occ)), static_cast<Eigen::Index>(col), amp);
    }
    leakage = std::max(leakage, lost);
  }
  SparseMatrix op(dim, dim);
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.makeCompressed();

  TruncatedOperator out{trunc, op, 0.0, leakage};
  // Unitarity is only meaningful on complete blocks (total photon number <= smallest cutoff).
  const int complete = *std::min_element(trunc.cutoffs().begin(), trunc.cutoffs().end());
  std::vector<Eigen::Index> inside;
  for (std::size_t i = 0; i < trunc.dimension(); ++i) {
    if (trunc.total_photons(i) <= complete) inside.push_back(static_cast<Eigen::Index>(i));
  }
  ComplexMatrix block(static_cast<Eigen::Index>(inside.size()), static_cast<Eigen::Index>(inside.size()));
  for (std::size_t c = 0; c < inside.size(); ++c) {
    for (std::size_t r = 0; r < inside.size(); ++r) block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = op.coeff(inside[r], inside[c]);
  }
  out.unitarity_defect = unitarity_defect(block);
  return out;
}

namespace {

ComplexMatrix single_mode_displacement(Complex gamma, int cutoff) {
  if (gamma == Complex(0.0, 0.0)) return ComplexMatrix::Identity(cutoff + 1, cutoff + 1);
  const int big = cutoff + static_cast<int>(std::ceil(4.0 * std::abs(gamma) * std::sqrt(static_cast<double>(cutoff)))) + 10;
  // D = exp(gamma a^dagger - gamma^* a) = exp(-i H) with Hermitian H = i (gamma a^dagger - gamma^* a).
  ComplexMatrix H = ComplexMatrix::Zero(big + 1, big + 1);
  const Complex i_unit(0.0, 1.0);
  for (int n = 0; n < big; ++n) {
    const double s = std::sqrt(static_cast<double>(n + 1));
    H(n + 1, n) = i_unit * gamma * s;
    H(n, n + 1) = -i_unit * std::conj(gamma) * s;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(H);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  ComplexVector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) phases[k] = std::exp(-i_unit * lambda[k]);
  const ComplexMatrix& V = eig.eigenvectors();
  const ComplexMatrix top = V.topRows(cutoff + 1);
  return top * phases.asDiagonal() * top.adjoint();
}

SparseMatrix kron_dense(const std::vector<ComplexMatrix>& factors) {
  // Kronecker product in mode order (mode 1 slowest).
  SparseMatrix acc(1, 1);
  acc.insert(0, 0) = Complex(1.0, 0.0);
  for (const auto& f : factors) {
    std::vector<Eigen::Triplet<Complex>> triplets;
    const Eigen::Index nf = f.rows();
    for (Eigen::Index k = 0; k < acc.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(acc, k); it; ++it) {
        for (Eigen::Index c = 0; c < nf; ++c) {
          for (Eigen::Index r = 0; r < nf; ++r) {
            const Complex v = it.value() * f(r, c);
            if (std::abs(v) > 1e-300) triplets.emplace_back(it.row() * nf + r, it.col() * nf + c, v);
          }
        }
      }
    }
    SparseMatrix next(acc.rows() * nf, acc.cols() * nf);
    next.setFromTriplets(triplets.begin(), triplets.end());
    acc = std::move(next);
  }
  acc.makeCompressed();
  return acc;
}

}  // namespace

TruncatedOperator displacement(std::span<const Complex> gamma, const TruncationSpec& trunc) {
  if (static_cast<int>(gamma.size()) != trunc.modes()) throw InvalidArgument("displacement: mode count mismatch");
  std::vector<ComplexMatrix> factors;
  double leakage_sq = 0.0;
  double kept = 1.0;
  for (int m = 0; m < trunc.modes(); ++m) {
    const Complex g = gamma[static_cast<std::size_t>(m)];
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) throw InvalidArgument("displacement: non-finite gamma");
    factors.push_back(single_mode_displacement(g, trunc.cutoff(m)));
    const auto ideal = coherent_table(g, trunc.cutoff(m));
    const ComplexVector col = factors.back().col(0);
    double diff = 0.0;
    for (int n = 0; n <= trunc.cutoff(m); ++n) diff += std::norm(col[n] - ideal[static_cast<std::size_t>(n)]);
    leakage_sq += diff;
    kept *= 1.0 - poisson_tail(std::norm(g), trunc.cutoff(m));
  }
  const double leakage = std::sqrt(leakage_sq) + (1.0 - kept);
  if (leakage > 10.0 * trunc.tail_tol()) {
    std::vector<int> sufficient;
    for (int m = 0; m < trunc.modes(); ++m) {
      sufficient.push_back(std::max(trunc.cutoff(m), poisson_sufficient_cutoff(std::norm(gamma[static_cast<std::size_t>(m)]),
                                                                                  trunc.tail_tol() / trunc.modes())));
    }
    throw TruncationTooSmall("displacement: leakage " + std::to_string(leakage) + " exceeds 10*tail_tol", sufficient);
  }
  TruncatedOperator out{trunc, kron_dense(factors), 0.0, leakage};
  double defect = 0.0;
  for (const auto& f : factors) defect = std::max(defect, unitarity_defect(f));
  out.unitarity_defect = defect;
  return out;
}

FockVector apply(const TruncatedOperator& op, const FockVector& psi) {
  require_same_shape(op.trunc, psi.trunc(), "apply");
  ComplexVector out = op.matrix * psi.amps();
  return FockVector(psi.trunc(), std::move(out));
}

DensityMatrix conjugate(const TruncatedOperator& op, const DensityMatrix& rho) {
  require_same_shape(op.trunc, rho.trunc(), "conjugate");
  // Sparse products degrade badly once either factor is mostly filled; switch to dense GEMM there.
  const double dim = static_cast<double>(op.matrix.rows());
  const bool dense = static_cast<double>(op.matrix.nonZeros()) > dim * dim / 8.0 ||
                     static_cast<double>(rho.matrix().nonZeros()) > dim * dim / 8.0;
  SparseMatrix out;
  if (dense) {
    const ComplexMatrix o(op.matrix);
    const ComplexMatrix r(rho.matrix());
    const ComplexMatrix tmp = o * r;
    const ComplexMatrix full = tmp * o.adjoint();
    out = full.sparseView(Complex(0.0, 0.0), 0.0);
  } else {
    SparseMatrix tmp = op.matrix * rho.matrix();
    out = tmp * SparseMatrix(op.matrix.adjoint());
  }
  out.prune(Complex(0.0, 0.0));
  double tr = 0.0;
  for (Eigen::Index k = 0; k < out.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(out, k); it; ++it) {
      if (it.row() == it.col()) tr += it.value().real();
    }
  }
  const double lost = std::abs(rho.trace() - tr);
  if (lost > 10.0 * rho.trunc().tail_tol() + 1e-10) {
    throw TruncationTooSmall("conjugate: operator moves probability " + std::to_string(lost) + " out of the truncated space");
  }
  return DensityMatrix(rho.trunc(), out, rho.herm_tol());
}

}  // namespace ncdist
