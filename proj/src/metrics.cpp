#include "ncdist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncdist/linalg.hpp"

namespace ncdist {

namespace {

void require_compatible(const DensityMatrix& rho, const DensityMatrix& sigma, const char* what) {
  if (!rho.trunc().same_shape(sigma.trunc())) throw InvalidArgument(std::string(what) + ": truncation mismatch");
}

// Which matrix has entries in each block.
struct BlockOccupancy {
  std::vector<bool> in_rho;
  std::vector<bool> in_sigma;
  std::vector<double> trace_rho;
  std::vector<double> trace_sigma;
};

BlockOccupancy occupancy(const BlockPartition& part, const SparseMatrix& rho, const SparseMatrix& sigma) {
  const std::size_t nb = part.blocks.size();
  BlockOccupancy occ{std::vector<bool>(nb, false), std::vector<bool>(nb, false), std::vector<double>(nb, 0.0),
                     std::vector<double>(nb, 0.0)};
  auto scan = [&](const SparseMatrix& m, std::vector<bool>& flag, std::vector<double>& tr) {
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int b = part.block_of[static_cast<std::size_t>(it.row())];
        if (b < 0) continue;
        flag[static_cast<std::size_t>(b)] = true;
        if (it.row() == it.col()) tr[static_cast<std::size_t>(b)] += it.value().real();
      }
    }
  };
  scan(rho, occ.in_rho, occ.trace_rho);
  scan(sigma, occ.in_sigma, occ.trace_sigma);
  return occ;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& block) {
  if (block.rows() == 1) return Eigen::VectorXd::Constant(1, block(0, 0).real());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(block, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& block, double clip) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(block);
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda[k] < -clip) {
      throw NumericalError("fidelity: eigenvalue " + std::to_string(lambda[k]) + " is below the clipping threshold");
    }
    lambda[k] = std::sqrt(std::max(lambda[k], 0.0));
  }
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

SpectralDecomp spectral_decomposition(const ComplexMatrix& A, double herm_tol) {
  if (A.rows() != A.cols()) throw InvalidArgument("spectral_decomposition: matrix must be square");
  const double skew = A.rows() ? (A - A.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (skew > herm_tol) throw NumericalError("spectral_decomposition: matrix is not Hermitian");
  const ComplexMatrix H = (A + A.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(H);
  const Eigen::Index n = H.rows();
  SpectralDecomp out;
  out.eigenvalues = eig.eigenvalues().reverse();
  out.eigenvectors = eig.eigenvectors().rowwise().reverse();
  if (n > 0) {
    const ComplexMatrix rebuilt = out.eigenvectors * out.eigenvalues.asDiagonal() * out.eigenvectors.adjoint();
    out.residual = (rebuilt - H).cwiseAbs().maxCoeff();
  }
  if (out.residual > 1e-9 * static_cast<double>(std::max<Eigen::Index>(n, 1))) {
    throw NumericalError("spectral_decomposition: reconstruction residual too large");
  }
  return out;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_compatible(rho, sigma, "trace_distance");
  const SparseMatrix diff = rho.matrix() - sigma.matrix();
  const BlockPartition part = partition_blocks({&rho.matrix(), &sigma.matrix()});
  const BlockOccupancy occ = occupancy(part, rho.matrix(), sigma.matrix());
  std::vector<bool> needs_spectrum(part.blocks.size(), false);
  for (std::size_t b = 0; b < part.blocks.size(); ++b) needs_spectrum[b] = occ.in_rho[b] && occ.in_sigma[b];
  const auto blocks = dense_blocks(diff, part, needs_spectrum);

  double norm = 0.0;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    if (!needs_spectrum[b]) {
      // One side vanishes on this block; the other is positive semidefinite there.
      norm += occ.in_rho[b] ? occ.trace_rho[b] : occ.trace_sigma[b];
      continue;
    }
    norm += hermitian_eigenvalues(blocks[b]).cwiseAbs().sum();
  }
  return 0.5 * norm;
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_compatible(rho, sigma, "fidelity");
  const double clip = std::max({1e-10, rho.herm_tol(), sigma.herm_tol()});
  const BlockPartition part = partition_blocks({&rho.matrix(), &sigma.matrix()});
  const BlockOccupancy occ = occupancy(part, rho.matrix(), sigma.matrix());
  std::vector<bool> shared(part.blocks.size(), false);
  for (std::size_t b = 0; b < part.blocks.size(); ++b) shared[b] = occ.in_rho[b] && occ.in_sigma[b];
  const auto rho_blocks = dense_blocks(rho.matrix(), part, shared);
  const auto sigma_blocks = dense_blocks(sigma.matrix(), part, shared);

  double f = 0.0;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    if (!shared[b]) continue;
    if (rho_blocks[b].rows() == 1) {
      const double p = rho_blocks[b](0, 0).real();
      const double q = sigma_blocks[b](0, 0).real();
      if (p < -clip || q < -clip) throw NumericalError("fidelity: negative population below the clipping threshold");
      f += std::sqrt(std::max(p, 0.0) * std::max(q, 0.0));
      continue;
    }
    const ComplexMatrix product = psd_sqrt(rho_blocks[b], clip) * psd_sqrt(sigma_blocks[b], clip);
    Eigen::JacobiSVD<ComplexMatrix> svd(product);
    f += svd.singularValues().sum();
  }
  return f;
}

FuchsVdgChain fuchs_vdg_check(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const double F = fidelity(rho, sigma);
  const double D = trace_distance(rho, sigma);
  const FuchsVdgChain chain{1.0 - F, D, std::sqrt(std::max(0.0, 1.0 - F * F))};
  if (chain.lower > chain.distance + 1e-9 || chain.distance > chain.upper + 1e-9) {
    throw NumericalError("fuchs_vdg_check: 1 - F <= D <= sqrt(1 - F^2) violated (" + std::to_string(chain.lower) + ", " +
                         std::to_string(chain.distance) + ", " + std::to_string(chain.upper) + ")");
  }
  return chain;
}

double helstrom_saturation(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_compatible(rho, sigma, "helstrom_saturation");
  const SparseMatrix diff = rho.matrix() - sigma.matrix();
  const BlockPartition part = partition_blocks({&rho.matrix(), &sigma.matrix()});
  const BlockOccupancy occ = occupancy(part, rho.matrix(), sigma.matrix());
  std::vector<bool> shared(part.blocks.size(), false);
  for (std::size_t b = 0; b < part.blocks.size(); ++b) shared[b] = occ.in_rho[b] && occ.in_sigma[b];
  const auto diff_blocks = dense_blocks(diff, part, shared);
  const auto rho_blocks = dense_blocks(rho.matrix(), part, shared);
  const auto sigma_blocks = dense_blocks(sigma.matrix(), part, shared);

  // Outcome "+" probabilities under P+.
  double p_plus = 0.0;
  double q_plus = 0.0;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    if (!shared[b]) {
      // rho - sigma is +rho_B or -sigma_B here: P+ is the whole block or sees no sigma weight.
      if (occ.in_rho[b]) p_plus += occ.trace_rho[b];
      continue;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(diff_blocks[b]);
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
      if (eig.eigenvalues()[k] < 0.0) continue;
      const ComplexVector v = eig.eigenvectors().col(k);
      p_plus += v.dot(rho_blocks[b] * v).real();
      q_plus += v.dot(sigma_blocks[b] * v).real();
    }
  }
  const double p_minus = rho.trace() - p_plus;
  const double q_minus = sigma.trace() - q_plus;
  return 0.5 * (std::abs(p_plus - q_plus) + std::abs(p_minus - q_minus));
}

double kolmogorov_distance(const DensityMatrix& rho, const DensityMatrix& sigma, const ComplexMatrix& basis) {
  require_compatible(rho, sigma, "kolmogorov_distance");
  const auto dim = static_cast<Eigen::Index>(rho.dimension());
  if (basis.rows() != dim || basis.cols() != dim) throw InvalidArgument("kolmogorov_distance: basis must be dimension x dimension");
  const ComplexMatrix rb = rho.matrix() * basis;
  const ComplexMatrix sb = sigma.matrix() * basis;
  double total = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double p = basis.col(k).dot(rb.col(k)).real();
    const double q = basis.col(k).dot(sb.col(k)).real();
    total += std::abs(p - q);
  }
  return 0.5 * total;
}

}  // namespace ncdist
