#pragma once

// Block structure of sparse Hermitian matrices. Two basis indices share a block when a chain of
// nonzero entries connects them, so every spectral quantity factorizes over blocks.

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ncdist {

struct BlockPartition {
  std::vector<std::vector<Eigen::Index>> blocks;
  /// Block id of each basis index, -1 when no listed matrix touches the index.
  std::vector<int> block_of;
  /// Position of each basis index inside its block.
  std::vector<Eigen::Index> position;
};

/// Joint block partition of the nonzero patterns of all matrices (all must be square, same size).
BlockPartition partition_blocks(const std::vector<const Eigen::SparseMatrix<std::complex<double>>*>& mats);

/// Dense copies of the requested blocks of `mat` (blocks not requested stay empty 0x0 matrices).
std::vector<Eigen::MatrixXcd> dense_blocks(const Eigen::SparseMatrix<std::complex<double>>& mat, const BlockPartition& part,
                                           const std::vector<bool>& wanted);

/// min(0, smallest eigenvalue) of a sparse Hermitian matrix.
double min_eigenvalue(const Eigen::SparseMatrix<std::complex<double>>& mat);

}  // namespace ncdist

namespace ncdist {

struct LpSolution {
  Eigen::VectorXd x;
  /// Duals of the equality rows: c_B^T B^{-1}.
  Eigen::VectorXd y;
  double objective = 0.0;
  std::vector<Eigen::Index> basis;
  int iterations = 0;
};

/// min c^T x subject to A x = b, x >= 0, by the revised simplex method with Bland's rule, started from
/// the feasible basis `basis` (one column per row). Throws NumericalError if the start is infeasible,
/// the problem is unbounded, or the iteration cap is hit.
LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c, std::vector<Eigen::Index> basis,
                    int max_iterations = 100000);

}  // namespace ncdist
