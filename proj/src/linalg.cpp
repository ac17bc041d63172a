#include "ncdist/linalg.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ncdist/errors.hpp"

namespace ncdist {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

BlockPartition partition_blocks(const std::vector<const Eigen::SparseMatrix<std::complex<double>>*>& mats) {
  BlockPartition part;
  if (mats.empty()) return part;
  const auto n = static_cast<std::size_t>(mats.front()->rows());
  DisjointSets sets(n);
  std::vector<bool> touched(n, false);
  for (const auto* m : mats) {
    for (Eigen::Index k = 0; k < m->outerSize(); ++k) {
      for (Eigen::SparseMatrix<std::complex<double>>::InnerIterator it(*m, k); it; ++it) {
        if (it.value() == std::complex<double>(0.0, 0.0)) continue;
        const auto r = static_cast<std::size_t>(it.row());
        const auto c = static_cast<std::size_t>(it.col());
        touched[r] = touched[c] = true;
        if (r != c) sets.unite(r, c);
      }
    }
  }
  part.block_of.assign(n, -1);
  part.position.assign(n, -1);
  std::vector<int> root_block(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!touched[i]) continue;
    const std::size_t root = sets.find(i);
    if (root_block[root] < 0) {
      root_block[root] = static_cast<int>(part.blocks.size());
      part.blocks.emplace_back();
    }
    const int b = root_block[root];
    part.block_of[i] = b;
    part.position[i] = static_cast<Eigen::Index>(part.blocks[static_cast<std::size_t>(b)].size());
    part.blocks[static_cast<std::size_t>(b)].push_back(static_cast<Eigen::Index>(i));
  }
  return part;
}

std::vector<Eigen::MatrixXcd> dense_blocks(const Eigen::SparseMatrix<std::complex<double>>& mat, const BlockPartition& part,
                                           const std::vector<bool>& wanted) {
  std::vector<Eigen::MatrixXcd> out(part.blocks.size());
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    if (wanted[b]) {
      const auto s = static_cast<Eigen::Index>(part.blocks[b].size());
      out[b] = Eigen::MatrixXcd::Zero(s, s);
    }
  }
  for (Eigen::Index k = 0; k < mat.outerSize(); ++k) {
    for (Eigen::SparseMatrix<std::complex<double>>::InnerIterator it(mat, k); it; ++it) {
      const int b = part.block_of[static_cast<std::size_t>(it.row())];
      if (b < 0 || !wanted[static_cast<std::size_t>(b)]) continue;
      out[static_cast<std::size_t>(b)](part.position[static_cast<std::size_t>(it.row())],
                                       part.position[static_cast<std::size_t>(it.col())]) += it.value();
    }
  }
  return out;
}

double min_eigenvalue(const Eigen::SparseMatrix<std::complex<double>>& mat) {
  const BlockPartition part = partition_blocks({&mat});
  const std::vector<bool> all(part.blocks.size(), true);
  const auto blocks = dense_blocks(mat, part, all);
  double lowest = 0.0;
  for (const auto& block : blocks) {
    if (block.rows() == 1) {
      lowest = std::min(lowest, block(0, 0).real());
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(block, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, eig.eigenvalues().minCoeff());
  }
  return lowest;
}

}  // namespace ncdist

namespace ncdist {

LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c, std::vector<Eigen::Index> basis,
                    int max_iterations) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n || static_cast<Eigen::Index>(basis.size()) != m) throw InvalidArgument("solve_lp: shape mismatch");
  constexpr double kTol = 1e-12;
  LpSolution sol;
  for (int iter = 0;; ++iter) {
    if (iter >= max_iterations) throw NumericalError("solve_lp: iteration cap reached");
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cb(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      B.col(i) = A.col(basis[static_cast<std::size_t>(i)]);
      cb[i] = c[basis[static_cast<std::size_t>(i)]];
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd xb = lu.solve(b);
    if (iter == 0 && xb.minCoeff() < -1e-9) throw NumericalError("solve_lp: starting basis is infeasible");
    const Eigen::VectorXd y = lu.transpose().solve(cb);
    // Bland: lowest-index column with negative reduced cost enters.
    std::vector<bool> in_basis(static_cast<std::size_t>(n), false);
    for (Eigen::Index j : basis) in_basis[static_cast<std::size_t>(j)] = true;
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!in_basis[static_cast<std::size_t>(j)] && c[j] - y.dot(A.col(j)) < -kTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) {
      sol.x = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < m; ++i) sol.x[basis[static_cast<std::size_t>(i)]] = std::max(0.0, xb[i]);
      sol.y = y;
      sol.objective = c.dot(sol.x);
      sol.basis = std::move(basis);
      sol.iterations = iter;
      return sol;
    }
    const Eigen::VectorXd d = lu.solve(A.col(entering));
    Eigen::Index leaving = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (d[i] <= kTol) continue;
      const double ratio = std::max(0.0, xb[i]) / d[i];
      if (ratio < best - kTol ||
          (ratio <= best + kTol && leaving >= 0 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leaving)])) {
        best = std::min(best, ratio);
        leaving = i;
      }
    }
    if (leaving < 0) throw NumericalError("solve_lp: problem is unbounded");
    basis[static_cast<std::size_t>(leaving)] = entering;
  }
}

}  // namespace ncdist
