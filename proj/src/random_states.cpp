#include "ncdist/random_states.hpp"

#include <Eigen/QR>

namespace ncdist {

namespace {

Complex gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

Eigen::Index support_size(const TruncationSpec& trunc, int support) {
  const auto dim = static_cast<Eigen::Index>(trunc.dimension());
  if (support <= 0) return dim;
  if (support > dim) throw InvalidArgument("random state: support exceeds the truncated dimension");
  return support;
}

}  // namespace

FockVector random_pure(const TruncationSpec& trunc, Rng& rng, int support) {
  const Eigen::Index s = support_size(trunc, support);
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(trunc.dimension()));
  for (Eigen::Index i = 0; i < s; ++i) v[i] = gaussian(rng);
  v.normalize();
  return FockVector(trunc, std::move(v));
}

DensityMatrix random_density(const TruncationSpec& trunc, int rank, Rng& rng, int support) {
  if (rank < 1) throw InvalidArgument("random_density: rank must be positive");
  const Eigen::Index s = support_size(trunc, support);
  ComplexMatrix G(s, rank);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (int k = 0; k < rank; ++k) G(i, k) = gaussian(rng);
  }
  ComplexMatrix rho = G * G.adjoint();
  rho /= rho.trace().real();
  const auto dim = static_cast<Eigen::Index>(trunc.dimension());
  ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
  full.topLeftCorner(s, s) = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix::from_dense(trunc, full);
}

ComplexMatrix random_unitary(int modes, Rng& rng) {
  if (modes < 1) throw InvalidArgument("random_unitary: need at least one mode");
  ComplexMatrix G(modes, modes);
  for (int i = 0; i < modes; ++i) {
    for (int j = 0; j < modes; ++j) G(i, j) = gaussian(rng);
  }
  const Eigen::HouseholderQR<ComplexMatrix> qr(G);
  ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(modes, modes);
  const ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < modes; ++j) {
    const double a = std::abs(R(j, j));
    if (a > 0.0) Q.col(j) *= R(j, j) / a;
  }
  return Q;
}

std::vector<Complex> random_coefficients(int modes, Rng& rng) {
  std::vector<Complex> c(static_cast<std::size_t>(modes));
  double norm = 0.0;
  for (auto& z : c) {
    z = gaussian(rng);
    norm += std::norm(z);
  }
  for (auto& z : c) z /= std::sqrt(norm);
  return c;
}

}  // namespace ncdist
