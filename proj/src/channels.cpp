#include "ncdist/channels.hpp"

#include <algorithm>
#include <cmath>

namespace ncdist {

namespace {

bool is_identity(const ComplexMatrix& U) { return (U - ComplexMatrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() == 0.0; }

bool is_zero(const std::vector<Complex>& g) {
  return std::all_of(g.begin(), g.end(), [](const Complex& z) { return z == Complex(0.0, 0.0); });
}

}  // namespace

AffineOptics::AffineOptics(ComplexMatrix u, std::vector<Complex> g) : U(std::move(u)), gamma(std::move(g)) {
  if (U.rows() != U.cols() || static_cast<std::size_t>(U.rows()) != gamma.size()) {
    throw InvalidArgument("AffineOptics: U must be M x M with one displacement per mode");
  }
  if (unitarity_defect(U) > 1e-12) throw InvalidArgument("AffineOptics: U is not unitary within 1e-12");
  for (const auto& z : gamma) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("AffineOptics: non-finite displacement");
  }
}

AffineOptics AffineOptics::identity(int modes) {
  return AffineOptics(ComplexMatrix::Identity(modes, modes), std::vector<Complex>(static_cast<std::size_t>(modes)));
}

AffineOptics AffineOptics::passive(ComplexMatrix U) {
  const auto m = static_cast<std::size_t>(U.rows());
  return AffineOptics(std::move(U), std::vector<Complex>(m));
}

CoherentPoint AffineOptics::map(const CoherentPoint& alpha) const {
  if (alpha.modes() != modes()) throw InvalidArgument("AffineOptics::map: mode count mismatch");
  const ComplexVector a = Eigen::Map<const ComplexVector>(alpha.alpha.data(), modes());
  const ComplexVector b = U * a;
  CoherentPoint out;
  for (int m = 0; m < modes(); ++m) out.alpha.push_back(b[m] + gamma[static_cast<std::size_t>(m)]);
  return out;
}

AffineResult apply_affine_detailed(const AffineOptics& T, const DensityMatrix& rho) {
  if (T.modes() != rho.trunc().modes()) throw InvalidArgument("apply_affine: mode count mismatch");
  AffineResult out{rho, 0.0, 0.0};
  if (!is_identity(T.U)) {
    const TruncatedOperator V = passive_unitary(T.U, rho.trunc());
    out.state = conjugate(V, out.state);
    out.unitarity_defect = std::max(out.unitarity_defect, V.unitarity_defect);
  }
  if (!is_zero(T.gamma)) {
    const TruncatedOperator D = displacement(T.gamma, rho.trunc());
    out.state = conjugate(D, out.state);
    out.unitarity_defect = std::max(out.unitarity_defect, D.unitarity_defect);
  }
  out.leakage = std::max(0.0, rho.trace() - out.state.trace());
  return out;
}

DensityMatrix apply_affine(const AffineOptics& T, const DensityMatrix& rho) { return apply_affine_detailed(T, rho).state; }

FockVector apply_affine(const AffineOptics& T, const FockVector& psi) {
  if (T.modes() != psi.trunc().modes()) throw InvalidArgument("apply_affine: mode count mismatch");
  FockVector out = psi;
  if (!is_identity(T.U)) out = apply(passive_unitary(T.U, psi.trunc()), out);
  if (!is_zero(T.gamma)) out = apply(displacement(T.gamma, psi.trunc()), out);
  const double lost = psi.norm() * psi.norm() - out.norm() * out.norm();
  if (lost > 10.0 * psi.trunc().tail_tol() + 1e-10) throw TruncationTooSmall("apply_affine: state leaks out of the truncation");
  return out;
}

DensityMatrix dephase_number(const DensityMatrix& rho) {
  const SparseMatrix& mat = rho.matrix();
  std::vector<Eigen::Triplet<Complex>> diag;
  for (Eigen::Index k = 0; k < mat.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mat, k); it; ++it) {
      if (it.row() == it.col()) diag.emplace_back(it.row(), it.col(), Complex(it.value().real(), 0.0));
    }
  }
  SparseMatrix out(mat.rows(), mat.cols());
  out.setFromTriplets(diag.begin(), diag.end());
  return DensityMatrix(rho.trunc(), out, rho.herm_tol());
}

std::vector<int> sufficient_cutoffs(const ClassicalEnsemble& sigma, double tail_tol) {
  const int modes = sigma.modes();
  std::vector<int> cut(static_cast<std::size_t>(modes), 1);
  for (const auto& c : sigma.components()) {
    for (int m = 0; m < modes; ++m) {
      const double mean = std::norm(c.alpha.alpha[static_cast<std::size_t>(m)]);
      cut[static_cast<std::size_t>(m)] = std::max(cut[static_cast<std::size_t>(m)], poisson_sufficient_cutoff(mean, tail_tol / modes));
    }
  }
  return cut;
}

DensityMatrix adjoin(const DensityMatrix& rho, const ClassicalEnsemble& sigma, const TruncationSpec& sigma_trunc) {
  return tensor(rho, sigma.realize(sigma_trunc));
}

DensityMatrix adjoin(const DensityMatrix& rho, const ClassicalEnsemble& sigma) {
  const double tol = rho.trunc().tail_tol();
  return adjoin(rho, sigma, TruncationSpec(sufficient_cutoffs(sigma, tol), tol));
}

ClassicalEnsemble map_ensemble(const AffineOptics& T, const ClassicalEnsemble& sigma) {
  const int modes = sigma.modes();
  if (T.modes() != modes) throw InvalidArgument("map_ensemble: mode count mismatch");
  std::vector<EnsembleComponent> out;
  for (const auto& comp : sigma.components()) {
    const int groups = 1 + std::max(-1, *std::max_element(comp.phase_group.begin(), comp.phase_group.end()));
    // Piece 0 is the fixed part (plus gamma), piece g + 1 the part rotating with group g.
    std::vector<ComplexVector> pieces(static_cast<std::size_t>(groups) + 1, ComplexVector::Zero(modes));
    for (int m = 0; m < modes; ++m) {
      pieces[static_cast<std::size_t>(comp.phase_group[static_cast<std::size_t>(m)] + 1)][m] = comp.alpha.alpha[static_cast<std::size_t>(m)];
    }
    for (auto& p : pieces) p = (T.U * p).eval();
    for (int m = 0; m < modes; ++m) pieces[0][m] += T.gamma[static_cast<std::size_t>(m)];
    double scale = 0.0;
    for (const auto& p : pieces) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double tiny = 1e-14 * std::max(scale, 1.0);
    EnsembleComponent mapped{comp.weight, CoherentPoint::vacuum(modes), std::vector<int>(static_cast<std::size_t>(modes), -1)};
    for (int m = 0; m < modes; ++m) {
      int owner = -2;
      for (int piece = 0; piece <= groups; ++piece) {
        if (std::abs(pieces[static_cast<std::size_t>(piece)][m]) <= tiny) continue;
        if (owner != -2) throw InvalidArgument("map_ensemble: image of a phase-randomized component is outside the supported family");
        owner = piece - 1;
        mapped.alpha.alpha[static_cast<std::size_t>(m)] = pieces[static_cast<std::size_t>(piece)][m];
      }
      mapped.phase_group[static_cast<std::size_t>(m)] = owner == -2 ? -1 : owner;
    }
    out.push_back(std::move(mapped));
  }
  return ClassicalEnsemble(modes, std::move(out));
}

ClassicalEnsemble dephase_ensemble(const ClassicalEnsemble& sigma) {
  std::vector<EnsembleComponent> out;
  for (auto comp : sigma.components()) {
    for (int m = 0; m < sigma.modes(); ++m) comp.phase_group[static_cast<std::size_t>(m)] = m;
    out.push_back(std::move(comp));
  }
  return ClassicalEnsemble(sigma.modes(), std::move(out));
}

}  // namespace ncdist
