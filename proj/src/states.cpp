#include "ncdist/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "ncdist/husimi.hpp"

namespace ncdist {

namespace {

void require_normalized(const std::vector<Complex>& c, const char* what) {
  if (c.empty()) throw InvalidArgument(std::string(what) + ": empty coefficient vector");
  double s = 0.0;
  for (const auto& v : c) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument(std::string(what) + ": non-finite coefficient");
    s += std::norm(v);
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidArgument(std::string(what) + ": coefficients must satisfy sum |c_m|^2 = 1 within 1e-12");
}

void require_modes(const TruncationSpec& trunc, std::size_t modes, const char* what) {
  if (static_cast<std::size_t>(trunc.modes()) != modes) throw InvalidArgument(std::string(what) + ": truncation has the wrong number of modes");
}

/// Checks that the truncated vector keeps all but tail_tol of the norm; otherwise reports the cutoffs that would.
void require_tail(const FockVector& v, const std::vector<int>& sufficient, const char* what) {
  // The defect is 1 - |v|^2 in floating point, so it cannot resolve tolerances below rounding.
  if (v.norm_defect() > v.trunc().tail_tol() + 64.0 * std::numeric_limits<double>::epsilon()) {
    char msg[96];
    std::snprintf(msg, sizeof msg, ": truncated norm defect %.3e exceeds tail_tol %.3e", v.norm_defect(), v.trunc().tail_tol());
    throw TruncationTooSmall(std::string(what) + msg, sufficient);
  }
}

std::vector<double> normalized_weights(std::vector<double> w) {
  double s = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("ensemble weights must be finite and non-negative");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-9) throw InvalidArgument("ensemble weights must sum to 1 (within 1e-9)");
  for (double& x : w) x /= s;
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// ClassicalEnsemble

bool EnsembleComponent::is_coherent_point() const {
  return std::all_of(phase_group.begin(), phase_group.end(), [](int g) { return g < 0; });
}

ClassicalEnsemble::ClassicalEnsemble(int modes, std::vector<EnsembleComponent> components) : modes_(modes) {
  if (modes < 1) throw InvalidArgument("ClassicalEnsemble: at least one mode required");
  if (components.empty()) throw InvalidArgument("ClassicalEnsemble: no components");
  std::vector<double> w;
  for (auto& c : components) {
    if (c.alpha.modes() != modes) throw InvalidArgument("ClassicalEnsemble: component has the wrong number of modes");
    for (const auto& a : c.alpha.alpha) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw InvalidArgument("ClassicalEnsemble: non-finite amplitude");
    }
    if (c.phase_group.empty()) c.phase_group.assign(static_cast<std::size_t>(modes), -1);
    if (c.phase_group.size() != static_cast<std::size_t>(modes)) throw InvalidArgument("ClassicalEnsemble: phase_group size mismatch");
    w.push_back(c.weight);
  }
  w = normalized_weights(std::move(w));
  for (std::size_t i = 0; i < components.size(); ++i) components[i].weight = w[i];
  components_ = std::move(components);
}

ClassicalEnsemble ClassicalEnsemble::coherent(CoherentPoint alpha) {
  const int m = alpha.modes();
  return ClassicalEnsemble(m, {EnsembleComponent{1.0, std::move(alpha), {}}});
}

ClassicalEnsemble ClassicalEnsemble::phase_ring(int mode, double energy, const CoherentPoint& others) {
  if (!(energy >= 0.0) || !std::isfinite(energy)) throw InvalidArgument("phase_ring: energy must be finite and non-negative");
  const int modes = others.modes();
  if (mode < 0 || mode >= modes) throw InvalidArgument("phase_ring: mode out of range");
  EnsembleComponent c{1.0, others, std::vector<int>(static_cast<std::size_t>(modes), -1)};
  c.alpha.alpha[static_cast<std::size_t>(mode)] = std::sqrt(energy);
  c.phase_group[static_cast<std::size_t>(mode)] = 0;
  return ClassicalEnsemble(modes, {std::move(c)});
}

ClassicalEnsemble ClassicalEnsemble::product_ring(const std::vector<double>& energies) {
  const int modes = static_cast<int>(energies.size());
  EnsembleComponent c{1.0, CoherentPoint::vacuum(modes), {}};
  for (int m = 0; m < modes; ++m) {
    const double e = energies[static_cast<std::size_t>(m)];
    if (!(e >= 0.0) || !std::isfinite(e)) throw InvalidArgument("product_ring: energies must be finite and non-negative");
    c.alpha.alpha[static_cast<std::size_t>(m)] = std::sqrt(e);
    c.phase_group.push_back(m);
  }
  return ClassicalEnsemble(modes, {std::move(c)});
}

ClassicalEnsemble ClassicalEnsemble::direction_ring(const CoherentPoint& direction) {
  const int modes = direction.modes();
  return ClassicalEnsemble(modes, {EnsembleComponent{1.0, direction, std::vector<int>(static_cast<std::size_t>(modes), 0)}});
}

ClassicalEnsemble ClassicalEnsemble::mixture(const std::vector<std::pair<double, ClassicalEnsemble>>& terms) {
  if (terms.empty()) throw InvalidArgument("mixture: no terms");
  std::vector<double> w;
  for (const auto& t : terms) w.push_back(t.first);
  w = normalized_weights(std::move(w));
  const int modes = terms.front().second.modes();
  std::vector<EnsembleComponent> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].second.modes() != modes) throw InvalidArgument("mixture: terms have different mode counts");
    for (auto c : terms[i].second.components()) {
      c.weight *= w[i];
      if (c.weight > 0.0) out.push_back(std::move(c));
    }
  }
  return ClassicalEnsemble(modes, std::move(out));
}

std::vector<int> ClassicalEnsemble::default_cutoffs() const {
  std::vector<int> cut(static_cast<std::size_t>(modes_), 1);
  for (const auto& c : components_) {
    for (int m = 0; m < modes_; ++m) {
      const double a = std::abs(c.alpha.alpha[static_cast<std::size_t>(m)]);
      if (a > 0.0) cut[static_cast<std::size_t>(m)] = std::max(cut[static_cast<std::size_t>(m)], default_cutoff(a));
    }
  }
  return cut;
}

DensityMatrix ClassicalEnsemble::realize(const TruncationSpec& trunc, double prune_mass) const {
  require_modes(trunc, static_cast<std::size_t>(modes_), "ClassicalEnsemble::realize");
  if (!(prune_mass >= 0.0)) throw InvalidArgument("realize: prune_mass must be non-negative");
  std::vector<Eigen::Triplet<Complex>> triplets;
  std::vector<int> occ(static_cast<std::size_t>(modes_));
  for (const auto& comp : components_) {
    if (comp.weight == 0.0) continue;
    const FockVector v = coherent_amps(comp.alpha, trunc);
    const ComplexVector& a = v.amps();
    // Keep the largest amplitudes; drop the rest while the dropped probability fits the budget.
    std::vector<Eigen::Index> nz;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] != Complex(0.0, 0.0)) nz.push_back(i);
    }
    if (prune_mass > 0.0) {
      std::sort(nz.begin(), nz.end(), [&](Eigen::Index x, Eigen::Index y) {
        const double nx = std::norm(a[x]);
        const double ny = std::norm(a[y]);
        return nx != ny ? nx < ny : x < y;
      });
      double dropped = 0.0;
      std::size_t cut = 0;
      while (cut < nz.size() && dropped + std::norm(a[nz[cut]]) <= prune_mass) dropped += std::norm(a[nz[cut++]]);
      nz.erase(nz.begin(), nz.begin() + static_cast<std::ptrdiff_t>(cut));
      std::sort(nz.begin(), nz.end());
    }
    // Phase averaging keeps entries whose photon totals agree within every randomized group.
    std::map<std::vector<int>, std::vector<Eigen::Index>> classes;
    const int groups = 1 + *std::max_element(comp.phase_group.begin(), comp.phase_group.end());
    for (Eigen::Index i : nz) {
      std::vector<int> key(static_cast<std::size_t>(std::max(groups, 0)), 0);
      trunc.decode(static_cast<std::size_t>(i), occ);
      for (int m = 0; m < modes_; ++m) {
        const int g = comp.phase_group[static_cast<std::size_t>(m)];
        if (g >= 0) key[static_cast<std::size_t>(g)] += occ[static_cast<std::size_t>(m)];
      }
      classes[key].push_back(i);
    }
    for (const auto& [key, idx] : classes) {
      for (Eigen::Index r : idx) {
        for (Eigen::Index c : idx) triplets.emplace_back(r, c, comp.weight * a[r] * std::conj(a[c]));
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(trunc.dimension());
  SparseMatrix mat(dim, dim);
  mat.setFromTriplets(triplets.begin(), triplets.end());
  mat.prune(Complex(0.0, 0.0), 0.0);
  return DensityMatrix(trunc, mat);
}

ClassicalEnsemble ClassicalEnsemble::tensor(const ClassicalEnsemble& other) const {
  std::vector<EnsembleComponent> out;
  for (const auto& a : components_) {
    const int offset = 1 + std::max(-1, *std::max_element(a.phase_group.begin(), a.phase_group.end()));
    for (const auto& b : other.components_) {
      EnsembleComponent c{a.weight * b.weight, a.alpha, a.phase_group};
      c.alpha.alpha.insert(c.alpha.alpha.end(), b.alpha.alpha.begin(), b.alpha.alpha.end());
      for (int g : b.phase_group) c.phase_group.push_back(g < 0 ? -1 : g + offset);
      out.push_back(std::move(c));
    }
  }
  return ClassicalEnsemble(modes_ + other.modes_, std::move(out));
}

// ---------------------------------------------------------------------------------------------
// Named states

FockVector number_state(const std::vector<int>& occupation, const TruncationSpec& trunc) {
  require_modes(trunc, occupation.size(), "number_state");
  std::vector<int> sufficient = trunc.cutoffs();
  bool fits = true;
  for (std::size_t m = 0; m < occupation.size(); ++m) {
    if (occupation[m] < 0) throw InvalidArgument("number_state: negative occupation");
    if (occupation[m] > sufficient[m]) {
      sufficient[m] = occupation[m];
      fits = false;
    }
  }
  if (!fits) throw TruncationTooSmall("number_state: occupation exceeds the cutoff", sufficient);
  ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(trunc.dimension()));
  amps[static_cast<Eigen::Index>(trunc.index(occupation))] = 1.0;
  return FockVector(trunc, std::move(amps));
}

FockVector single_photon_superposition(const std::vector<Complex>& c, const TruncationSpec& trunc) {
  require_normalized(c, "single_photon_superposition");
  return multimode_noon(1, c, trunc);
}

FockVector multimode_noon(int n, const std::vector<Complex>& c, const TruncationSpec& trunc) {
  if (n < 1) throw InvalidArgument("multimode_noon: n must be >= 1");
  require_normalized(c, "multimode_noon");
  require_modes(trunc, c.size(), "multimode_noon");
  std::vector<int> sufficient = trunc.cutoffs();
  bool fits = true;
  for (auto& s : sufficient) {
    if (s < n) {
      s = n;
      fits = false;
    }
  }
  if (!fits) throw TruncationTooSmall("multimode_noon: cutoff below n", sufficient);
  ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(trunc.dimension()));
  std::vector<int> occ(c.size(), 0);
  for (std::size_t m = 0; m < c.size(); ++m) {
    occ[m] = n;
    amps[static_cast<Eigen::Index>(trunc.index(occ))] += c[m];
    occ[m] = 0;
  }
  return FockVector(trunc, std::move(amps));
}

int cat_cutoff(const CatParams& p) { return default_cutoff(p.beta); }

FockVector cat_state(const CatParams& p, const TruncationSpec& trunc) {
  require_modes(trunc, 1, "cat_state");
  const int cutoff = trunc.cutoff(0);
  const std::vector<Complex> table = coherent_table(p.beta, cutoff);
  // (|b> +- |-b>) keeps twice the coherent amplitude on the matching parity sector.
  const double scale = 2.0 / std::sqrt(2.0 * p.norm());
  const int parity = p.parity == Parity::even ? 0 : 1;
  ComplexVector amps = ComplexVector::Zero(cutoff + 1);
  for (int n = parity; n <= cutoff; n += 2) amps[n] = scale * table[static_cast<std::size_t>(n)];
  FockVector v(trunc, std::move(amps));
  require_tail(v, {poisson_sufficient_cutoff(p.beta * p.beta, trunc.tail_tol() * p.norm() / 2.0)}, "cat_state");
  return v;
}

FockVector entangled_coherent(const CatParams& p, double eta, const TruncationSpec& trunc) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("entangled_coherent: eta must lie in [0, 1]");
  require_modes(trunc, 2, "entangled_coherent");
  const double b1 = std::sqrt(eta) * p.beta;
  const double b2 = std::sqrt(1.0 - eta) * p.beta;
  const auto t1 = coherent_table(b1, trunc.cutoff(0));
  const auto t2 = coherent_table(b2, trunc.cutoff(1));
  const double scale = 2.0 / std::sqrt(2.0 * p.norm());
  const int parity = p.parity == Parity::even ? 0 : 1;
  ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(trunc.dimension()));
  for (int n1 = 0; n1 <= trunc.cutoff(0); ++n1) {
    for (int n2 = 0; n2 <= trunc.cutoff(1); ++n2) {
      if ((n1 + n2) % 2 != parity) continue;
      const int occ[2] = {n1, n2};
      amps[static_cast<Eigen::Index>(trunc.index(occ))] = scale * t1[static_cast<std::size_t>(n1)] * t2[static_cast<std::size_t>(n2)];
    }
  }
  FockVector v(trunc, std::move(amps));
  const double tol = trunc.tail_tol() * p.norm() / 4.0;
  require_tail(v, {poisson_sufficient_cutoff(b1 * b1, tol), poisson_sufficient_cutoff(b2 * b2, tol)}, "entangled_coherent");
  return v;
}

DensityMatrix vacuum_number_mixture(int n, double eta, const TruncationSpec& trunc) {
  if (n < 1) throw InvalidArgument("vacuum_number_mixture: n must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("vacuum_number_mixture: eta must lie in [0, 1]");
  require_modes(trunc, 1, "vacuum_number_mixture");
  if (trunc.cutoff(0) < n) throw TruncationTooSmall("vacuum_number_mixture: cutoff below n", {n});
  std::vector<double> diag(static_cast<std::size_t>(trunc.cutoff(0)) + 1, 0.0);
  diag[0] += 1.0 - eta;
  diag[static_cast<std::size_t>(n)] += eta;
  return DensityMatrix::diagonal(trunc, diag);
}

ClassicalEnsemble phase_randomized_coherent(double energy) { return ClassicalEnsemble::phase_ring(0, energy, CoherentPoint::vacuum(1)); }

DensityMatrix realize_diag(const ClassicalEnsemble& ring, const TruncationSpec& trunc) {
  DensityMatrix rho = ring.realize(trunc);
  if (!rho.is_number_diagonal()) throw InvalidArgument("realize_diag: ensemble is not diagonal in the number basis");
  return rho;
}

ClassicalEnsemble noon_classical_witness(int n, int modes) {
  if (n < 1) throw InvalidArgument("noon_classical_witness: n must be >= 1");
  if (modes < 1) throw InvalidArgument("noon_classical_witness: at least one mode required");
  std::vector<EnsembleComponent> comps;
  for (int m = 0; m < modes; ++m) {
    EnsembleComponent c{1.0 / modes, CoherentPoint::vacuum(modes), std::vector<int>(static_cast<std::size_t>(modes), -1)};
    c.alpha.alpha[static_cast<std::size_t>(m)] = std::sqrt(static_cast<double>(n));
    c.phase_group[static_cast<std::size_t>(m)] = 0;
    comps.push_back(std::move(c));
  }
  return ClassicalEnsemble(modes, std::move(comps));
}

ClassicalEnsemble cat_classical_witness(CatWitness kind, const CatParams& p) {
  const double a = kind == CatWitness::at_beta ? p.beta : std::abs(cat_qmax(p).argmax.front().alpha.front().real());
  if (a == 0.0) return ClassicalEnsemble::coherent(CoherentPoint::vacuum(1));
  return ClassicalEnsemble(1, {EnsembleComponent{0.5, CoherentPoint{{Complex(a, 0.0)}}, {}},
                               EnsembleComponent{0.5, CoherentPoint{{Complex(-a, 0.0)}}, {}}});
}

}  // namespace ncdist
