#pragma once

// Named nonclassical target states and the classical reference ensembles used as witnesses.

#include <utility>
#include <vector>

#include "ncdist/cat_params.hpp"
#include "ncdist/fock.hpp"

namespace ncdist {

/// One term of a classical ensemble: a coherent state |alpha>, with the phases of some groups of
/// modes uniformly randomized. Modes sharing a group id >= 0 rotate together by one random phase;
/// modes with id -1 keep their phase. A single group over one mode is the phase-randomized coherent
/// state of mean energy |alpha_m|^2; one group over all modes randomizes the global phase.
struct EnsembleComponent {
  double weight = 1.0;
  CoherentPoint alpha;
  std::vector<int> phase_group;

  bool is_coherent_point() const;
};

/// Non-negative P-representation restricted to atoms and phase rings. Realized analytically: a ring
/// keeps only the entries whose per-group photon totals agree (Poisson diagonal for one mode).
class ClassicalEnsemble {
 public:
  ClassicalEnsemble(int modes, std::vector<EnsembleComponent> components);

  static ClassicalEnsemble coherent(CoherentPoint alpha);
  /// Ring of mean energy `energy` in `mode`, coherent amplitudes `others` elsewhere (others[mode] is ignored).
  static ClassicalEnsemble phase_ring(int mode, double energy, const CoherentPoint& others);
  /// Independent phase-randomized coherent states, one per mode.
  static ClassicalEnsemble product_ring(const std::vector<double>& energies);
  /// Uniform global-phase average of |e^{i theta} direction>.
  static ClassicalEnsemble direction_ring(const CoherentPoint& direction);
  /// Convex combination; weights are renormalized when they sum to 1 within 1e-9.
  static ClassicalEnsemble mixture(const std::vector<std::pair<double, ClassicalEnsemble>>& terms);

  int modes() const noexcept { return modes_; }
  const std::vector<EnsembleComponent>& components() const noexcept { return components_; }

  /// Per-mode cutoffs from the amplitude heuristic ceil(a^2 + 8a + 20).
  std::vector<int> default_cutoffs() const;
  /// Density matrix over `trunc`. Amplitudes are dropped smallest-first while the dropped probability
  /// stays within `prune_mass` per component. Throws TruncationTooSmall if a component's Poisson tail
  /// exceeds trunc.tail_tol().
  DensityMatrix realize(const TruncationSpec& trunc, double prune_mass = 0.0) const;

  /// Product ensemble (this modes first).
  ClassicalEnsemble tensor(const ClassicalEnsemble& other) const;

 private:
  int modes_;
  std::vector<EnsembleComponent> components_;
};

FockVector number_state(const std::vector<int>& occupation, const TruncationSpec& trunc);
/// sum_m c_m |0..1_m..0>; c must be normalized within 1e-12.
FockVector single_photon_superposition(const std::vector<Complex>& c, const TruncationSpec& trunc);
/// sum_m c_m |0..n_m..0>.
FockVector multimode_noon(int n, const std::vector<Complex>& c, const TruncationSpec& trunc);
FockVector cat_state(const CatParams& p, const TruncationSpec& trunc);
/// (|sqrt(eta) b, sqrt(1-eta) b> +- |-sqrt(eta) b, -sqrt(1-eta) b>) / sqrt(2 N).
FockVector entangled_coherent(const CatParams& p, double eta, const TruncationSpec& trunc);
/// (1 - eta)|0><0| + eta |n><n|, single mode.
DensityMatrix vacuum_number_mixture(int n, double eta, const TruncationSpec& trunc);

ClassicalEnsemble phase_randomized_coherent(double energy);
DensityMatrix realize_diag(const ClassicalEnsemble& ring, const TruncationSpec& trunc);

/// (1/M) sum_m [phase-randomized coherent state of energy n in mode m, vacuum elsewhere].
ClassicalEnsemble noon_classical_witness(int n, int modes);

enum class CatWitness { at_beta, at_alphastar };
/// 1/2 |a><a| + 1/2 |-a><-a| with a = beta or the Husimi maximizer alpha*; a = 0 collapses to the vacuum.
ClassicalEnsemble cat_classical_witness(CatWitness kind, const CatParams& p);

/// Per-mode cutoff for a cat state of amplitude beta (default heuristic).
int cat_cutoff(const CatParams& p);

}  // namespace ncdist
