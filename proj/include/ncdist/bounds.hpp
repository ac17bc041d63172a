#pragma once

// The bound ledger for the nonclassical distance delta(rho) = inf over classical sigma of D(rho, sigma).
// delta is carried as an interval: lower bounds from the Husimi supremum, fidelity and triangle
// arguments, upper bounds from explicit classical witnesses.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ncdist/husimi.hpp"
#include "ncdist/state_io.hpp"
#include "ncdist/states.hpp"

namespace ncdist {

/// Stable provenance identifiers (used in JSON and CSV output).
namespace provenance {
inline constexpr const char* kPureLower = "husimi-pure-lower";
inline constexpr const char* kQUpper = "husimi-upper";
inline constexpr const char* kWitness = "witness-distance";
inline constexpr const char* kFidelityFamily = "fidelity-family";
inline constexpr const char* kFidelityRankLower = "fidelity-rank-lower";
inline constexpr const char* kTriangleLower = "triangle-lower";
inline constexpr const char* kTriangleUpper = "triangle-upper";
inline constexpr const char* kConvexityUpper = "convexity-upper";
inline constexpr const char* kDiagLp = "diag-classical-lp";
inline constexpr const char* kDiagDual = "diag-classical-dual";
inline constexpr const char* kAdjoin = "adjoin-invariance";
inline constexpr const char* kTrivial = "trivial";
}  // namespace provenance

using Witness = std::variant<ClassicalEnsemble, CoherentPoint>;

struct Bound {
  std::string name;
  double value = 0.0;
  std::string provenance;
  std::optional<Witness> witness;
};

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

struct BoundReport {
  std::string state_id;
  std::vector<Bound> lowers;
  std::vector<Bound> uppers;
  double best_lower = 0.0;
  double best_upper = 1.0;
  std::optional<double> exact;
  /// Outcome of the saturation mechanism check on the witnesses that close the interval (pure states
  /// only). A failed check keeps the interval but withholds the exact mark.
  std::optional<bool> saturation;

  /// Recomputes best_lower, best_upper and exact; throws NumericalError if some lower exceeds some
  /// upper by more than 1e-8.
  void finalize();
  Interval interval() const { return {best_lower, best_upper}; }
  const Bound* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

nlohmann::json witness_json(const Witness& w);
nlohmann::json qsup_json(const QSupremum& q);

Bound lower_pure_q(const QSupremum& m);
Bound lower_pure_q(const FockVector& psi, const std::vector<CoherentPoint>& hints = {}, const QSupOptions& options = {});
Bound upper_q(const QSupremum& m);
Bound upper_q(const DensityMatrix& rho, const std::vector<CoherentPoint>& hints = {}, const QSupOptions& options = {});
/// D(rho, realize(sigma)) over rho's truncation; realization may drop up to prune_mass of sigma's weight.
Bound upper_witness(const DensityMatrix& rho, const ClassicalEnsemble& sigma, const std::string& name = "witness",
                    double prune_mass = 0.0);
/// 1 - max_sigma F(rho, sigma) over the supplied family. Restricting the family can only raise this
/// value, so it is a lower bound on delta only when the family contains a fidelity maximizer.
Bound lower_mixed_fidelity(const DensityMatrix& rho, const std::vector<ClassicalEnsemble>& family);
/// 1 - sqrt(rank(rho) m(rho)): F(rho, sigma) <= sqrt(rank Tr(rho sigma)) <= sqrt(rank m) for every classical sigma.
Bound lower_fidelity_rank(const DensityMatrix& rho, const QSupremum& m);
/// [delta_ref.lower - D, delta_ref.upper + D] clipped to [0, 1).
std::pair<Bound, Bound> triangle_bounds(const DensityMatrix& rho, const DensityMatrix& rho_ref, const Interval& delta_ref,
                                        const std::string& ref_name = "reference");
Bound convexity_upper(const std::vector<std::pair<double, BoundReport>>& components);

enum class DiagMethod { simplex_lp, subgradient };

struct DiagMinimum {
  double value = 0.0;             // D(rho, sum_k w_k ring(E_k)), re-evaluated at the returned weights
  std::vector<double> weights;
  std::vector<double> grid;
  /// Rigorous lower bound on delta(rho) from the LP dual (simplex_lp only): every classical sigma
  /// dephases to a mixture of rings, and the dual certifies the gap over all E >= 0.
  double dual_lower = 0.0;
  int iterations = 0;
};

/// 41 points mixing a linear and a geometric ladder on [0, 2 mean + 4], plus every integer in range.
std::vector<double> default_energy_grid(double mean_energy);

/// min over the simplex of D(rho, sum_k w_k phase-randomized ring of energy E_k) for a single-mode
/// number-diagonal rho. Ring tails beyond the cutoff enter through an extra coordinate, so the value is
/// the distance in the untruncated space.
DiagMinimum diag_classical_minimize(const DensityMatrix& rho, const std::vector<double>& energy_grid,
                                    DiagMethod method = DiagMethod::simplex_lp);
/// Grid refinement by column generation: adds the ring energy with the most negative reduced cost until
/// the dual gap closes (or `max_rounds`).
DiagMinimum diag_classical_refine(const DensityMatrix& rho, std::vector<double> energy_grid, int max_rounds = 60, double gap_tol = 1e-11);

struct SaturationCheck {
  /// |sigma psi - <psi|sigma|psi> psi|.
  double eigen_residual = 0.0;
  /// max over sampled coherent components of m(psi) - |<alpha|psi>|^2.
  double q_deficit = 0.0;
  bool holds(double tol = 1e-9) const { return holds(tol, tol); }
  bool holds(double residual_tol, double q_tol) const { return eigen_residual <= residual_tol && q_deficit <= q_tol; }
};

/// Checks the mechanism behind exact pure-state values: psi is an eigenvector of the witness and every
/// coherent component of the witness (ring components sampled at 16 phases) attains m(psi).
SaturationCheck check_saturation(const FockVector& psi, const ClassicalEnsemble& sigma, double m, double prune_mass = 0.0);

struct ReportConfig {
  double tail_tol = kDefaultTailTol;
  /// Uniform per-mode cutoff overriding the automatic choice (0 = automatic).
  int cutoff = 0;
  QSupOptions qsup;
  /// Realization pruning for witnesses; negative means tail_tol / 2.
  double prune_mass = -1.0;
  /// Column-generation rounds for number-diagonal single-mode states (0 disables).
  int diag_rounds = 60;
};

BoundReport report(const StateDescription& desc, const ReportConfig& config = {});

/// Closed-form m for the families where it is known, empty otherwise.
std::optional<QSupremum> analytic_qsup(const StateDescription& desc);

}  // namespace ncdist
