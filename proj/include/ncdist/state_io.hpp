#pragma once

// JSON state descriptions. A document names a state family and its parameters, e.g.
//   {"kind":"number","ns":[1,1]}
//   {"kind":"cat","parity":"odd","beta":1.2}
//   {"kind":"mixture","terms":[{"w":0.5,"state":{...}},{"w":0.5,"state":{...}}]}
// Complex numbers are [re, im] pairs (a bare number is read as real). Every document may carry
// "trunc": {"cutoffs":[...], "tail_tol":1e-12} and a free-form "id" used as the report's state_id.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ncdist/fock.hpp"
#include "ncdist/states.hpp"

namespace ncdist {

enum class StateKind {
  number,
  single_photon,
  noon,
  cat,
  entangled_coherent,
  coherent,
  phase_randomized,
  mixture,
  vacuum_number_mixture,
  /// {"kind":"adjoin","state":{...},"classical":{...}}: a state tensored with a classical ancilla.
  adjoin,
};

const char* to_string(StateKind kind);

struct StateDescription {
  StateKind kind = StateKind::number;
  std::vector<int> ns;                        // number
  std::vector<Complex> c;                     // single_photon, noon
  int n = 0;                                  // noon, vacuum_number_mixture
  CatParams cat;                              // cat, entangled_coherent
  double eta = 0.0;                           // entangled_coherent, vacuum_number_mixture
  std::vector<Complex> alpha;                 // coherent
  std::vector<double> energies;               // phase_randomized
  std::vector<double> weights;                // mixture
  std::vector<StateDescription> children;     // mixture terms; adjoin: {state, classical}
  std::optional<TruncationSpec> trunc;
  std::string id;

  int modes() const;
  bool is_pure() const;
  /// True when the description is a classical state by construction (coherent, rings, mixtures of those).
  bool is_classical() const;
  /// Mean total photon number of the described state.
  double mean_photons() const;
};

StateDescription parse_state_description(const std::string& text);
StateDescription parse_state_description(const nlohmann::json& doc);
inline StateDescription parse_state_description(const char* text) { return parse_state_description(std::string(text)); }
nlohmann::json to_json(const StateDescription& desc);

/// Canonical compact JSON of the description (without "trunc" and "id").
std::string canonical_id(const StateDescription& desc);

/// Cutoffs that hold the described state within tail_tol: exact Poisson-tail cutoffs for coherent
/// content, the amplitude heuristic for cats, and the occupation itself for number content.
TruncationSpec default_truncation(const StateDescription& desc, double tail_tol = kDefaultTailTol);
/// The document's own truncation if present, else the default.
TruncationSpec truncation_for(const StateDescription& desc, double tail_tol = kDefaultTailTol);

/// Pure states as vectors; everything else as density matrices.
std::optional<FockVector> pure_vector(const StateDescription& desc, const TruncationSpec& trunc);
DensityMatrix density(const StateDescription& desc, const TruncationSpec& trunc);
/// The P-representation of classical descriptions, empty otherwise.
std::optional<ClassicalEnsemble> classical_ensemble(const StateDescription& desc);

using ParsedState = std::variant<FockVector, DensityMatrix, ClassicalEnsemble>;
/// Parses and builds the state: classical kinds as ensembles, other pure kinds as vectors, the rest as
/// density matrices, all over the document's truncation (or the default).
ParsedState parse_state(const std::string& text);

}  // namespace ncdist
