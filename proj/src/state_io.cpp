#include "ncdist/state_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncdist/channels.hpp"

namespace ncdist {

using nlohmann::json;

const char* to_string(StateKind kind) {
  switch (kind) {
    case StateKind::number:
      return "number";
    case StateKind::single_photon:
      return "single_photon";
    case StateKind::noon:
      return "noon";
    case StateKind::cat:
      return "cat";
    case StateKind::entangled_coherent:
      return "entangled_coherent";
    case StateKind::coherent:
      return "coherent";
    case StateKind::phase_randomized:
      return "phase_randomized";
    case StateKind::mixture:
      return "mixture";
    case StateKind::vacuum_number_mixture:
      return "vacuum_number_mixture";
    case StateKind::adjoin:
      return "adjoin";
  }
  return "unknown";
}

namespace {

const std::vector<std::pair<std::string, StateKind>> kKinds = {
    {"number", StateKind::number},
    {"single_photon", StateKind::single_photon},
    {"noon", StateKind::noon},
    {"cat", StateKind::cat},
    {"entangled_coherent", StateKind::entangled_coherent},
    {"coherent", StateKind::coherent},
    {"phase_randomized", StateKind::phase_randomized},
    {"mixture", StateKind::mixture},
    {"vacuum_number_mixture", StateKind::vacuum_number_mixture},
    {"adjoin", StateKind::adjoin},
};

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& field(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.contains(key)) throw SchemaError(child(ptr, key), "required field is missing");
  return obj.at(key);
}

double as_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw SchemaError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(ptr, "expected a finite number");
  return x;
}

int as_int(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return v.get<int>();
}

Complex as_complex(const json& v, const std::string& ptr) {
  if (v.is_number()) return {as_number(v, ptr), 0.0};
  if (v.is_array() && v.size() == 2) return {as_number(v[0], child(ptr, 0)), as_number(v[1], child(ptr, 1))};
  throw SchemaError(ptr, "expected a complex number [re, im]");
}

const json& as_array(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.empty()) throw SchemaError(ptr, "expected a non-empty array");
  return v;
}

std::vector<Complex> complex_list(const json& v, const std::string& ptr) {
  std::vector<Complex> out;
  const json& arr = as_array(v, ptr);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_complex(arr[i], child(ptr, i)));
  return out;
}

void require_normalized(const std::vector<Complex>& c, const std::string& ptr) {
  double s = 0.0;
  for (const auto& z : c) s += std::norm(z);
  if (std::abs(s - 1.0) > 1e-12) throw SchemaError(ptr, "coefficients must satisfy sum |c_m|^2 = 1 within 1e-12");
}

template <class Fn>
auto guarded(const std::string& ptr, Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const TruncationTooSmall&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw SchemaError(ptr, e.what());
  }
}

StateDescription parse_node(const json& doc, const std::string& ptr) {
  if (!doc.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  const json& kind_node = field(doc, ptr, "kind");
  if (!kind_node.is_string()) throw SchemaError(child(ptr, "kind"), "expected a string");
  const std::string kind = kind_node.get<std::string>();
  const auto found = std::find_if(kKinds.begin(), kKinds.end(), [&](const auto& k) { return k.first == kind; });
  if (found == kKinds.end()) throw SchemaError(child(ptr, "kind"), "unknown state kind '" + kind + "'");

  StateDescription d;
  d.kind = found->second;
  if (doc.contains("id")) {
    if (!doc["id"].is_string()) throw SchemaError(child(ptr, "id"), "expected a string");
    d.id = doc["id"].get<std::string>();
  }
  auto parity_of = [&]() {
    const json& p = field(doc, ptr, "parity");
    if (p == "even") return Parity::even;
    if (p == "odd") return Parity::odd;
    throw SchemaError(child(ptr, "parity"), "expected \"even\" or \"odd\"");
  };
  auto beta_of = [&]() {
    const double b = as_number(field(doc, ptr, "beta"), child(ptr, "beta"));
    if (!(b > 0.0)) throw SchemaError(child(ptr, "beta"), "beta must be positive");
    return b;
  };
  auto eta_of = [&]() {
    const double e = as_number(field(doc, ptr, "eta"), child(ptr, "eta"));
    if (!(e >= 0.0 && e <= 1.0)) throw SchemaError(child(ptr, "eta"), "eta must lie in [0, 1]");
    return e;
  };
  auto n_of = [&]() {
    const int n = as_int(field(doc, ptr, "n"), child(ptr, "n"));
    if (n < 1) throw SchemaError(child(ptr, "n"), "n must be >= 1");
    return n;
  };

  switch (d.kind) {
    case StateKind::number: {
      const std::string p = child(ptr, "ns");
      const json& arr = as_array(field(doc, ptr, "ns"), p);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const int v = as_int(arr[i], child(p, i));
        if (v < 0) throw SchemaError(child(p, i), "occupations must be non-negative");
        d.ns.push_back(v);
      }
      break;
    }
    case StateKind::single_photon:
      d.n = 1;
      d.c = complex_list(field(doc, ptr, "c"), child(ptr, "c"));
      require_normalized(d.c, child(ptr, "c"));
      break;
    case StateKind::noon:
      d.n = n_of();
      d.c = complex_list(field(doc, ptr, "c"), child(ptr, "c"));
      require_normalized(d.c, child(ptr, "c"));
      break;
    case StateKind::cat:
      d.cat = CatParams(parity_of(), beta_of());
      break;
    case StateKind::entangled_coherent:
      d.cat = CatParams(parity_of(), beta_of());
      d.eta = eta_of();
      break;
    case StateKind::coherent:
      d.alpha = complex_list(field(doc, ptr, "alpha"), child(ptr, "alpha"));
      break;
    case StateKind::phase_randomized: {
      if (doc.contains("energy") == doc.contains("energies")) {
        throw SchemaError(child(ptr, "energy"), "exactly one of \"energy\" or \"energies\" is required");
      }
      if (doc.contains("energy")) {
        d.energies.push_back(as_number(doc["energy"], child(ptr, "energy")));
      } else {
        const std::string p = child(ptr, "energies");
        const json& arr = as_array(doc["energies"], p);
        for (std::size_t i = 0; i < arr.size(); ++i) d.energies.push_back(as_number(arr[i], child(p, i)));
      }
      for (std::size_t i = 0; i < d.energies.size(); ++i) {
        if (d.energies[i] < 0.0) throw SchemaError(child(ptr, "energies"), "energies must be non-negative");
      }
      break;
    }
    case StateKind::mixture: {
      const std::string p = child(ptr, "terms");
      const json& arr = as_array(field(doc, ptr, "terms"), p);
      double total = 0.0;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string tp = child(p, i);
        if (!arr[i].is_object()) throw SchemaError(tp, "expected an object");
        const double w = as_number(field(arr[i], tp, "w"), child(tp, "w"));
        if (w < 0.0) throw SchemaError(child(tp, "w"), "weights must be non-negative");
        d.weights.push_back(w);
        total += w;
        d.children.push_back(parse_node(field(arr[i], tp, "state"), child(tp, "state")));
        if (d.children.back().modes() != d.children.front().modes()) throw SchemaError(child(tp, "state"), "all terms must have the same number of modes");
      }
      if (std::abs(total - 1.0) > 1e-9) throw SchemaError(p, "weights must sum to 1 (within 1e-9)");
      for (double& w : d.weights) w /= total;
      break;
    }
    case StateKind::vacuum_number_mixture:
      d.n = n_of();
      d.eta = eta_of();
      break;
    case StateKind::adjoin: {
      d.children.push_back(parse_node(field(doc, ptr, "state"), child(ptr, "state")));
      StateDescription cl = parse_node(field(doc, ptr, "classical"), child(ptr, "classical"));
      if (!cl.is_classical()) throw SchemaError(child(ptr, "classical"), "the adjoined state must be classical");
      d.children.push_back(std::move(cl));
      break;
    }
  }

  if (doc.contains("trunc")) {
    const std::string p = child(ptr, "trunc");
    const json& t = doc["trunc"];
    if (!t.is_object()) throw SchemaError(p, "expected an object");
    std::vector<int> cutoffs;
    const json& arr = as_array(field(t, p, "cutoffs"), child(p, "cutoffs"));
    for (std::size_t i = 0; i < arr.size(); ++i) cutoffs.push_back(as_int(arr[i], child(child(p, "cutoffs"), i)));
    if (static_cast<int>(cutoffs.size()) != d.modes()) throw SchemaError(child(p, "cutoffs"), "one cutoff per mode is required");
    const double tol = t.contains("tail_tol") ? as_number(t["tail_tol"], child(p, "tail_tol")) : kDefaultTailTol;
    d.trunc = guarded(p, [&] { return TruncationSpec(cutoffs, tol); });
  }
  return d;
}

int max_occupation_cutoff(int n) { return std::max(n, 1); }

}  // namespace

int StateDescription::modes() const {
  switch (kind) {
    case StateKind::number:
      return static_cast<int>(ns.size());
    case StateKind::single_photon:
    case StateKind::noon:
      return static_cast<int>(c.size());
    case StateKind::cat:
    case StateKind::vacuum_number_mixture:
      return 1;
    case StateKind::entangled_coherent:
      return 2;
    case StateKind::coherent:
      return static_cast<int>(alpha.size());
    case StateKind::phase_randomized:
      return static_cast<int>(energies.size());
    case StateKind::mixture:
      return children.front().modes();
    case StateKind::adjoin:
      return children[0].modes() + children[1].modes();
  }
  return 0;
}

bool StateDescription::is_pure() const {
  switch (kind) {
    case StateKind::number:
    case StateKind::single_photon:
    case StateKind::noon:
    case StateKind::cat:
    case StateKind::entangled_coherent:
    case StateKind::coherent:
      return true;
    case StateKind::phase_randomized:
      return std::all_of(energies.begin(), energies.end(), [](double e) { return e == 0.0; });
    case StateKind::vacuum_number_mixture:
      return eta == 0.0 || eta == 1.0;
    case StateKind::mixture:
      return false;
    case StateKind::adjoin:
      return children[0].is_pure() && children[1].is_pure();
  }
  return false;
}

bool StateDescription::is_classical() const {
  switch (kind) {
    case StateKind::coherent:
    case StateKind::phase_randomized:
      return true;
    case StateKind::number:
      return std::all_of(ns.begin(), ns.end(), [](int v) { return v == 0; });
    case StateKind::vacuum_number_mixture:
      return eta == 0.0;
    case StateKind::mixture:
      return std::all_of(children.begin(), children.end(), [](const StateDescription& s) { return s.is_classical(); });
    case StateKind::adjoin:
      return children[0].is_classical();
    default:
      return false;
  }
}

double StateDescription::mean_photons() const {
  switch (kind) {
    case StateKind::number: {
      double s = 0.0;
      for (int v : ns) s += v;
      return s;
    }
    case StateKind::single_photon:
    case StateKind::noon:
      return n;
    case StateKind::cat:
    case StateKind::entangled_coherent: {
      // <n> = beta^2 tanh(beta^2) (even) or beta^2 coth(beta^2) (odd).
      const double b2 = cat.beta * cat.beta;
      return cat.parity == Parity::even ? b2 * std::tanh(b2) : b2 / std::tanh(b2);
    }
    case StateKind::coherent: {
      double s = 0.0;
      for (const auto& a : alpha) s += std::norm(a);
      return s;
    }
    case StateKind::phase_randomized: {
      double s = 0.0;
      for (double e : energies) s += e;
      return s;
    }
    case StateKind::vacuum_number_mixture:
      return eta * n;
    case StateKind::mixture: {
      double s = 0.0;
      for (std::size_t i = 0; i < children.size(); ++i) s += weights[i] * children[i].mean_photons();
      return s;
    }
    case StateKind::adjoin:
      return children[0].mean_photons() + children[1].mean_photons();
  }
  return 0.0;
}

StateDescription parse_state_description(const nlohmann::json& doc) { return parse_node(doc, ""); }

StateDescription parse_state_description(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_state_description(doc);
}

namespace {

json complex_json(const std::vector<Complex>& v) {
  json arr = json::array();
  for (const auto& z : v) arr.push_back(json::array({z.real(), z.imag()}));
  return arr;
}

json body_json(const StateDescription& d) {
  json j;
  j["kind"] = to_string(d.kind);
  switch (d.kind) {
    case StateKind::number:
      j["ns"] = d.ns;
      break;
    case StateKind::single_photon:
      j["c"] = complex_json(d.c);
      break;
    case StateKind::noon:
      j["n"] = d.n;
      j["c"] = complex_json(d.c);
      break;
    case StateKind::cat:
      j["parity"] = to_string(d.cat.parity);
      j["beta"] = d.cat.beta;
      break;
    case StateKind::entangled_coherent:
      j["parity"] = to_string(d.cat.parity);
      j["beta"] = d.cat.beta;
      j["eta"] = d.eta;
      break;
    case StateKind::coherent:
      j["alpha"] = complex_json(d.alpha);
      break;
    case StateKind::phase_randomized:
      j["energies"] = d.energies;
      break;
    case StateKind::mixture: {
      json terms = json::array();
      for (std::size_t i = 0; i < d.children.size(); ++i) terms.push_back({{"w", d.weights[i]}, {"state", body_json(d.children[i])}});
      j["terms"] = terms;
      break;
    }
    case StateKind::vacuum_number_mixture:
      j["n"] = d.n;
      j["eta"] = d.eta;
      break;
    case StateKind::adjoin:
      j["state"] = body_json(d.children[0]);
      j["classical"] = body_json(d.children[1]);
      break;
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const StateDescription& desc) {
  json j = body_json(desc);
  if (!desc.id.empty()) j["id"] = desc.id;
  if (desc.trunc) j["trunc"] = {{"cutoffs", desc.trunc->cutoffs()}, {"tail_tol", desc.trunc->tail_tol()}};
  return j;
}

std::string canonical_id(const StateDescription& desc) { return body_json(desc).dump(); }

TruncationSpec default_truncation(const StateDescription& d, double tail_tol) {
  const int M = d.modes();
  std::vector<int> cut(static_cast<std::size_t>(M), 1);
  switch (d.kind) {
    case StateKind::number:
      for (int m = 0; m < M; ++m) cut[static_cast<std::size_t>(m)] = max_occupation_cutoff(d.ns[static_cast<std::size_t>(m)]);
      break;
    case StateKind::single_photon:
    case StateKind::noon:
      std::fill(cut.begin(), cut.end(), d.n);
      break;
    case StateKind::cat:
      cut[0] = cat_cutoff(d.cat);
      break;
    case StateKind::entangled_coherent:
      cut[0] = default_cutoff(std::sqrt(d.eta) * d.cat.beta);
      cut[1] = default_cutoff(std::sqrt(1.0 - d.eta) * d.cat.beta);
      break;
    case StateKind::vacuum_number_mixture:
      cut[0] = d.n;
      break;
    case StateKind::coherent:
    case StateKind::phase_randomized:
      cut = sufficient_cutoffs(*classical_ensemble(d), tail_tol);
      break;
    case StateKind::mixture:
      for (const auto& ch : d.children) {
        const TruncationSpec t = default_truncation(ch, tail_tol);
        for (int m = 0; m < M; ++m) cut[static_cast<std::size_t>(m)] = std::max(cut[static_cast<std::size_t>(m)], t.cutoff(m));
      }
      break;
    case StateKind::adjoin: {
      cut = default_truncation(d.children[0], tail_tol).cutoffs();
      const auto rest = default_truncation(d.children[1], tail_tol).cutoffs();
      cut.insert(cut.end(), rest.begin(), rest.end());
      break;
    }
  }
  return TruncationSpec(cut, tail_tol);
}

TruncationSpec truncation_for(const StateDescription& desc, double tail_tol) {
  return desc.trunc ? *desc.trunc : default_truncation(desc, tail_tol);
}

std::optional<ClassicalEnsemble> classical_ensemble(const StateDescription& d) {
  if (!d.is_classical()) return std::nullopt;
  switch (d.kind) {
    case StateKind::coherent:
      return ClassicalEnsemble::coherent(CoherentPoint{d.alpha});
    case StateKind::phase_randomized:
      return ClassicalEnsemble::product_ring(d.energies);
    case StateKind::number:
      return ClassicalEnsemble::coherent(CoherentPoint::vacuum(d.modes()));
    case StateKind::vacuum_number_mixture:
      return ClassicalEnsemble::coherent(CoherentPoint::vacuum(1));
    case StateKind::mixture: {
      std::vector<std::pair<double, ClassicalEnsemble>> terms;
      for (std::size_t i = 0; i < d.children.size(); ++i) terms.emplace_back(d.weights[i], *classical_ensemble(d.children[i]));
      return ClassicalEnsemble::mixture(terms);
    }
    case StateKind::adjoin:
      return classical_ensemble(d.children[0])->tensor(*classical_ensemble(d.children[1]));
    default:
      return std::nullopt;
  }
}

std::optional<FockVector> pure_vector(const StateDescription& d, const TruncationSpec& trunc) {
  if (trunc.modes() != d.modes()) throw InvalidArgument("pure_vector: truncation has the wrong number of modes");
  switch (d.kind) {
    case StateKind::number:
      return number_state(d.ns, trunc);
    case StateKind::single_photon:
      return single_photon_superposition(d.c, trunc);
    case StateKind::noon:
      return multimode_noon(d.n, d.c, trunc);
    case StateKind::cat:
      return cat_state(d.cat, trunc);
    case StateKind::entangled_coherent:
      return entangled_coherent(d.cat, d.eta, trunc);
    case StateKind::coherent:
      return coherent_amps(CoherentPoint{d.alpha}, trunc);
    case StateKind::phase_randomized:
      if (d.is_pure()) return coherent_amps(CoherentPoint::vacuum(d.modes()), trunc);
      return std::nullopt;
    case StateKind::vacuum_number_mixture:
      if (d.eta == 0.0) return number_state({0}, trunc);
      if (d.eta == 1.0) return number_state({d.n}, trunc);
      return std::nullopt;
    case StateKind::mixture:
      return std::nullopt;
    case StateKind::adjoin: {
      if (!d.is_pure()) return std::nullopt;
      const int split = d.children[0].modes();
      std::vector<int> a(static_cast<std::size_t>(split));
      std::iota(a.begin(), a.end(), 0);
      std::vector<int> b(static_cast<std::size_t>(d.modes() - split));
      std::iota(b.begin(), b.end(), split);
      return tensor(*pure_vector(d.children[0], trunc.select(a)), *pure_vector(d.children[1], trunc.select(b)));
    }
  }
  return std::nullopt;
}

DensityMatrix density(const StateDescription& d, const TruncationSpec& trunc) {
  if (trunc.modes() != d.modes()) throw InvalidArgument("density: truncation has the wrong number of modes");
  if (auto psi = pure_vector(d, trunc)) return outer(*psi);
  switch (d.kind) {
    case StateKind::phase_randomized:
      return classical_ensemble(d)->realize(trunc);
    case StateKind::vacuum_number_mixture:
      return vacuum_number_mixture(d.n, d.eta, trunc);
    case StateKind::mixture: {
      SparseMatrix sum(static_cast<Eigen::Index>(trunc.dimension()), static_cast<Eigen::Index>(trunc.dimension()));
      for (std::size_t i = 0; i < d.children.size(); ++i) {
        if (d.weights[i] == 0.0) continue;
        sum += d.weights[i] * density(d.children[i], trunc).matrix();
      }
      return DensityMatrix(trunc, sum);
    }
    case StateKind::adjoin: {
      const int split = d.children[0].modes();
      std::vector<int> a(static_cast<std::size_t>(split));
      std::iota(a.begin(), a.end(), 0);
      std::vector<int> b(static_cast<std::size_t>(d.modes() - split));
      std::iota(b.begin(), b.end(), split);
      return tensor(density(d.children[0], trunc.select(a)), density(d.children[1], trunc.select(b)));
    }
    default:
      throw InvalidArgument("density: unsupported description");
  }
}

ParsedState parse_state(const std::string& text) {
  const StateDescription d = parse_state_description(text);
  const TruncationSpec trunc = truncation_for(d);
  if (d.is_classical()) {
    // Realizing once certifies the truncation for the ensemble.
    ClassicalEnsemble e = *classical_ensemble(d);
    (void)e.realize(trunc);
    return e;
  }
  if (auto psi = pure_vector(d, trunc)) return *psi;
  return density(d, trunc);
}

}  // namespace ncdist
