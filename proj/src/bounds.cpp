#include "ncdist/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "ncdist/channels.hpp"
#include "ncdist/linalg.hpp"
#include "ncdist/metrics.hpp"

namespace ncdist {

using nlohmann::json;

// ---------------------------------------------------------------------------------------------
// BoundReport

void BoundReport::finalize() {
  best_lower = 0.0;
  best_upper = 1.0;
  for (const auto& b : lowers) best_lower = std::max(best_lower, b.value);
  for (const auto& b : uppers) best_upper = std::min(best_upper, b.value);
  if (best_lower > best_upper + 1e-8) {
    const auto lo = std::max_element(lowers.begin(), lowers.end(), [](const Bound& a, const Bound& b) { return a.value < b.value; });
    const auto hi = std::min_element(uppers.begin(), uppers.end(), [](const Bound& a, const Bound& b) { return a.value < b.value; });
    throw NumericalError("bound ordering violated for " + state_id + ": lower " + lo->name + " = " + std::to_string(lo->value) +
                         " exceeds upper " + hi->name + " = " + std::to_string(hi->value));
  }
  exact.reset();
  if (std::abs(best_upper - best_lower) <= 1e-9 && saturation.value_or(true)) exact = best_upper;
}

const Bound* BoundReport::find(const std::string& name) const {
  for (const auto& b : lowers) {
    if (b.name == name) return &b;
  }
  for (const auto& b : uppers) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

namespace {

json complex_array(const std::vector<Complex>& v) {
  json arr = json::array();
  for (const auto& z : v) arr.push_back(json::array({z.real(), z.imag()}));
  return arr;
}

json bound_json(const Bound& b) {
  json j = {{"name", b.name}, {"value", b.value}, {"provenance", b.provenance}};
  if (b.witness) j["witness"] = witness_json(*b.witness);
  return j;
}

}  // namespace

json witness_json(const Witness& w) {
  if (const auto* p = std::get_if<CoherentPoint>(&w)) return {{"coherent", complex_array(p->alpha)}};
  json comps = json::array();
  for (const auto& c : std::get<ClassicalEnsemble>(w).components()) {
    comps.push_back({{"weight", c.weight}, {"alpha", complex_array(c.alpha.alpha)}, {"phase_group", c.phase_group}});
  }
  return {{"ensemble", comps}};
}

json qsup_json(const QSupremum& q) {
  json argmax = json::array();
  for (const auto& a : q.argmax) argmax.push_back(complex_array(a.alpha));
  return {{"value", q.value}, {"argmax", argmax}, {"method", to_string(q.method)}, {"certificate", q.certificate}};
}

json BoundReport::to_json() const {
  json j;
  j["state_id"] = state_id;
  j["lowers"] = json::array();
  for (const auto& b : lowers) j["lowers"].push_back(bound_json(b));
  j["uppers"] = json::array();
  for (const auto& b : uppers) j["uppers"].push_back(bound_json(b));
  j["best_lower"] = best_lower;
  j["best_upper"] = best_upper;
  j["exact"] = exact ? json(*exact) : json(nullptr);
  j["saturation"] = saturation ? json(*saturation) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------------------------
// Individual bounds

Bound lower_pure_q(const QSupremum& m) {
  return {"q_lower", std::max(0.0, 1.0 - m.value), provenance::kPureLower, std::nullopt};
}

Bound lower_pure_q(const FockVector& psi, const std::vector<CoherentPoint>& hints, const QSupOptions& options) {
  return lower_pure_q(q_sup(outer(psi), hints, options));
}

Bound upper_q(const QSupremum& m) {
  Bound b{"q_upper", std::sqrt(std::max(0.0, 1.0 - m.value)), provenance::kQUpper, std::nullopt};
  if (!m.argmax.empty()) b.witness = m.argmax.front();
  return b;
}

Bound upper_q(const DensityMatrix& rho, const std::vector<CoherentPoint>& hints, const QSupOptions& options) {
  return upper_q(q_sup(rho, hints, options));
}

Bound upper_witness(const DensityMatrix& rho, const ClassicalEnsemble& sigma, const std::string& name, double prune_mass) {
  const DensityMatrix s = sigma.realize(rho.trunc(), prune_mass);
  return {name, trace_distance(rho, s), provenance::kWitness, sigma};
}

Bound lower_mixed_fidelity(const DensityMatrix& rho, const std::vector<ClassicalEnsemble>& family) {
  if (family.empty()) throw InvalidArgument("lower_mixed_fidelity: empty family");
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double f = fidelity(rho, family[i].realize(rho.trunc()));
    if (f > best) {
      best = f;
      arg = i;
    }
  }
  return {"fidelity_family[" + std::to_string(family.size()) + "]", std::max(0.0, 1.0 - best), provenance::kFidelityFamily, family[arg]};
}

namespace {

int numerical_rank(const DensityMatrix& rho) {
  const SparseMatrix& mat = rho.matrix();
  const BlockPartition part = partition_blocks({&mat});
  const auto blocks = dense_blocks(mat, part, std::vector<bool>(part.blocks.size(), true));
  int rank = 0;
  for (const auto& b : blocks) {
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(b, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) rank += eig.eigenvalues()[i] > rho.herm_tol() ? 1 : 0;
  }
  return std::max(rank, 1);
}

}  // namespace

Bound lower_fidelity_rank(const DensityMatrix& rho, const QSupremum& m) {
  const int r = numerical_rank(rho);
  return {"fidelity_rank[" + std::to_string(r) + "]", std::max(0.0, 1.0 - std::sqrt(std::min(1.0, r * m.value))),
          provenance::kFidelityRankLower, std::nullopt};
}

std::pair<Bound, Bound> triangle_bounds(const DensityMatrix& rho, const DensityMatrix& rho_ref, const Interval& delta_ref,
                                        const std::string& ref_name) {
  const double d = trace_distance(rho, rho_ref);
  Bound lo{"triangle_lower[" + ref_name + "]", std::max(0.0, delta_ref.lower - d), provenance::kTriangleLower, std::nullopt};
  Bound hi{"triangle_upper[" + ref_name + "]", std::min(1.0, delta_ref.upper + d), provenance::kTriangleUpper, std::nullopt};
  return {lo, hi};
}

Bound convexity_upper(const std::vector<std::pair<double, BoundReport>>& components) {
  if (components.empty()) throw InvalidArgument("convexity_upper: no components");
  double wsum = 0.0;
  double value = 0.0;
  for (const auto& [w, r] : components) {
    if (w < 0.0) throw InvalidArgument("convexity_upper: negative weight");
    wsum += w;
    value += w * r.best_upper;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw InvalidArgument("convexity_upper: weights must sum to 1");
  return {"convexity", value / wsum, provenance::kConvexityUpper, std::nullopt};
}

// ---------------------------------------------------------------------------------------------
// Minimization over number-diagonal classical states

namespace {

/// Poisson(E) pmf on 0..cutoff followed by the tail mass beyond the cutoff.
Eigen::VectorXd ring_column(double energy, int cutoff) {
  Eigen::VectorXd col(cutoff + 2);
  for (int i = 0; i <= cutoff; ++i) {
    col[i] = energy == 0.0 ? (i == 0 ? 1.0 : 0.0) : std::exp(-energy + i * std::log(energy) - std::lgamma(i + 1.0));
  }
  col[cutoff + 1] = poisson_tail(energy, cutoff);
  return col;
}

struct DiagProblem {
  Eigen::VectorXd p;  // populations plus a zero tail coordinate
  int cutoff = 0;
};

DiagProblem diag_problem(const DensityMatrix& rho) {
  if (rho.trunc().modes() != 1) throw InvalidArgument("diag_classical_minimize: single-mode states only");
  if (!rho.is_number_diagonal()) throw InvalidArgument("diag_classical_minimize: state is not diagonal in the number basis");
  DiagProblem pr;
  pr.cutoff = rho.trunc().cutoff(0);
  pr.p = Eigen::VectorXd::Zero(pr.cutoff + 2);
  for (int i = 0; i <= pr.cutoff; ++i) pr.p[i] = std::max(0.0, rho.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(i)).real());
  return pr;
}

Eigen::MatrixXd ring_matrix(const std::vector<double>& grid, int cutoff) {
  Eigen::MatrixXd A(cutoff + 2, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) A.col(static_cast<Eigen::Index>(k)) = ring_column(grid[k], cutoff);
  return A;
}

double half_l1(const Eigen::VectorXd& p, const Eigen::MatrixXd& A, const std::vector<double>& w) {
  const Eigen::VectorXd q = A * Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return 0.5 * (p - q).cwiseAbs().sum();
}

std::vector<double> clean_weights(const Eigen::VectorXd& w) {
  std::vector<double> out(static_cast<std::size_t>(w.size()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) s += out[static_cast<std::size_t>(i)] = std::max(0.0, w[i]);
  for (double& x : out) x /= s;
  return out;
}

/// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& w) {
  std::vector<double> u = w;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (double& x : w) x = std::max(0.0, x - theta);
}

struct LpOutcome {
  std::vector<double> weights;
  Eigen::VectorXd y;  // duals of the coordinate rows
  double z = 0.0;     // dual of the simplex row
  int iterations = 0;
};

LpOutcome solve_diag_lp(const Eigen::VectorXd& p, const Eigen::MatrixXd& A) {
  const Eigen::Index R = A.rows();
  const Eigen::Index K = A.cols();
  // Variables [w (K), u (R), v (R)]: A w + u - v = p, sum w = 1, cost (u + v)/2.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(R + 1, K + 2 * R);
  M.topLeftCorner(R, K) = A;
  M.block(0, K, R, R) = Eigen::MatrixXd::Identity(R, R);
  M.block(0, K + R, R, R) = -Eigen::MatrixXd::Identity(R, R);
  M.block(R, 0, 1, K) = Eigen::RowVectorXd::Ones(K);
  Eigen::VectorXd b(R + 1);
  b << p, 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(K + 2 * R);
  c.tail(2 * R).setConstant(0.5);
  // Warm start from the best single ring.
  Eigen::Index k0 = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < K; ++k) {
    const double d = 0.5 * (p - A.col(k)).cwiseAbs().sum();
    if (d < best) {
      best = d;
      k0 = k;
    }
  }
  std::vector<Eigen::Index> basis;
  for (Eigen::Index i = 0; i < R; ++i) basis.push_back(p[i] - A(i, k0) >= 0.0 ? K + i : K + R + i);
  basis.push_back(k0);
  const LpSolution sol = solve_lp(M, b, c, basis);
  LpOutcome out;
  out.weights = clean_weights(sol.x.head(K));
  out.y = sol.y.head(R).cwiseMax(-0.5).cwiseMin(0.5);
  out.z = sol.y[R];
  out.iterations = sol.iterations;
  return out;
}

/// sup over E >= 0 of y . ring_column(E): dense scan, golden-section polish of every local maximum of
/// the scan, and a monotone bound past the scan range (only the tail coordinate survives there).
std::pair<double, double> ring_dual_sup(const Eigen::VectorXd& y, int cutoff) {
  auto g = [&](double e) { return y.dot(ring_column(e, cutoff)); };
  const double e_hi = cutoff + 12.0 * std::sqrt(cutoff + 1.0) + 30.0;
  const double h = 1e-2;
  const int steps = static_cast<int>(std::ceil(e_hi / h));
  // The scan only locates candidates, so it uses the cheap pmf recurrence; maxima are re-evaluated exactly.
  std::vector<double> vals(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double e = i * h;
    double p = std::exp(-e);
    double cdf = 0.0;
    double v = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
      if (n > 0) p *= e / n;
      cdf += p;
      v += y[n] * p;
    }
    vals[static_cast<std::size_t>(i)] = v + y[cutoff + 1] * std::max(0.0, 1.0 - cdf);
  }
  double best = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    const bool left = i == 0 || vals[static_cast<std::size_t>(i - 1)] < v;
    const bool right = i == steps || vals[static_cast<std::size_t>(i + 1)] <= v;
    if (!(left && right)) continue;
    if (const double gv = g(i * h); gv > best) {
      best = gv;
      arg = i * h;
    }
    double a = std::max(0.0, (i - 1) * h);
    double b = (i + 1) * h;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = g(x1);
    double f2 = g(x2);
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + r * (b - a);
        f2 = g(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - r * (b - a);
        f1 = g(x1);
      }
    }
    for (const auto& [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
      if (f > best) {
        best = f;
        arg = x;
      }
    }
  }
  // Past the scan, g(E) <= y_tail + P(X <= cutoff | E), which decreases in E.
  const Eigen::VectorXd col = ring_column(e_hi, cutoff);
  const double beyond = y[cutoff + 1] + col.head(cutoff + 1).sum();
  if (beyond > best) {
    best = beyond;
    arg = e_hi;
  }
  return {best, arg};
}

}  // namespace

std::vector<double> default_energy_grid(double mean_energy) {
  if (!(mean_energy >= 0.0)) throw InvalidArgument("default_energy_grid: mean energy must be non-negative");
  const double top = 2.0 * mean_energy + 4.0;
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(top * i / 20.0);
  for (int j = 0; j < 20; ++j) grid.push_back(top * std::pow(10.0, -3.0 + 3.0 * j / 20.0));
  for (int n = 0; n <= static_cast<int>(std::floor(top)); ++n) grid.push_back(n);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
             grid.end());
  return grid;
}

DiagMinimum diag_classical_minimize(const DensityMatrix& rho, const std::vector<double>& energy_grid, DiagMethod method) {
  if (energy_grid.empty()) throw InvalidArgument("diag_classical_minimize: empty energy grid");
  for (double e : energy_grid) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw InvalidArgument("diag_classical_minimize: energies must be finite and non-negative");
  }
  const DiagProblem pr = diag_problem(rho);
  const Eigen::MatrixXd A = ring_matrix(energy_grid, pr.cutoff);
  DiagMinimum out;
  out.grid = energy_grid;
  if (method == DiagMethod::simplex_lp) {
    const LpOutcome lp = solve_diag_lp(pr.p, A);
    out.weights = lp.weights;
    out.iterations = lp.iterations;
    out.dual_lower = std::max(0.0, lp.y.dot(pr.p) - ring_dual_sup(lp.y, pr.cutoff).first);
  } else {
    // Projected subgradient with a Polyak step towards a shrinking target below the best value so far.
    const auto K = energy_grid.size();
    std::vector<double> w(K, 0.0);
    std::size_t k0 = 0;
    double f_best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> e(K, 0.0);
      e[k] = 1.0;
      const double f = half_l1(pr.p, A, e);
      if (f < f_best) {
        f_best = f;
        k0 = k;
      }
    }
    w[k0] = 1.0;
    std::vector<double> best_w = w;
    int it = 0;
    for (; it < 10000 && f_best > 0.0; ++it) {
      const Eigen::VectorXd r = pr.p - A * Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(K));
      const double f = 0.5 * r.cwiseAbs().sum();
      if (f < f_best) {
        f_best = f;
        best_w = w;
      }
      const Eigen::VectorXd sg = -0.5 * A.transpose() * r.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
      const double gn = sg.squaredNorm();
      if (gn == 0.0) break;
      const double target = f_best * (1.0 - 0.5 / std::sqrt(it + 1.0));
      const double step = (f - target) / gn;
      for (std::size_t k = 0; k < K; ++k) w[k] -= step * sg[static_cast<Eigen::Index>(k)];
      project_simplex(w);
    }
    out.weights = best_w;
    out.iterations = it;
  }
  out.value = half_l1(pr.p, A, out.weights);
  return out;
}

DiagMinimum diag_classical_refine(const DensityMatrix& rho, std::vector<double> grid, int max_rounds, double gap_tol) {
  if (grid.empty()) throw InvalidArgument("diag_classical_refine: empty energy grid");
  const DiagProblem pr = diag_problem(rho);
  DiagMinimum out;
  for (int round = 0;; ++round) {
    const Eigen::MatrixXd A = ring_matrix(grid, pr.cutoff);
    const LpOutcome lp = solve_diag_lp(pr.p, A);
    const auto [sup, arg] = ring_dual_sup(lp.y, pr.cutoff);
    out.grid = grid;
    out.weights = lp.weights;
    out.iterations += lp.iterations;
    out.value = half_l1(pr.p, A, lp.weights);
    out.dual_lower = std::max(0.0, lp.y.dot(pr.p) - sup);
    // A column with negative reduced cost exists iff sup + z > 0.
    if (out.value - out.dual_lower <= gap_tol || round >= max_rounds || sup + lp.z <= 1e-14) break;
    if (std::any_of(grid.begin(), grid.end(), [&](double e) { return std::abs(e - arg) <= 1e-13; })) break;
    grid.push_back(arg);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Saturation mechanism

SaturationCheck check_saturation(const FockVector& psi, const ClassicalEnsemble& sigma, double m, double prune_mass) {
  SaturationCheck out;
  const DensityMatrix s = sigma.realize(psi.trunc(), prune_mass);
  const ComplexVector v = s.matrix() * psi.amps();
  const Complex lambda = psi.amps().dot(v);
  out.eigen_residual = (v - lambda * psi.amps()).norm();
  const HusimiFunction q(outer(psi));
  constexpr int kSamples = 16;
  for (const auto& comp : sigma.components()) {
    const int groups = 1 + std::max(-1, *std::max_element(comp.phase_group.begin(), comp.phase_group.end()));
    const int samples = groups == 0 ? 1 : kSamples;
    for (int k = 0; k < samples; ++k) {
      CoherentPoint a = comp.alpha;
      for (std::size_t mode = 0; mode < a.alpha.size(); ++mode) {
        const int g = comp.phase_group[mode];
        if (g < 0) continue;
        // Group g visits the 16 phases in a different order than group 0, so joint phases vary too.
        const double phase = 2.0 * std::numbers::pi * std::fmod(k * (1.0 + g * std::numbers::phi), kSamples) / kSamples;
        a.alpha[mode] *= std::polar(1.0, phase);
      }
      out.q_deficit = std::max(out.q_deficit, m - q.value(a));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Report

std::optional<QSupremum> analytic_qsup(const StateDescription& d) {
  switch (d.kind) {
    case StateKind::number: {
      QSupremum q;
      q.method = QMethod::analytic;
      q.value = 1.0;
      CoherentPoint a;
      for (int n : d.ns) {
        q.value *= gamma_n(n);
        a.alpha.emplace_back(std::sqrt(static_cast<double>(n)), 0.0);
      }
      q.argmax.push_back(std::move(a));
      return q;
    }
    case StateKind::single_photon:
    case StateKind::noon:
      return noon_qmax_analytic(d.n, d.c);
    case StateKind::cat:
      return cat_qmax(d.cat);
    case StateKind::entangled_coherent: {
      QSupremum q = cat_qmax(d.cat);
      const AffineOptics T = AffineOptics::passive(beam_splitter(d.eta));
      for (auto& a : q.argmax) {
        a.alpha.emplace_back(0.0, 0.0);
        a = T.map(a);
      }
      return q;
    }
    case StateKind::coherent:
      return QSupremum{1.0, {CoherentPoint{d.alpha}}, QMethod::analytic, 0.0};
    default:
      return std::nullopt;
  }
}

namespace {

struct NamedWitness {
  std::string name;
  ClassicalEnsemble sigma;
};

/// Pure states whose description reduces to another family.
StateDescription normalized(const StateDescription& d) {
  if (d.kind == StateKind::vacuum_number_mixture && d.is_pure()) {
    StateDescription n = d;
    n.kind = StateKind::number;
    n.ns = {d.eta == 0.0 ? 0 : d.n};
    return n;
  }
  if (d.kind == StateKind::noon && d.n == 1) {
    StateDescription s = d;
    s.kind = StateKind::single_photon;
    return s;
  }
  return d;
}

std::vector<NamedWitness> pure_witnesses(const StateDescription& d) {
  std::vector<NamedWitness> out;
  switch (d.kind) {
    case StateKind::number: {
      std::vector<double> energies(d.ns.begin(), d.ns.end());
      out.push_back({"phase_randomized_product", ClassicalEnsemble::product_ring(energies)});
      break;
    }
    case StateKind::single_photon:
      out.push_back({"direction_ring", ClassicalEnsemble::direction_ring(CoherentPoint{d.c})});
      break;
    case StateKind::noon:
      out.push_back({"noon_ring_mixture", noon_classical_witness(d.n, d.modes())});
      break;
    case StateKind::cat:
    case StateKind::entangled_coherent: {
      const double astar = std::abs(cat_qmax(d.cat).argmax.front().alpha.front().real());
      std::vector<NamedWitness> single = {
          {"sigma_beta", cat_classical_witness(CatWitness::at_beta, d.cat)},
          {"sigma_alphastar", cat_classical_witness(CatWitness::at_alphastar, d.cat)},
          {"phase_randomized_alphastar_sq", phase_randomized_coherent(astar * astar)},
      };
      if (d.kind == StateKind::cat) return single;
      const AffineOptics T = AffineOptics::passive(beam_splitter(d.eta));
      const ClassicalEnsemble vac = ClassicalEnsemble::coherent(CoherentPoint::vacuum(1));
      for (auto& w : single) out.push_back({w.name, map_ensemble(T, w.sigma.tensor(vac))});
      break;
    }
    default:
      break;
  }
  return out;
}

double prune_for(const ReportConfig& cfg) { return cfg.prune_mass < 0.0 ? 0.5 * cfg.tail_tol : cfg.prune_mass; }

TruncationSpec working_truncation(const StateDescription& d, const ReportConfig& cfg, const std::vector<NamedWitness>& witnesses) {
  if (cfg.cutoff > 0) return TruncationSpec::uniform(d.modes(), cfg.cutoff, cfg.tail_tol);
  if (d.trunc) return d.trunc->with_tail_tol(std::min(d.trunc->tail_tol(), cfg.tail_tol));
  std::vector<int> cut = default_truncation(d, cfg.tail_tol).cutoffs();
  for (const auto& w : witnesses) {
    const auto need = sufficient_cutoffs(w.sigma, cfg.tail_tol);
    for (std::size_t m = 0; m < cut.size(); ++m) cut[m] = std::max(cut[m], need[m]);
  }
  return TruncationSpec(cut, cfg.tail_tol);
}

std::vector<CoherentPoint> witness_points(const std::vector<NamedWitness>& witnesses) {
  std::vector<CoherentPoint> out;
  for (const auto& w : witnesses) {
    for (const auto& c : w.sigma.components()) out.push_back(c.alpha.alpha.empty() ? c.alpha : c.alpha);
  }
  return out;
}

BoundReport report_classical(const StateDescription& d, const ReportConfig& cfg) {
  BoundReport r;
  const ClassicalEnsemble sigma = *classical_ensemble(d);
  const TruncationSpec trunc = working_truncation(d, cfg, {{"self", sigma}});
  const DensityMatrix rho = density(d, trunc);
  r.lowers.push_back({"zero", 0.0, provenance::kTrivial, std::nullopt});
  r.uppers.push_back(upper_witness(rho, sigma, "self", prune_for(cfg)));
  return r;
}

BoundReport report_pure(const StateDescription& d, const ReportConfig& cfg) {
  BoundReport r;
  const std::vector<NamedWitness> witnesses = pure_witnesses(d);
  const TruncationSpec trunc = working_truncation(d, cfg, witnesses);
  const FockVector psi = *pure_vector(d, trunc);
  const DensityMatrix rho = outer(psi);
  const std::optional<QSupremum> analytic = analytic_qsup(d);

  std::vector<CoherentPoint> hints = witness_points(witnesses);
  if (analytic) hints.insert(hints.end(), analytic->argmax.begin(), analytic->argmax.end());
  const QSupremum numeric = q_sup(rho, hints, cfg.qsup);

  // Lower bound: the largest credible m (the closed form when known). Upper bound: the numerically
  // attained value, which Q reaches at an explicit coherent state.
  QSupremum m_lower = numeric;
  if (analytic && analytic->value > numeric.value) m_lower = *analytic;
  r.lowers.push_back(lower_pure_q(m_lower));
  r.lowers.push_back({"zero", 0.0, provenance::kTrivial, std::nullopt});
  r.uppers.push_back(upper_q(numeric));
  const double prune = prune_for(cfg);
  for (const auto& w : witnesses) r.uppers.push_back(upper_witness(rho, w.sigma, w.name, prune));
  r.finalize();

  if (r.exact) {
    // Truncation cuts witness amplitudes by up to sqrt(tail), which bounds the attainable residual.
    const double residual_tol = 1e-9 + 10.0 * std::sqrt(trunc.tail_tol() + prune);
    r.saturation = false;
    for (const auto& w : witnesses) {
      const Bound* b = r.find(w.name);
      if (std::abs(b->value - r.best_upper) > 1e-9) continue;
      if (check_saturation(psi, w.sigma, m_lower.value, prune).holds(residual_tol, 1e-9)) {
        r.saturation = true;
        break;
      }
    }
    r.finalize();
  }
  return r;
}

std::vector<std::pair<double, StateDescription>> mixture_terms(const StateDescription& d) {
  std::vector<std::pair<double, StateDescription>> out;
  if (d.kind == StateKind::mixture) {
    for (std::size_t i = 0; i < d.children.size(); ++i) out.emplace_back(d.weights[i], d.children[i]);
  } else if (d.kind == StateKind::vacuum_number_mixture) {
    StateDescription vac;
    vac.kind = StateKind::number;
    vac.ns = {0};
    StateDescription num = vac;
    num.ns = {d.n};
    out.emplace_back(1.0 - d.eta, vac);
    out.emplace_back(d.eta, num);
  }
  return out;
}

BoundReport report_mixed(const StateDescription& d, const ReportConfig& cfg) {
  BoundReport r;
  const TruncationSpec trunc = working_truncation(d, cfg, {});
  const DensityMatrix rho = density(d, trunc);
  const QSupremum m = q_sup(rho, {}, cfg.qsup);
  r.lowers.push_back({"zero", 0.0, provenance::kTrivial, std::nullopt});
  r.lowers.push_back(lower_fidelity_rank(rho, m));
  r.uppers.push_back(upper_q(m));

  const auto terms = mixture_terms(d);
  if (!terms.empty()) {
    std::vector<std::pair<double, BoundReport>> parts;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& [w, child] = terms[i];
      ReportConfig child_cfg = cfg;
      child_cfg.cutoff = 0;
      BoundReport cr = report(child, child_cfg);
      parts.emplace_back(w, cr);
      if (w == 0.0) continue;
      const std::string ref = "term" + std::to_string(i);
      auto [lo, hi] = triangle_bounds(rho, density(child, trunc), cr.interval(), ref);
      r.lowers.push_back(lo);
      r.uppers.push_back(hi);
    }
    r.uppers.push_back(convexity_upper(parts));
  }

  if (trunc.modes() == 1 && rho.is_number_diagonal() && cfg.diag_rounds >= 0) {
    const DiagMinimum dm = diag_classical_refine(rho, default_energy_grid(rho.mean_photons()), cfg.diag_rounds);
    std::vector<std::pair<double, ClassicalEnsemble>> rings;
    for (std::size_t k = 0; k < dm.grid.size(); ++k) {
      if (dm.weights[k] > 0.0) rings.emplace_back(dm.weights[k], phase_randomized_coherent(dm.grid[k]));
    }
    r.uppers.push_back({"diag_rings[" + std::to_string(dm.grid.size()) + "]", dm.value, provenance::kDiagLp, ClassicalEnsemble::mixture(rings)});
    r.lowers.push_back({"diag_dual", dm.dual_lower, provenance::kDiagDual, std::nullopt});
  }
  return r;
}

BoundReport report_adjoin(const StateDescription& d, const ReportConfig& cfg) {
  BoundReport r;
  ReportConfig inner_cfg = cfg;
  inner_cfg.cutoff = 0;
  const BoundReport inner = report(d.children[0], inner_cfg);
  const ClassicalEnsemble anc = *classical_ensemble(d.children[1]);
  r.saturation = inner.saturation;
  for (const auto& b : inner.lowers) r.lowers.push_back({"adjoin:" + b.name, b.value, provenance::kAdjoin, std::nullopt});
  const Bound* best_witness = nullptr;
  for (const auto& b : inner.uppers) {
    Bound out{"adjoin:" + b.name, b.value, provenance::kAdjoin, std::nullopt};
    if (b.witness) {
      if (const auto* e = std::get_if<ClassicalEnsemble>(&*b.witness)) {
        out.witness = e->tensor(anc);
        if (!best_witness || b.value < best_witness->value) best_witness = &b;
      } else {
        CoherentPoint p = std::get<CoherentPoint>(*b.witness);
        if (anc.components().size() == 1 && anc.components().front().is_coherent_point()) {
          const auto& extra = anc.components().front().alpha.alpha;
          p.alpha.insert(p.alpha.end(), extra.begin(), extra.end());
          out.witness = p;
        }
      }
    }
    r.uppers.push_back(std::move(out));
  }
  // The product witness evaluated directly on the joint state.
  if (best_witness) {
    const ClassicalEnsemble joint = std::get<ClassicalEnsemble>(*best_witness->witness).tensor(anc);
    std::vector<NamedWitness> ws = {{"joint", joint}};
    StateDescription inner_desc = d.children[0];
    std::vector<NamedWitness> inner_ws = pure_witnesses(normalized(inner_desc));
    ws.insert(ws.end(), inner_ws.begin(), inner_ws.end());
    (void)ws;
    TruncationSpec t_inner = working_truncation(normalized(inner_desc), inner_cfg, inner_ws);
    {
      const auto need = sufficient_cutoffs(std::get<ClassicalEnsemble>(*best_witness->witness), cfg.tail_tol);
      std::vector<int> cut = t_inner.cutoffs();
      for (std::size_t m = 0; m < cut.size(); ++m) cut[m] = std::max(cut[m], need[m]);
      t_inner = TruncationSpec(cut, cfg.tail_tol);
    }
    const TruncationSpec t_anc(sufficient_cutoffs(anc, cfg.tail_tol), cfg.tail_tol);
    const DensityMatrix joint_rho = tensor(density(d.children[0], t_inner), density(d.children[1], t_anc));
    Bound direct = upper_witness(joint_rho, joint, "joint:" + best_witness->name, prune_for(cfg));
    r.uppers.push_back(std::move(direct));
  }
  return r;
}

}  // namespace

BoundReport report(const StateDescription& desc, const ReportConfig& config) {
  const StateDescription d = normalized(desc);
  BoundReport r;
  if (d.is_classical()) {
    r = report_classical(d, config);
  } else if (d.kind == StateKind::adjoin) {
    r = report_adjoin(d, config);
  } else if (d.is_pure()) {
    r = report_pure(d, config);
  } else {
    r = report_mixed(d, config);
  }
  r.state_id = desc.id.empty() ? canonical_id(desc) : desc.id;
  r.finalize();
  return r;
}

}  // namespace ncdist
