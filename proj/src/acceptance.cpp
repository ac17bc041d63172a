#include "ncdist/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "ncdist/bounds.hpp"
#include "ncdist/channels.hpp"
#include "ncdist/figures.hpp"
#include "ncdist/metrics.hpp"
#include "ncdist/random_states.hpp"

namespace ncdist {

const std::vector<std::string>& acceptance_groups() {
  static const std::vector<std::string> groups = {"number", "multimode", "single_photon", "noon",       "qsup",
                                                  "cat",    "eigen",     "mixture",       "properties", "determinism"};
  return groups;
}

const char* criterion_title(int criterion) {
  switch (criterion) {
    case 1:
      return "exact number-state distance";
    case 2:
      return "multimode number states";
    case 3:
      return "single-photon superpositions";
    case 4:
      return "multimode N00N states";
    case 5:
      return "q_sup oracle agreement";
    case 6:
      return "cat-state figure properties";
    case 7:
      return "eigenvector identities";
    case 8:
      return "mixture brackets";
    case 9:
      return "property suites";
    case 10:
      return "figure determinism";
    default:
      return "unknown";
  }
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::equal:
      return "==";
    case Relation::at_most:
      return "<=";
    case Relation::at_least:
      return ">=";
    case Relation::less:
      return "<";
  }
  return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

class Recorder {
 public:
  Recorder(int criterion, std::string group) : criterion_(criterion), group_(std::move(group)) {}

  void check(const std::string& name, Relation rel, double expected, double computed, double tol) {
    CheckResult r{criterion_, group_, name, rel, expected, computed, tol, false, {}};
    if (std::isfinite(computed) && std::isfinite(expected)) {
      switch (rel) {
        case Relation::equal:
          r.passed = std::abs(computed - expected) <= tol;
          break;
        case Relation::at_most:
          r.passed = computed <= expected + tol;
          break;
        case Relation::at_least:
          r.passed = computed >= expected - tol;
          break;
        case Relation::less:
          r.passed = computed < expected;
          break;
      }
    }
    results_.push_back(std::move(r));
  }

  void equal(const std::string& name, double expected, double computed, double tol) { check(name, Relation::equal, expected, computed, tol); }

  void truth(const std::string& name, bool ok) { check(name, Relation::equal, 1.0, ok ? 1.0 : 0.0, 0.0); }

  void failure(const std::string& name, const std::string& what) {
    CheckResult r{criterion_, group_, name, Relation::equal, 0.0, std::nan(""), 0.0, false, what};
    results_.push_back(std::move(r));
  }

  /// Runs body; an exception becomes a failed check instead of aborting the group.
  template <class F>
  void guarded(const std::string& name, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      failure(name, e.what());
    }
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  int criterion_;
  std::string group_;
  std::vector<CheckResult> results_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

StateDescription number_desc(const std::vector<int>& ns) {
  StateDescription d;
  d.kind = StateKind::number;
  d.ns = ns;
  return d;
}

StateDescription noon_desc(int n, const std::vector<Complex>& c) {
  StateDescription d;
  d.kind = n == 1 ? StateKind::single_photon : StateKind::noon;
  d.n = n;
  d.c = c;
  return d;
}

StateDescription cat_desc(Parity p, double beta) {
  StateDescription d;
  d.kind = StateKind::cat;
  d.cat = CatParams(p, beta);
  return d;
}

std::vector<Complex> uniform_phases(int modes, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  std::vector<Complex> c;
  for (int m = 0; m < modes; ++m) c.push_back(std::polar(1.0 / std::sqrt(static_cast<double>(modes)), u(rng)));
  return c;
}

double exact_or_nan(const BoundReport& r) { return r.exact ? *r.exact : std::nan(""); }

// ---------------------------------------------------------------------------------------------
// 1. Number states

std::vector<CheckResult> check_number(const AcceptanceOptions&) {
  Recorder rec(1, "number");
  for (int n = 1; n <= 6; ++n) {
    const std::string tag = "n=" + std::to_string(n);
    rec.guarded(tag, [&] {
      const double expected = 1.0 - gamma_n(n);
      const int cutoff = std::max(8 * n, poisson_sufficient_cutoff(n, 1e-14));
      const TruncationSpec trunc({cutoff}, 1e-14);
      const DensityMatrix ring = phase_randomized_coherent(n).realize(trunc);
      const DensityMatrix num = outer(number_state({n}, trunc));
      rec.equal("D(ring_n, |n>) " + tag + " cutoff=" + std::to_string(cutoff), expected, trace_distance(ring, num), 1e-10);
      ReportConfig cfg;
      cfg.cutoff = cutoff;
      const BoundReport r = report(number_desc({n}), cfg);
      rec.equal("report exact " + tag, expected, exact_or_nan(r), 1e-10);
    });
  }
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 2. Multimode number states

std::vector<CheckResult> check_multimode(const AcceptanceOptions&) {
  Recorder rec(2, "multimode");
  rec.guarded("|1,1>", [&] { rec.equal("delta(|1,1>)", 1.0 - std::exp(-2.0), exact_or_nan(report(number_desc({1, 1}))), 1e-10); });
  rec.guarded("partitions of 4", [&] {
    const std::vector<std::vector<int>> parts = {{4}, {2, 2}, {1, 1, 1, 1}};
    std::vector<double> values;
    for (const auto& p : parts) {
      double expected = 1.0;
      for (int n : p) expected *= gamma_n(n);
      expected = 1.0 - expected;
      const double v = exact_or_nan(report(number_desc(p)));
      rec.equal("delta(|" + join(p) + ">)", expected, v, 1e-10);
      values.push_back(v);
    }
    rec.check("delta(|1,1,1,1>) largest vs (4)", Relation::less, values[2], values[0], 0.0);
    rec.check("delta(|1,1,1,1>) largest vs (2,2)", Relation::less, values[2], values[1], 0.0);
  });
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 3. Single-photon superpositions

std::vector<CheckResult> check_single_photon(const AcceptanceOptions& o) {
  Recorder rec(3, "single_photon");
  Rng rng(o.seed);
  ReportConfig cfg;
  cfg.tail_tol = 1e-10;
  for (int modes : {2, 3, 5}) {
    for (int k = 0; k < 5; ++k) {
      const std::string tag = "M=" + std::to_string(modes) + " #" + std::to_string(k + 1);
      const auto c = random_coefficients(modes, rng);
      rec.guarded(tag, [&] { rec.equal("delta " + tag, 1.0 - std::exp(-1.0), exact_or_nan(report(noon_desc(1, c), cfg)), 1e-8); });
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 4. Multimode N00N states

std::vector<CheckResult> check_noon(const AcceptanceOptions& o) {
  Recorder rec(4, "noon");
  Rng rng(o.seed + 4);
  for (const auto& [n, modes] : std::vector<std::pair<int, int>>{{2, 2}, {2, 4}, {3, 3}}) {
    const std::string tag = "(n,M)=(" + std::to_string(n) + "," + std::to_string(modes) + ")";
    rec.guarded(tag, [&] {
      const double expected = 1.0 - gamma_n(n) / modes;
      const BoundReport r = report(noon_desc(n, uniform_phases(modes, rng)));
      const Bound* w = r.find("noon_ring_mixture");
      const Bound* q = r.find("q_lower");
      rec.equal("witness distance " + tag, expected, w ? w->value : std::nan(""), 1e-9);
      rec.equal("Q lower bound " + tag, expected, q ? q->value : std::nan(""), 1e-9);
    });
  }
  rec.guarded("chi_2", [&] {
    const double d11 = exact_or_nan(report(number_desc({1, 1})));
    for (double theta : {0.0, kPi / 3.0, kPi}) {
      const std::vector<Complex> c = {1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), theta)};
      rec.equal("delta(chi_2, theta=" + fmt(theta) + ") vs delta(|1,1>)", d11, exact_or_nan(report(noon_desc(2, c))), 1e-9);
    }
    // The invariance itself: a balanced beam splitter takes |1,1> to a two-photon N00N state.
    const TruncationSpec trunc = TruncationSpec::uniform(2, 2);
    const FockVector out = apply_affine(AffineOptics::passive(beam_splitter(0.5)), number_state({1, 1}, trunc));
    const FockVector chi = multimode_noon(2, {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}, trunc);
    rec.equal("|<chi_2|BS(1/2)|1,1>|", 1.0, std::abs(overlap(chi, out)), 1e-12);
  });
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 5. q_sup oracles

std::vector<CheckResult> check_qsup(const AcceptanceOptions& o) {
  Recorder rec(5, "qsup");
  Rng rng(o.seed + 5);
  std::vector<std::pair<std::string, StateDescription>> corpus;
  for (const auto& ns : std::vector<std::vector<int>>{{1}, {2}, {3}, {5}, {1, 1}, {2, 1}, {1, 2, 1}}) corpus.emplace_back("number " + join(ns), number_desc(ns));
  const double s = 1.0 / std::sqrt(2.0);
  corpus.emplace_back("noon n=2 M=2", noon_desc(2, {s, s}));
  corpus.emplace_back("noon n=3 c=(0.6,0.8)", noon_desc(3, {0.6, 0.8}));
  corpus.emplace_back("noon n=2 M=3 random", noon_desc(2, random_coefficients(3, rng)));
  corpus.emplace_back("noon n=4 c=(1,i)/sqrt2", noon_desc(4, {s, Complex(0.0, s)}));
  corpus.emplace_back("noon n=2 M=4 phases", noon_desc(2, uniform_phases(4, rng)));
  corpus.emplace_back("single photon c=(0.6,0.8i)", noon_desc(1, {0.6, Complex(0.0, 0.8)}));
  corpus.emplace_back("single photon M=3 random", noon_desc(1, random_coefficients(3, rng)));
  for (const auto& [p, b] : std::vector<std::pair<Parity, double>>{
           {Parity::even, 0.5}, {Parity::even, 1.5}, {Parity::even, 2.5}, {Parity::odd, 0.3}, {Parity::odd, 1.0}, {Parity::odd, 2.0}}) {
    corpus.emplace_back(std::string(to_string(p)) + " cat beta=" + fmt(b), cat_desc(p, b));
  }
  QSupOptions qo;
  qo.seed = o.seed;
  for (const auto& [name, d] : corpus) {
    rec.guarded(name, [&] {
      const double analytic = analytic_qsup(d)->value;
      const DensityMatrix rho = density(d, default_truncation(d));
      rec.equal("q_sup " + name, analytic, q_sup(rho, {}, qo).value, 1e-7);
    });
  }
  // Brute-force grid search over a disk of radius sqrt(E) + 3.
  Rng prng(o.seed + 55);
  std::vector<std::pair<std::string, DensityMatrix>> grid_states;
  grid_states.emplace_back("number 1", outer(number_state({1}, TruncationSpec({1}))));
  grid_states.emplace_back("number 3", outer(number_state({3}, TruncationSpec({3}))));
  grid_states.emplace_back("even cat beta=1.5", density(cat_desc(Parity::even, 1.5), default_truncation(cat_desc(Parity::even, 1.5))));
  grid_states.emplace_back("odd cat beta=1", density(cat_desc(Parity::odd, 1.0), default_truncation(cat_desc(Parity::odd, 1.0))));
  grid_states.emplace_back("random pure, support 4", outer(random_pure(TruncationSpec({3}), prng)));
  for (const auto& [name, rho] : grid_states) {
    rec.guarded("grid " + name, [&] {
      const HusimiFunction q(rho);
      const double radius = std::sqrt(rho.mean_photons()) + 3.0;
      constexpr int kPoints = 401;
      double best = 0.0;
      for (int i = 0; i < kPoints; ++i) {
        for (int j = 0; j < kPoints; ++j) {
          const double x = -radius + 2.0 * radius * i / (kPoints - 1);
          const double y = -radius + 2.0 * radius * j / (kPoints - 1);
          if (x * x + y * y > radius * radius) continue;
          best = std::max(best, q.value(CoherentPoint{{Complex(x, y)}}));
        }
      }
      const double m = q_sup(rho, {}, qo).value;
      rec.equal("q_sup vs grid " + name, best, m, 1e-4);
      rec.check("grid <= q_sup " + name, Relation::at_most, m, best, 1e-12);
    });
  }
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 6. Cat-state figures

std::vector<CheckResult> check_cat(const AcceptanceOptions& o) {
  Recorder rec(6, "cat");
  FigureOptions fo;
  fo.seed = o.seed;
  rec.guarded("fig1", [&] {
    const FigureTable t = figure_table(FigureKind::fig1, fo);
    const auto cb = t.column("beta");
    const auto cub = t.column("ub_q");
    const auto clb = t.column("lb_q");
    const auto cs = t.column("d_sigma_beta");
    const auto ca = t.column("d_sigma_alphastar");
    for (const auto& row : t.rows) {
      const double b = row[cb];
      const std::string at = " at beta=" + fmt(b);
      if (b <= 0.65 + 1e-12) rec.check("(a) ub_q < d_sigma_beta" + at, Relation::less, row[cs], row[cub], 0.0);
      if (b >= 0.75 - 1e-12) rec.check("(a) d_sigma_beta < ub_q" + at, Relation::less, row[cub], row[cs], 0.0);
      if (b >= 1.2 - 1e-12) rec.check("(b) d_sigma_beta - lb_q" + at, Relation::at_most, 5e-3, row[cs] - row[clb], 0.0);
      const double cap = (1.0 - std::exp(-2.0 * b * b)) / 2.0;
      rec.check("(c) best even-cat upper" + at, Relation::at_most, cap, std::min({row[cub], row[cs], row[ca]}), 1e-9);
      rec.equal("(c) d_sigma_beta closed form" + at, cap, row[cs], 1e-9);
      rec.check("(c) closed form <= 1/2" + at, Relation::at_most, 0.5, cap, 0.0);
    }
  });
  rec.guarded("fig2", [&] {
    const FigureTable t = figure_table(FigureKind::fig2, fo);
    for (const auto& row : t.rows) {
      double best = 1.0;
      for (const char* c : {"ub_q", "d_sigma_beta", "d_sigma_alphastar", "d_phase_randomized"}) best = std::min(best, row[t.column(c)]);
      rec.check("odd-cat best upper at beta=" + fmt(row[t.column("beta")]), Relation::at_most, 0.66, best, 0.0);
    }
    ReportConfig cfg;
    cfg.qsup.seed = o.seed;
    const BoundReport r = report(cat_desc(Parity::odd, 1e-3), cfg);
    rec.equal("odd-cat lower bound at beta=1e-3", 1.0 - std::exp(-1.0), r.find("q_lower")->value, 1e-4);
  });
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 7. Eigenvector identities

void eigen_check(Recorder& rec, const std::string& tag, const FockVector& psi, const DensityMatrix& sigma, double expected) {
  const ComplexVector v = sigma.matrix() * psi.amps();
  const Complex lambda = psi.amps().dot(v);
  rec.equal("eigenvalue " + tag, expected, lambda.real(), 1e-10);
  rec.equal("eigen residual " + tag, 0.0, (v - lambda * psi.amps()).norm(), 1e-10);
}

std::vector<CheckResult> check_eigen(const AcceptanceOptions&) {
  Recorder rec(7, "eigen");
  constexpr double kTail = 1e-24;
  for (double beta : {0.5, 1.0, 2.0}) {
    for (Parity p : {Parity::even, Parity::odd}) {
      const std::string tag = std::string(to_string(p)) + " beta=" + fmt(beta);
      rec.guarded(tag, [&] {
        const CatParams cp(p, beta);
        const TruncationSpec trunc({poisson_sufficient_cutoff(beta * beta, kTail)}, kTail);
        const DensityMatrix sigma = cat_classical_witness(CatWitness::at_beta, cp).realize(trunc);
        eigen_check(rec, "sigma_beta psi " + tag, cat_state(cp, trunc), sigma, cp.norm() / 2.0);
      });
    }
  }
  rec.guarded("noon (2,3)", [&] {
    const TruncationSpec trunc({poisson_sufficient_cutoff(2.0, kTail), poisson_sufficient_cutoff(2.0, kTail), poisson_sufficient_cutoff(2.0, kTail)}, kTail);
    const double s = 1.0 / std::sqrt(3.0);
    const FockVector psi = multimode_noon(2, {s, s, s}, trunc);
    eigen_check(rec, "noon witness (n,M)=(2,3)", psi, noon_classical_witness(2, 3).realize(trunc), gamma_n(2) / 3.0);
  });
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 8. Vacuum/number mixtures

std::vector<CheckResult> check_mixture(const AcceptanceOptions&) {
  Recorder rec(8, "mixture");
  for (int n = 1; n <= 4; ++n) {
    for (int k = 0; k <= 20; ++k) {
      const double eta = k / 20.0;
      const std::string tag = "n=" + std::to_string(n) + " eta=" + fmt(eta);
      rec.guarded(tag, [&] {
        const DensityMatrix rho = vacuum_number_mixture(n, eta, TruncationSpec({n}));
        const DiagMinimum dm = diag_classical_minimize(rho, default_energy_grid(rho.mean_photons()));
        const double g = gamma_n(n);
        rec.check("LP >= max(0, eta - gamma_n) " + tag, Relation::at_least, std::max(0.0, eta - g), dm.value, 1e-6);
        rec.check("LP <= eta (1 - gamma_n) " + tag, Relation::at_most, eta * (1.0 - g), dm.value, 1e-6);
        if (k == 20) rec.equal("LP at eta=1 " + tag, 1.0 - g, dm.value, 1e-6);
      });
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 9. Property suites

std::vector<CheckResult> check_properties(const AcceptanceOptions& o) {
  Recorder rec(9, "properties");
  Rng rng(o.seed + 9);
  const TruncationSpec t1({5});
  // Fuchs-van de Graaf chain on 50 pairs (half pure, where the upper end is attained).
  rec.guarded("fuchs_vdg", [&] {
    int ok = 0;
    double worst_pure = 0.0;
    for (int i = 0; i < 50; ++i) {
      const bool pure = i % 2 == 0;
      const DensityMatrix a = pure ? outer(random_pure(t1, rng)) : random_density(t1, 1 + i % 4, rng);
      const DensityMatrix b = pure ? outer(random_pure(t1, rng)) : random_density(t1, 1 + (i / 2) % 4, rng);
      const FuchsVdgChain c = fuchs_vdg_check(a, b);
      ok += c.lower <= c.distance + 1e-9 && c.distance <= c.upper + 1e-9 ? 1 : 0;
      if (pure) worst_pure = std::max(worst_pure, std::abs(c.distance - c.upper));
    }
    rec.equal("fuchs_vdg chain holds (pairs)", 50.0, ok, 0.0);
    rec.equal("pure pairs: D = sqrt(1 - F^2) (worst)", 0.0, worst_pure, 1e-9);
  });
  rec.guarded("helstrom", [&] {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const DensityMatrix a = random_density(t1, 1 + i % 6, rng);
      const DensityMatrix b = random_density(t1, 1 + (i + 3) % 6, rng);
      worst = std::max(worst, std::abs(helstrom_saturation(a, b) - trace_distance(a, b)));
    }
    rec.equal("helstrom saturation (worst of 20)", 0.0, worst, 1e-9);
  });
  // Monotonicity under each channel.
  const TruncationSpec t2({6, 6});
  const TruncationSpec big({30});
  const AffineOptics bs = AffineOptics::passive(random_unitary(2, rng));
  const AffineOptics disp(ComplexMatrix::Identity(1, 1), {Complex(0.3, -0.2)});
  const ClassicalEnsemble ancilla = phase_randomized_coherent(0.7);
  const std::vector<int> keep = {0};
  struct Channel {
    std::string name;
    TruncationSpec trunc;
    int support;
    std::function<DensityMatrix(const DensityMatrix&)> apply;
  };
  const std::vector<Channel> channels = {
      {"dephase_number", t2, 0, [](const DensityMatrix& r) { return dephase_number(r); }},
      {"passive unitary", t2, 6, [&](const DensityMatrix& r) { return apply_affine(bs, r); }},
      {"displacement", big, 4, [&](const DensityMatrix& r) { return apply_affine(disp, r); }},
      {"partial trace", t2, 0, [&](const DensityMatrix& r) { return partial_trace(r, keep); }},
      {"adjoin ring", t1, 0, [&](const DensityMatrix& r) { return adjoin(r, ancilla); }},
  };
  for (const auto& ch : channels) {
    rec.guarded(ch.name, [&] {
      double worst = -1.0;
      for (int i = 0; i < 20; ++i) {
        const DensityMatrix a = random_density(ch.trunc, 1 + i % 3, rng, ch.support);
        const DensityMatrix b = random_density(ch.trunc, 1 + (i + 1) % 3, rng, ch.support);
        worst = std::max(worst, trace_distance(ch.apply(a), ch.apply(b)) - trace_distance(a, b));
      }
      rec.check("monotone under " + ch.name + " (worst increase of 20)", Relation::at_most, 0.0, worst, 1e-8);
    });
  }
  rec.guarded("dephase idempotence", [&] {
    bool same = true;
    for (int i = 0; i < 10; ++i) {
      const DensityMatrix once = dephase_number(random_density(t2, 3, rng));
      const DensityMatrix twice = dephase_number(once);
      same = same && once.to_dense() == twice.to_dense();
    }
    rec.truth("dephase_number idempotent (exact, 10 states)", same);
  });
  rec.guarded("product rule", [&] {
    QSupOptions qo;
    qo.seed = o.seed;
    for (const auto& [name, d] : std::vector<std::pair<std::string, StateDescription>>{
             {"|1>", number_desc({1})}, {"odd cat beta=1", cat_desc(Parity::odd, 1.0)}, {"even cat beta=1.5", cat_desc(Parity::even, 1.5)}}) {
      const FockVector psi = *pure_vector(d, default_truncation(d));
      const double m = q_sup(outer(psi), {}, qo).value;
      const double m2 = q_sup(outer(tensor(psi, psi)), {}, qo).value;
      rec.equal("m(psi x psi) = m(psi)^2 for " + name, m * m, m2, 1e-9);
    }
  });
  rec.guarded("stirling", [&] {
    int ok = 0;
    for (int n = 1; n <= 200; ++n) {
      const double base = 1.0 / std::sqrt(2.0 * kPi * n);
      const double lo = base * std::exp(-1.0 / (12.0 * n));
      const double hi = base * std::exp(-1.0 / (12.0 * n + 1.0));
      const double g = gamma_n(n);
      ok += lo * (1.0 - 1e-12) <= g && g <= hi * (1.0 + 1e-12) ? 1 : 0;
    }
    rec.equal("gamma_n within Stirling squeeze (n <= 200)", 200.0, ok, 0.0);
  });
  return rec.take();
}

// ---------------------------------------------------------------------------------------------
// 10. Determinism

std::vector<CheckResult> check_determinism(const AcceptanceOptions& o) {
  Recorder rec(10, "determinism");
  FigureOptions fo;
  fo.seed = o.seed;
  for (FigureKind k : {FigureKind::fig1, FigureKind::fig2, FigureKind::fig3}) {
    rec.guarded(to_string(k), [&] {
      const std::string a = to_csv(figure_table(k, fo));
      const std::string b = to_csv(figure_table(k, fo));
      rec.truth(std::string(to_string(k)) + " CSV byte-identical across runs", a == b);
    });
  }
  return rec.take();
}

}  // namespace

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options) {
  const auto& groups = acceptance_groups();
  for (const auto& g : options.only) {
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) throw InvalidArgument("unknown acceptance group '" + g + "'");
  }
  using Runner = std::vector<CheckResult> (*)(const AcceptanceOptions&);
  const std::vector<Runner> runners = {check_number, check_multimode, check_single_photon, check_noon,       check_qsup,
                                       check_cat,    check_eigen,     check_mixture,       check_properties, check_determinism};
  std::vector<CheckResult> all;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!options.only.empty() && !options.only.count(groups[i])) continue;
    auto results = runners[i](options);
    if (options.on_group) options.on_group(groups[i], results);
    all.insert(all.end(), results.begin(), results.end());
  }
  return all;
}

std::vector<CriterionSummary> summarize(const std::vector<CheckResult>& results) {
  std::vector<CriterionSummary> out;
  for (int c = 1; c <= static_cast<int>(acceptance_groups().size()); ++c) {
    CriterionSummary s;
    s.criterion = c;
    for (const auto& r : results) {
      if (r.criterion != c) continue;
      ++s.total;
      if (r.passed) {
        ++s.passed;
      } else if (!s.first_failure) {
        s.first_failure = r;
      }
    }
    if (s.total > 0) out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string describe(const CheckResult& r) {
  if (!r.note.empty()) return r.name + ": " + r.note;
  char buf[160];
  std::snprintf(buf, sizeof buf, ": computed %.12g, expected %s %.12g (tol %.1e)", r.computed, to_string(r.relation), r.expected, r.tolerance);
  return r.name + buf;
}

}  // namespace

std::string summary_line(const CriterionSummary& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %2d %s (%d/%d checks)", s.ok() ? "PASS" : "FAIL", s.criterion, criterion_title(s.criterion), s.passed, s.total);
  std::string line = buf;
  if (s.first_failure) line += "; first failure: " + describe(*s.first_failure);
  return line;
}

std::string check_line(const CheckResult& r) { return std::string(r.passed ? "PASS" : "FAIL") + "  [" + r.group + "] " + describe(r); }

}  // namespace ncdist
