#include <doctest.h>

#include <cmath>

#include "ncdist/bounds.hpp"
#include "ncdist/errors.hpp"
#include "ncdist/metrics.hpp"
#include "ncdist/state_io.hpp"
#include "ncdist/states.hpp"

using namespace ncdist;

namespace {

BoundReport report_of(const char* json) { return report(parse_state_description(json)); }

}  // namespace

TEST_CASE("lower_pure_q") {
  const auto t = TruncationSpec::uniform(1, 30);
  CHECK(lower_pure_q(number_state({1}, t)).value == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
  CHECK(lower_pure_q(number_state({1}, t)).value == doctest::Approx(0.6321).epsilon(1e-4));
  for (int n = 2; n <= 4; ++n) {
    const double s = 1.0 / std::sqrt(2.0);
    const auto chi = multimode_noon(n, {s, s}, TruncationSpec::uniform(2, n));
    CHECK(lower_pure_q(chi).value == doctest::Approx(1.0 - gamma_n(n) / 2.0).epsilon(1e-9));
  }
  CHECK(lower_pure_q(coherent_amps({{Complex(0.5, 0.5)}}, t)).value == doctest::Approx(0.0).epsilon(1e-10));
  SUBCASE("product rule") {
    const auto psi = cat_state({Parity::odd, 0.9}, t);
    const double m = q_sup(outer(psi)).value;
    CHECK(lower_pure_q(tensor(psi, psi)).value == doctest::Approx(1.0 - m * m).epsilon(1e-9));
  }
}

TEST_CASE("upper_q") {
  const auto t = TruncationSpec::uniform(1, 30);
  CHECK(upper_q(outer(coherent_amps({{0.8}}, t))).value == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(upper_q(outer(number_state({1}, t))).value == doctest::Approx(std::sqrt(1.0 - std::exp(-1.0))).epsilon(1e-10));
  CHECK(upper_q(outer(number_state({1}, t))).value == doctest::Approx(0.7951).epsilon(1e-4));
  CHECK(upper_q(cat_qmax({Parity::even, 0.5})).value == doctest::Approx(std::sqrt(1.0 - 1.0 / std::cosh(0.25))).epsilon(1e-12));
}

TEST_CASE("upper_witness") {
  const auto t = TruncationSpec::uniform(1, 40);
  CHECK(upper_witness(outer(number_state({1}, t)), phase_randomized_coherent(1.0)).value ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  const CatParams p{Parity::even, 2.0};
  const auto tc = TruncationSpec::uniform(1, cat_cutoff(p));
  CHECK(upper_witness(outer(cat_state(p, tc)), cat_classical_witness(CatWitness::at_beta, p)).value ==
        doctest::Approx((1.0 - std::exp(-8.0)) / 2.0).epsilon(1e-10));
  const auto t2 = TruncationSpec::uniform(2, 30);
  CHECK(upper_witness(outer(number_state({1, 1}, t2)), ClassicalEnsemble::product_ring({1.0, 1.0})).value ==
        doctest::Approx(0.8646647).epsilon(1e-7));
}

TEST_CASE("lower_mixed_fidelity") {
  const auto t = TruncationSpec::uniform(1, 40);
  const auto sigma = phase_randomized_coherent(1.5);
  CHECK(lower_mixed_fidelity(realize_diag(sigma, t), {sigma}).value == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(lower_mixed_fidelity(outer(number_state({2}, t)), {phase_randomized_coherent(2.0)}).value ==
        doctest::Approx(1.0 - std::sqrt(gamma_n(2))).epsilon(1e-10));
  std::vector<ClassicalEnsemble> family;
  for (double e : default_energy_grid(0.5)) family.push_back(phase_randomized_coherent(e));
  const auto rho = vacuum_number_mixture(1, 0.5, t);
  const auto b = lower_mixed_fidelity(rho, family);
  double best = 0.0;
  for (const auto& s : family) best = std::max(best, fidelity(rho, s.realize(t)));
  CHECK(b.value == doctest::Approx(1.0 - best).epsilon(1e-12));
  CHECK(b.provenance == provenance::kFidelityFamily);
}

TEST_CASE("lower_fidelity_rank") {
  const auto t = TruncationSpec::uniform(1, 30);
  const auto rho = vacuum_number_mixture(1, 0.5, t);
  const auto m = q_sup(rho);
  CHECK(lower_fidelity_rank(rho, m).value == doctest::Approx(std::max(0.0, 1.0 - std::sqrt(2.0 * m.value))).epsilon(1e-12));
}

TEST_CASE("triangle_bounds") {
  const auto t = TruncationSpec::uniform(1, 20);
  const auto rho = vacuum_number_mixture(1, 0.9, t);
  const auto same = triangle_bounds(rho, rho, {0.2, 0.4});
  CHECK(same.first.value == doctest::Approx(0.2));
  CHECK(same.second.value == doctest::Approx(0.4));
  const double d1 = 1.0 - std::exp(-1.0);
  const auto [lo, hi] = triangle_bounds(rho, outer(number_state({1}, t)), {d1, d1});
  CHECK(lo.value == doctest::Approx(0.9 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(lo.value == doctest::Approx(0.5321).epsilon(1e-4));
  CHECK(hi.value == doctest::Approx(d1 + 0.1).epsilon(1e-12));
}

TEST_CASE("convexity_upper") {
  BoundReport a;
  a.best_upper = 0.3;
  CHECK(convexity_upper({{1.0, a}}).value == doctest::Approx(0.3));
  BoundReport num;
  num.best_upper = 1.0 - gamma_n(2);
  BoundReport vac;
  vac.best_upper = 0.0;
  const auto b = convexity_upper({{0.5, num}, {0.5, vac}});
  CHECK(b.value == doctest::Approx(0.5 * (1.0 - 2.0 * std::exp(-2.0))).epsilon(1e-14));
  CHECK(b.value == doctest::Approx(0.3647).epsilon(1e-4));
  const auto r = report_of(R"({"kind":"vacuum_number_mixture","n":2,"eta":0.5})");
  REQUIRE(r.find("convexity") != nullptr);
  CHECK(r.find("convexity")->value == doctest::Approx(0.3646647).epsilon(1e-7));
}

TEST_CASE("diag_classical_minimize") {
  const auto t = TruncationSpec::uniform(1, 40);
  SUBCASE("exact match") {
    const auto res = diag_classical_minimize(realize_diag(phase_randomized_coherent(1.0), t), {0.0, 0.5, 1.0, 2.0});
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(res.weights[2] == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("number states") {
    for (int n = 1; n <= 4; ++n) {
      const auto res = diag_classical_minimize(outer(number_state({n}, t)), default_energy_grid(n));
      CHECK(res.value <= 1.0 - gamma_n(n) + 1e-12);
      CHECK(res.value == doctest::Approx(1.0 - gamma_n(n)).epsilon(1e-6));
      CHECK(res.dual_lower <= res.value + 1e-12);
    }
  }
  SUBCASE("mixture lands in the bracket") {
    std::vector<double> grid;
    for (int k = 0; k <= 16; ++k) grid.push_back(0.25 * k);
    const auto rho = vacuum_number_mixture(1, 0.3, t);
    for (auto method : {DiagMethod::simplex_lp, DiagMethod::subgradient}) {
      const auto res = diag_classical_minimize(rho, grid, method);
      CHECK(res.value >= std::max(0.0, 0.3 - std::exp(-1.0)) - 1e-12);
      CHECK(res.value <= 0.3 * (1.0 - std::exp(-1.0)) + 1e-12);
      double s = 0.0;
      std::vector<std::pair<double, ClassicalEnsemble>> terms;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        s += res.weights[k];
        if (res.weights[k] > 0.0) terms.emplace_back(res.weights[k], phase_randomized_coherent(grid[k]));
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      const auto wide = TruncationSpec::uniform(1, 60);
      CHECK(trace_distance(vacuum_number_mixture(1, 0.3, wide), ClassicalEnsemble::mixture(terms).realize(wide)) ==
            doctest::Approx(res.value).epsilon(1e-9));
    }
  }
  SUBCASE("refinement never increases the value") {
    const auto rho = vacuum_number_mixture(2, 0.6, t);
    const auto coarse = diag_classical_minimize(rho, {0.0, 1.0, 3.0});
    const auto refined = diag_classical_refine(rho, {0.0, 1.0, 3.0});
    CHECK(refined.value <= coarse.value + 1e-12);
    CHECK(refined.dual_lower <= refined.value + 1e-10);
    CHECK(refined.value - refined.dual_lower < 1e-9);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS((void)diag_classical_minimize(outer(number_state({1}, t)), {}), InvalidArgument);
    CHECK_THROWS_AS((void)diag_classical_minimize(outer(cat_state({Parity::even, 1.0}, t)), {1.0}), InvalidArgument);
  }
}

TEST_CASE("default_energy_grid") {
  const auto g = default_energy_grid(1.0);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(6.0));
  CHECK(std::is_sorted(g.begin(), g.end()));
  for (int k = 0; k <= 6; ++k) CHECK(std::find(g.begin(), g.end(), static_cast<double>(k)) != g.end());
}

TEST_CASE("report") {
  SUBCASE("|1,1> is exact") {
    const auto r = report_of(R"({"kind":"number","ns":[1,1]})");
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-9));
    CHECK(r.saturation == std::optional<bool>(true));
  }
  SUBCASE("equal N00N, n = 2, M = 4") {
    const auto r = report_of(R"({"kind":"noon","n":2,"c":[0.5,0.5,0.5,0.5]})");
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == doctest::Approx(1.0 - gamma_n(2) / 4.0).epsilon(1e-9));
  }
  SUBCASE("even cat beta = 1 is an interval") {
    const auto r = report_of(R"({"kind":"cat","parity":"even","beta":1})");
    CHECK_FALSE(r.exact.has_value());
    const auto m = cat_qmax({Parity::even, 1.0});
    CHECK(r.best_lower == doctest::Approx(1.0 - m.value).epsilon(1e-9));
    CHECK(r.best_upper <= (1.0 - std::exp(-2.0)) / 2.0 + 1e-12);
  }
  SUBCASE("coherent input is classical") {
    const auto r = report_of(R"({"kind":"coherent","alpha":[[1,0]]})");
    CHECK(r.best_lower == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.best_upper == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("linear optics invariance") {
    const auto noon = report_of(R"({"kind":"noon","n":2,"c":[0.7071067811865476,0.7071067811865476]})");
    const auto pair = report_of(R"({"kind":"number","ns":[1,1]})");
    REQUIRE(noon.exact.has_value());
    CHECK(*noon.exact == doctest::Approx(*pair.exact).epsilon(1e-9));
  }
  SUBCASE("adjoining a classical state leaves the bounds unchanged") {
    for (const char* inner : {R"({"kind":"number","ns":[1]})", R"({"kind":"cat","parity":"even","beta":1})"}) {
      const auto plain = report(parse_state_description(inner));
      const std::string joined = std::string(R"({"kind":"adjoin","state":)") + inner +
                                 R"(,"classical":{"kind":"phase_randomized","energy":1}})";
      const auto adj = report(parse_state_description(joined));
      CHECK(adj.best_lower == doctest::Approx(plain.best_lower).epsilon(1e-8));
      CHECK(adj.best_upper == doctest::Approx(plain.best_upper).epsilon(1e-8));
    }
  }
  SUBCASE("ordering holds across kinds") {
    for (const char* doc : {R"({"kind":"single_photon","c":[0.6,[0,0.8]]})", R"({"kind":"entangled_coherent","parity":"odd","beta":1.2,"eta":0.4})",
                            R"({"kind":"vacuum_number_mixture","n":3,"eta":0.7})", R"({"kind":"phase_randomized","energies":[1,2]})"}) {
      const auto r = report_of(doc);
      for (const auto& lo : r.lowers)
        for (const auto& up : r.uppers) CHECK(lo.value <= up.value + 1e-8);
      CHECK(r.best_lower >= 0.0);
      CHECK(r.best_upper < 1.0);
    }
  }
  SUBCASE("json field names") {
    const auto j = report_of(R"({"kind":"number","ns":[1]})").to_json();
    for (const char* key : {"state_id", "lowers", "uppers", "best_lower", "best_upper", "exact"}) CHECK(j.contains(key));
    CHECK(j["uppers"][0].contains("witness"));
    CHECK(j["lowers"][0]["provenance"] == provenance::kPureLower);
  }
  SUBCASE("finalize rejects crossed bounds") {
    BoundReport r;
    r.lowers.push_back({"a", 0.6, "test", std::nullopt});
    r.uppers.push_back({"b", 0.5, "test", std::nullopt});
    CHECK_THROWS_AS(r.finalize(), NumericalError);
  }
}

TEST_CASE("check_saturation") {
  const auto t = TruncationSpec::uniform(2, 30);
  const double s = 1.0 / std::sqrt(2.0);
  const auto chi = multimode_noon(2, {s, s}, t);
  const auto ok = check_saturation(chi, noon_classical_witness(2, 2), gamma_n(2) / 2.0);
  CHECK(ok.holds());
  const auto t1 = TruncationSpec::uniform(1, 40);
  const auto bad = check_saturation(cat_state({Parity::even, 1.0}, t1), phase_randomized_coherent(1.0), cat_qmax({Parity::even, 1.0}).value);
  CHECK_FALSE(bad.holds());
}
