#include <doctest.h>

#include <cmath>

#include "ncdist/channels.hpp"
#include "ncdist/errors.hpp"
#include "ncdist/husimi.hpp"
#include "ncdist/metrics.hpp"
#include "ncdist/state_io.hpp"
#include "ncdist/states.hpp"

using namespace ncdist;

namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double sigma_residual(const DensityMatrix& sigma, const FockVector& psi, double eigenvalue) {
  return (sigma.matrix() * psi.amps() - eigenvalue * psi.amps()).norm();
}

}  // namespace

TEST_CASE("number_state") {
  const auto t1 = TruncationSpec::uniform(1, 5);
  CHECK(std::abs(number_state({0}, t1).amps()[0] - 1.0) == 0.0);
  CHECK(std::abs(number_state({3}, t1).amps()[3] - 1.0) == 0.0);
  const int occ[] = {1, 1};
  CHECK(std::abs(number_state({1, 1}, TruncationSpec::uniform(2, 2)).amp(occ) - 1.0) == 0.0);
  CHECK_THROWS_AS((void)number_state({6}, t1), TruncationTooSmall);
}

TEST_CASE("single_photon_superposition") {
  const auto t = TruncationSpec::uniform(3, 1);
  const double r = 1.0 / std::sqrt(3.0);
  const std::vector<Complex> c{r, kI * r, -r};
  const auto psi = single_photon_superposition(c, t);
  const int a[] = {1, 0, 0}, b[] = {0, 1, 0}, d[] = {0, 0, 1};
  CHECK(std::abs(psi.amp(a) - c[0]) == 0.0);
  CHECK(std::abs(psi.amp(b) - c[1]) == 0.0);
  CHECK(std::abs(psi.amp(d) - c[2]) == 0.0);
  CHECK_THROWS_AS((void)single_photon_superposition({1.0, 1.0, 0.0}, t), InvalidArgument);
}

TEST_CASE("multimode_noon") {
  const auto t = TruncationSpec::uniform(2, 3);
  const double s = 1.0 / std::sqrt(2.0);
  const auto chi = multimode_noon(2, {s, s}, t);
  const int a[] = {2, 0}, b[] = {0, 2};
  CHECK(std::abs(chi.amp(a) - s) == 0.0);
  CHECK(std::abs(chi.amp(b) - s) == 0.0);
  const std::vector<Complex> c{0.6, 0.8 * kI};
  CHECK((multimode_noon(1, c, t).amps() - single_photon_superposition(c, t).amps()).norm() == 0.0);
  CHECK((multimode_noon(3, {1.0}, TruncationSpec::uniform(1, 3)).amps() - number_state({3}, TruncationSpec::uniform(1, 3)).amps()).norm() == 0.0);
}

TEST_CASE("cat_state") {
  SUBCASE("small-beta limits") {
    const auto t = TruncationSpec::uniform(1, 20);
    CHECK((cat_state({Parity::even, 1e-8}, t).amps() - number_state({0}, t).amps()).norm() < 1e-7);
    CHECK((cat_state({Parity::odd, 1e-4}, t).amps() - number_state({1}, t).amps()).norm() < 1e-6);
  }
  SUBCASE("parity sectors vanish exactly") {
    const CatParams p{Parity::odd, 1.7};
    const auto psi = cat_state(p, TruncationSpec::uniform(1, cat_cutoff(p)));
    for (Eigen::Index n = 0; n < psi.amps().size(); n += 2) CHECK(psi.amps()[n] == Complex(0.0));
    CHECK(psi.norm_defect() <= kDefaultTailTol);
  }
  SUBCASE("vacuum weight of the even cat") {
    const CatParams p{Parity::even, 1.0};
    const auto psi = cat_state(p, TruncationSpec::uniform(1, cat_cutoff(p)));
    CHECK(std::norm(psi.amps()[0]) == doctest::Approx(1.0 / std::cosh(1.0)).epsilon(1e-13));
  }
  SUBCASE("cutoff too small") {
    CHECK_THROWS_AS((void)cat_state({Parity::even, 4.0}, TruncationSpec::uniform(1, 4)), TruncationTooSmall);
  }
}

TEST_CASE("entangled_coherent") {
  const CatParams p{Parity::even, 2.0};
  const int n = cat_cutoff(p);
  const auto t1 = TruncationSpec::uniform(1, n);
  const auto t2 = TruncationSpec::uniform(2, n);
  const auto cat = cat_state(p, t1);
  const auto vac = number_state({0}, t1);
  CHECK((entangled_coherent(p, 1.0, t2).amps() - tensor(cat, vac).amps()).norm() < 1e-14);
  CHECK((entangled_coherent(p, 0.0, t2).amps() - tensor(vac, cat).amps()).norm() < 1e-14);
  for (double eta : {0.5, 0.2}) {
    const auto mixed = apply(passive_unitary(beam_splitter(eta), t2), tensor(cat, vac));
    CHECK(std::abs(overlap(mixed, entangled_coherent(p, eta, t2))) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("vacuum_number_mixture") {
  const auto t = TruncationSpec::uniform(1, 4);
  CHECK(max_abs_diff(vacuum_number_mixture(2, 0.0, t).to_dense(), outer(number_state({0}, t)).to_dense()) == 0.0);
  CHECK(max_abs_diff(vacuum_number_mixture(2, 1.0, t).to_dense(), outer(number_state({2}, t)).to_dense()) == 0.0);
  const double diag[] = {0.5, 0.5, 0.0, 0.0, 0.0};
  CHECK(max_abs_diff(vacuum_number_mixture(1, 0.5, t).to_dense(), DensityMatrix::diagonal(t, diag).to_dense()) == 0.0);
}

TEST_CASE("phase-randomized coherent state") {
  const auto t = TruncationSpec::uniform(1, 40);
  CHECK(std::abs(realize_diag(phase_randomized_coherent(0.0), t).entry(0, 0) - 1.0) == 0.0);
  const auto one = realize_diag(phase_randomized_coherent(1.0), t);
  CHECK(one.is_number_diagonal());
  CHECK(one.entry(0, 0).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(one.entry(1, 1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(one.entry(2, 2).real() == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-14));
  const auto three = realize_diag(phase_randomized_coherent(3.0), t);
  CHECK(three.entry(3, 3).real() == doctest::Approx(0.2240418).epsilon(1e-7));
  CHECK(three.entry(3, 3).real() == doctest::Approx(gamma_n(3)).epsilon(1e-14));
}

TEST_CASE("noon_classical_witness eigenvalue") {
  SUBCASE("M = 1 is the ring") {
    const auto t = TruncationSpec::uniform(1, 40);
    CHECK(max_abs_diff(noon_classical_witness(2, 1).realize(t).to_dense(), realize_diag(phase_randomized_coherent(2.0), t).to_dense()) < 1e-15);
  }
  SUBCASE("M = 2, n = 2") {
    const auto t = TruncationSpec::uniform(2, 30);
    const double s = 1.0 / std::sqrt(2.0);
    const auto sigma = noon_classical_witness(2, 2).realize(t);
    // gamma_2 = 2 e^{-2} ~ 0.2706706, so the eigenvalue gamma_2 / 2 is e^{-2}.
    CHECK(gamma_n(2) == doctest::Approx(0.2706706).epsilon(1e-7));
    CHECK(gamma_n(2) / 2.0 == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(sigma_residual(sigma, multimode_noon(2, {s, s}, t), gamma_n(2) / 2.0) < 1e-10);
  }
  SUBCASE("M = 3, arbitrary phases") {
    const auto t = TruncationSpec::uniform(3, 24);
    const double r = 1.0 / std::sqrt(3.0);
    const std::vector<Complex> c{r, r * std::polar(1.0, 0.7), r * std::polar(1.0, -2.1)};
    const auto sigma = noon_classical_witness(2, 3).realize(t);
    CHECK(sigma_residual(sigma, multimode_noon(2, c, t), gamma_n(2) / 3.0) < 1e-10);
  }
}

TEST_CASE("cat_classical_witness") {
  SUBCASE("eigencheck at beta = 1.5") {
    for (Parity par : {Parity::even, Parity::odd}) {
      const CatParams p{par, 1.5};
      const auto t = TruncationSpec::uniform(1, cat_cutoff(p));
      const auto sigma = cat_classical_witness(CatWitness::at_beta, p).realize(t);
      CHECK(sigma_residual(sigma, cat_state(p, t), p.norm() / 2.0) < 1e-10);
    }
  }
  SUBCASE("distance at beta = 2") {
    const CatParams p{Parity::even, 2.0};
    const auto t = TruncationSpec::uniform(1, cat_cutoff(p));
    const auto sigma = cat_classical_witness(CatWitness::at_beta, p).realize(t);
    const double d = trace_distance(outer(cat_state(p, t)), sigma);
    CHECK(d == doctest::Approx((1.0 - std::exp(-8.0)) / 2.0).epsilon(1e-10));
    CHECK(d == doctest::Approx(0.4998323).epsilon(1e-7));
  }
  SUBCASE("alpha* collapses to the vacuum for beta <= 1") {
    const auto w = cat_classical_witness(CatWitness::at_alphastar, {Parity::even, 0.9});
    const auto t = TruncationSpec::uniform(1, 10);
    CHECK(std::abs(w.realize(t).entry(0, 0) - 1.0) < 1e-15);
  }
}

TEST_CASE("realized ensembles are positive") {
  const auto t = TruncationSpec::uniform(2, 20);
  const auto sigma = ClassicalEnsemble::mixture({
      {0.3, ClassicalEnsemble::product_ring({1.0, 0.5})},
      {0.3, ClassicalEnsemble::direction_ring({{Complex(0.8, 0.1), Complex(-0.4, 0.6)}})},
      {0.4, ClassicalEnsemble::coherent({{Complex(0.2, -0.5), 1.1}})},
  });
  const auto rho = sigma.realize(t);
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-11));
  CHECK_NOTHROW(rho.check_positive());
  CHECK(spectral_decomposition(rho.to_dense()).eigenvalues.minCoeff() >= -1e-12);
}

TEST_CASE("parse_state") {
  SUBCASE("number") {
    const auto s = parse_state(R"({"kind":"number","ns":[1,1]})");
    REQUIRE(std::holds_alternative<FockVector>(s));
    const auto& v = std::get<FockVector>(s);
    const int occ[] = {1, 1};
    CHECK(std::abs(v.amp(occ) - 1.0) == 0.0);
  }
  SUBCASE("odd cat") {
    const auto s = parse_state(R"({"kind":"cat","parity":"odd","beta":1.2})");
    REQUIRE(std::holds_alternative<FockVector>(s));
    const CatParams p{Parity::odd, 1.2};
    const auto& v = std::get<FockVector>(s);
    CHECK(std::abs(std::abs(overlap(v, cat_state(p, v.trunc()))) - 1.0) < 1e-14);
  }
  SUBCASE("mixture") {
    const auto s = parse_state(
        R"({"kind":"mixture","terms":[{"w":0.5,"state":{"kind":"number","ns":[0]}},{"w":0.5,"state":{"kind":"number","ns":[2]}}]})");
    REQUIRE(std::holds_alternative<DensityMatrix>(s));
    const auto& rho = std::get<DensityMatrix>(s);
    CHECK(max_abs_diff(rho.to_dense(), vacuum_number_mixture(2, 0.5, rho.trunc()).to_dense()) < 1e-15);
  }
  SUBCASE("coherent is classical") {
    CHECK(std::holds_alternative<ClassicalEnsemble>(parse_state(R"({"kind":"coherent","alpha":[[1,0]]})")));
  }
  SUBCASE("explicit truncation") {
    const auto s = parse_state(R"({"kind":"number","ns":[2],"trunc":{"cutoffs":[7],"tail_tol":1e-10}})");
    CHECK(std::get<FockVector>(s).trunc().cutoff(0) == 7);
  }
  SUBCASE("schema errors carry a JSON pointer") {
    try {
      (void)parse_state(R"({"kind":"mixture","terms":[{"w":0.5,"state":{"kind":"cat","parity":"odd","beta":-1}}]})");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.pointer() == "/terms/0/state/beta");
    }
    CHECK_THROWS_AS((void)parse_state(R"({"kind":"squeezed"})"), SchemaError);
    CHECK_THROWS_AS((void)parse_state(R"({"ns":[1]})"), SchemaError);
    CHECK_THROWS_AS((void)parse_state(R"({"kind":"single_photon","c":[1,1]})"), SchemaError);
    CHECK_THROWS_AS((void)parse_state(R"({"kind":"mixture","terms":[{"w":0.5,"state":{"kind":"number","ns":[0]}}]})"), SchemaError);
  }
  SUBCASE("truncation too small") {
    CHECK_THROWS_AS((void)parse_state(R"({"kind":"cat","parity":"even","beta":3,"trunc":{"cutoffs":[5]}})"), TruncationTooSmall);
  }
}
