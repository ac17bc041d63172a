#include <doctest.h>

#include <cmath>

#include "ncdist/channels.hpp"
#include "ncdist/errors.hpp"
#include "ncdist/metrics.hpp"
#include "ncdist/random_states.hpp"
#include "ncdist/states.hpp"

using namespace ncdist;

namespace {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("apply_affine") {
  SUBCASE("identity") {
    const auto t = TruncationSpec::uniform(2, 10);
    const auto rho = outer(entangled_coherent({Parity::odd, 0.6}, 0.3, t));
    CHECK(max_abs_diff(apply_affine(AffineOptics::identity(2), rho).to_dense(), rho.to_dense()) < 1e-15);
  }
  SUBCASE("50:50 on |1,0>") {
    const auto t = TruncationSpec::uniform(2, 2);
    const auto out = apply_affine(AffineOptics::passive(beam_splitter(0.5)), outer(number_state({1, 0}, t)));
    ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(t.dimension()));
    const int a[] = {1, 0}, b[] = {0, 1};
    amps[static_cast<Eigen::Index>(t.index(a))] = amps[static_cast<Eigen::Index>(t.index(b))] = std::sqrt(0.5);
    CHECK(max_abs_diff(out.to_dense(), outer(FockVector(t, amps)).to_dense()) < 1e-15);
  }
  SUBCASE("beam splitter on cat and vacuum gives the entangled coherent state") {
    const CatParams p{Parity::even, 1.5};
    const auto t1 = TruncationSpec::uniform(1, cat_cutoff(p));
    const auto t2 = TruncationSpec::uniform(2, cat_cutoff(p));
    const auto in = outer(tensor(cat_state(p, t1), number_state({0}, t1)));
    for (double eta : {0.25, 0.5, 0.9}) {
      const auto out = apply_affine(AffineOptics::passive(beam_splitter(eta)), in);
      CHECK(max_abs_diff(out.to_dense(), outer(entangled_coherent(p, eta, t2)).to_dense()) < 1e-8);
    }
  }
  SUBCASE("coherent states map to U alpha + gamma") {
    const auto t = TruncationSpec::uniform(2, 24);
    const AffineOptics T(beam_splitter(0.4), {Complex(0.3, 0.1), Complex(-0.2, 0.4)});
    const CoherentPoint alpha{{Complex(0.5, -0.2), Complex(0.1, 0.7)}};
    const auto out = apply_affine(T, outer(coherent_amps(alpha, t)));
    CHECK(max_abs_diff(out.to_dense(), outer(coherent_amps(T.map(alpha), t)).to_dense()) < 1e-10);
    const auto pure = apply_affine(T, coherent_amps(alpha, t));
    CHECK(max_abs_diff(outer(pure).to_dense(), out.to_dense()) < 1e-12);
  }
  SUBCASE("leakage beyond the truncation") {
    const auto t = TruncationSpec::uniform(1, 6);
    const AffineOptics T(ComplexMatrix::Identity(1, 1), {Complex(3.0, 0.0)});
    CHECK_THROWS_AS((void)apply_affine(T, outer(number_state({0}, t))), TruncationTooSmall);
  }
  SUBCASE("non-unitary U") {
    CHECK_THROWS_AS(AffineOptics(ComplexMatrix::Constant(2, 2, 1.0), {0.0, 0.0}), InvalidArgument);
  }
}

TEST_CASE("dephase_number") {
  const auto t = TruncationSpec::uniform(1, 30);
  const auto diag = vacuum_number_mixture(2, 0.3, t);
  CHECK(max_abs_diff(dephase_number(diag).to_dense(), diag.to_dense()) == 0.0);
  const auto coh = dephase_number(outer(coherent_amps({{1.0}}, t)));
  CHECK(max_abs_diff(coh.to_dense(), realize_diag(phase_randomized_coherent(1.0), t).to_dense()) < 1e-15);
  const auto psi = cat_state({Parity::even, 1.0}, t);
  const auto deph = dephase_number(outer(psi));
  CHECK(deph.is_number_diagonal());
  for (std::size_t n = 0; n < t.dimension(); ++n)
    CHECK(std::abs(deph.entry(n, n).real() - std::norm(psi.amps()[static_cast<Eigen::Index>(n)])) < 1e-16);
  CHECK(max_abs_diff(dephase_number(deph).to_dense(), deph.to_dense()) == 0.0);
  CHECK(deph.trace() == outer(psi).trace());
}

TEST_CASE("adjoin") {
  const auto t = TruncationSpec::uniform(1, 4);
  const auto rho = outer(number_state({1}, t));
  const auto with_vac = adjoin(rho, ClassicalEnsemble::coherent(CoherentPoint::vacuum(1)), TruncationSpec::uniform(1, 3));
  CHECK(max_abs_diff(with_vac.to_dense(), tensor(rho, outer(number_state({0}, TruncationSpec::uniform(1, 3)))).to_dense()) == 0.0);

  const auto sigma = phase_randomized_coherent(1.0);
  const auto st = TruncationSpec::uniform(1, 30);
  const auto joined = adjoin(rho, sigma, st);
  for (int k = 0; k <= 30; ++k) {
    const int occ[] = {1, k};
    const auto i = joined.trunc().index(occ);
    CHECK(joined.entry(i, i).real() == doctest::Approx(std::exp(-1.0 + k * 0.0) * std::pow(1.0, k) / std::tgamma(k + 1.0)).epsilon(1e-13));
  }
  const int keep0[] = {0};
  CHECK(max_abs_diff(partial_trace(joined, keep0).to_dense(), rho.to_dense()) < 1e-12);
}

TEST_CASE("channels never increase the trace distance") {
  Rng rng(17);
  const auto t = TruncationSpec::uniform(2, 14);
  const auto small = TruncationSpec::uniform(2, 2);
  const auto embed = [&](const DensityMatrix& r) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(t.dimension()), static_cast<Eigen::Index>(t.dimension()));
    const ComplexMatrix d = r.to_dense();
    for (std::size_t i = 0; i < small.dimension(); ++i)
      for (std::size_t j = 0; j < small.dimension(); ++j)
        m(static_cast<Eigen::Index>(t.index(small.multi_index(i))), static_cast<Eigen::Index>(t.index(small.multi_index(j)))) =
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return DensityMatrix::from_dense(t, m);
  };
  for (int k = 0; k < 4; ++k) {
    const auto a = embed(random_density(small, 2, rng));
    const auto b = embed(random_density(small, 3, rng));
    const double d = trace_distance(a, b);
    const AffineOptics T(random_unitary(2, rng), {Complex(0.2, -0.1), Complex(0.0, 0.15)});
    CHECK(trace_distance(apply_affine(T, a), apply_affine(T, b)) <= d + 1e-8);
    CHECK(trace_distance(dephase_number(a), dephase_number(b)) <= d + 1e-8);
    const int keep[] = {1};
    CHECK(trace_distance(partial_trace(a, keep), partial_trace(b, keep)) <= d + 1e-8);
  }
}

TEST_CASE("classical ensembles map inside the family") {
  const auto t = TruncationSpec::uniform(2, 20);
  const auto sigma = ClassicalEnsemble::mixture({
      {0.5, ClassicalEnsemble::coherent({{Complex(0.4, 0.2), Complex(-0.1, 0.3)}})},
      {0.5, ClassicalEnsemble::direction_ring({{Complex(0.6, 0.0), Complex(0.0, 0.5)}})},
  });
  const auto passive = AffineOptics::passive(beam_splitter(0.35));
  CHECK(max_abs_diff(apply_affine(passive, sigma.realize(t)).to_dense(), map_ensemble(passive, sigma).realize(t).to_dense()) < 1e-9);
  const AffineOptics T(beam_splitter(0.35), {Complex(0.1, 0.0), Complex(0.0, -0.2)});
  const auto point = ClassicalEnsemble::coherent({{Complex(0.4, 0.2), Complex(-0.1, 0.3)}});
  CHECK(max_abs_diff(apply_affine(T, point.realize(t)).to_dense(), map_ensemble(T, point).realize(t).to_dense()) < 1e-9);
  // A displaced global ring is no longer a ring about the origin.
  CHECK_THROWS_AS((void)map_ensemble(T, sigma), InvalidArgument);
  const auto deph = dephase_number(sigma.realize(t));
  CHECK(max_abs_diff(deph.to_dense(), dephase_ensemble(sigma).realize(t).to_dense()) < 1e-12);
}

TEST_CASE("passive optics commutes with photon-number projection") {
  const auto t = TruncationSpec::uniform(2, 3);
  Rng rng(2);
  const auto rho = random_density(t, 2, rng, 6);
  const auto out = apply_affine(AffineOptics::passive(random_unitary(2, rng)), rho).to_dense();
  // Populations per total photon number are preserved.
  for (int n = 0; n <= 2; ++n) {
    double before = 0.0, after = 0.0;
    for (std::size_t i = 0; i < t.dimension(); ++i) {
      if (t.total_photons(i) != n) continue;
      before += rho.entry(i, i).real();
      after += out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
  }
}
