#include <doctest.h>

#include <cmath>

#include "ncdist/channels.hpp"
#include "ncdist/errors.hpp"
#include "ncdist/husimi.hpp"
#include "ncdist/metrics.hpp"
#include "ncdist/random_states.hpp"
#include "ncdist/states.hpp"

using namespace ncdist;

namespace {

// Textbook Tr sqrt(sqrt(rho) sigma sqrt(rho)) on dense matrices.
double textbook_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix sq = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  const ComplexMatrix inner = sq * sigma * sq;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es2((inner + inner.adjoint()) / 2.0);
  double f = 0.0;
  for (double l : es2.eigenvalues()) f += std::sqrt(std::max(l, 0.0));
  return f;
}

}  // namespace

TEST_CASE("trace_distance") {
  const auto t = TruncationSpec::uniform(1, 40);
  const auto vac = outer(number_state({0}, t));
  const auto one = outer(number_state({1}, t));
  CHECK(trace_distance(vac, vac) == 0.0);
  CHECK(trace_distance(vac, one) == doctest::Approx(1.0).epsilon(1e-15));
  const auto ring = realize_diag(phase_randomized_coherent(2.0), t);
  const double d = trace_distance(ring, outer(number_state({2}, t)));
  CHECK(d == doctest::Approx(1.0 - 2.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(d == doctest::Approx(0.7293294).epsilon(1e-7));
  CHECK_THROWS_AS((void)trace_distance(vac, outer(number_state({0}, TruncationSpec::uniform(1, 3)))), InvalidArgument);
}

TEST_CASE("trace_distance of commuting pairs is half the l1 distance") {
  const auto t = TruncationSpec::uniform(1, 30);
  const auto a = realize_diag(phase_randomized_coherent(1.3), t);
  const auto b = vacuum_number_mixture(3, 0.4, t);
  double l1 = 0.0;
  for (std::size_t i = 0; i < t.dimension(); ++i) l1 += std::abs(a.entry(i, i).real() - b.entry(i, i).real());
  CHECK(trace_distance(a, b) == doctest::Approx(0.5 * l1).epsilon(1e-14));
}

TEST_CASE("fidelity") {
  const auto t = TruncationSpec::uniform(1, 40);
  const auto cat = outer(cat_state({Parity::odd, 1.1}, t));
  CHECK(fidelity(cat, cat) == doctest::Approx(1.0).epsilon(1e-10));
  const auto ring = realize_diag(phase_randomized_coherent(1.0), t);
  CHECK(fidelity(outer(number_state({1}, t)), ring) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(fidelity(outer(coherent_amps({{0.0}}, t)), outer(coherent_amps({{1.0}}, t))) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("fidelity agrees with the textbook formula on random 5-dimensional states") {
  Rng rng(7);
  const auto t = TruncationSpec::uniform(1, 4);
  for (int k = 0; k < 20; ++k) {
    const auto rho = random_density(t, 1 + k % 5, rng);
    const auto sigma = random_density(t, 1 + (k + 2) % 5, rng);
    CHECK(fidelity(rho, sigma) == doctest::Approx(textbook_fidelity(rho.to_dense(), sigma.to_dense())).epsilon(1e-7));
    CHECK(std::abs(fidelity(rho, sigma) - fidelity(sigma, rho)) < 1e-9);
  }
}

TEST_CASE("fuchs_vdg_check") {
  const auto t = TruncationSpec::uniform(1, 40);
  const auto vac = outer(number_state({0}, t));
  const auto same = fuchs_vdg_check(vac, vac);
  CHECK(same.lower == doctest::Approx(0.0));
  CHECK(same.distance == doctest::Approx(0.0));
  CHECK(same.upper == doctest::Approx(0.0).epsilon(1e-6));
  const auto orth = fuchs_vdg_check(vac, outer(number_state({1}, t)));
  CHECK(orth.lower == doctest::Approx(1.0));
  CHECK(orth.distance == doctest::Approx(1.0));
  CHECK(orth.upper == doctest::Approx(1.0));
  const CatParams p{Parity::even, 1.0};
  const auto chain = fuchs_vdg_check(outer(cat_state(p, t)), cat_classical_witness(CatWitness::at_beta, p).realize(t));
  CHECK(chain.distance == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-10));
  CHECK(chain.lower <= chain.distance + 1e-9);
  CHECK(chain.distance <= chain.upper + 1e-9);
}

TEST_CASE("helstrom_saturation") {
  const auto t = TruncationSpec::uniform(1, 40);
  const auto vac = outer(number_state({0}, t));
  CHECK(helstrom_saturation(vac, vac) == doctest::Approx(0.0));
  CHECK(helstrom_saturation(vac, outer(number_state({1}, t))) == doctest::Approx(1.0));
  const auto two = outer(number_state({2}, t));
  const auto ring = realize_diag(phase_randomized_coherent(2.0), t);
  CHECK(helstrom_saturation(two, ring) == doctest::Approx(1.0 - 2.0 * std::exp(-2.0)).epsilon(1e-12));
  const auto cat = outer(cat_state({Parity::odd, 1.3}, t));
  CHECK(helstrom_saturation(cat, ring) == doctest::Approx(trace_distance(cat, ring)).epsilon(1e-9));
}

TEST_CASE("metric properties on random states") {
  Rng rng(11);
  const auto t = TruncationSpec::uniform(2, 3);
  for (int k = 0; k < 10; ++k) {
    const auto a = random_density(t, 2, rng);
    const auto b = random_density(t, 3, rng);
    const auto c = random_pure(t, rng);
    const auto cr = outer(c);
    CHECK(trace_distance(a, cr) <= trace_distance(a, b) + trace_distance(b, cr) + 1e-9);
    CHECK(std::abs(trace_distance(a, b) - trace_distance(b, a)) < 1e-12);
    for (int m = 0; m < 2; ++m) {
      const ComplexMatrix basis = random_unitary(static_cast<int>(t.dimension()), rng);
      CHECK(kolmogorov_distance(a, b, basis) <= trace_distance(a, b) + 1e-9);
    }
  }
}

TEST_CASE("unitary invariance") {
  Rng rng(3);
  const auto t = TruncationSpec::uniform(2, 12);
  const auto small = TruncationSpec::uniform(2, 3);
  const auto embed = [&](const DensityMatrix& r) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(t.dimension()), static_cast<Eigen::Index>(t.dimension()));
    const ComplexMatrix d = r.to_dense();
    for (std::size_t i = 0; i < small.dimension(); ++i)
      for (std::size_t j = 0; j < small.dimension(); ++j)
        m(static_cast<Eigen::Index>(t.index(small.multi_index(i))), static_cast<Eigen::Index>(t.index(small.multi_index(j)))) =
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return DensityMatrix::from_dense(t, m);
  };
  const auto a = embed(random_density(small, 2, rng));
  const auto b = embed(random_density(small, 1, rng));
  const auto op = passive_unitary(random_unitary(2, rng), t);
  CHECK(trace_distance(conjugate(op, a), conjugate(op, b)) == doctest::Approx(trace_distance(a, b)).epsilon(1e-9));
}
