#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ncdist/errors.hpp"
#include "ncdist/fock.hpp"
#include "ncdist/states.hpp"

using namespace ncdist;

namespace {

constexpr Complex kI{0.0, 1.0};

TruncationSpec one_mode(int n, double tail = kDefaultTailTol) { return TruncationSpec::uniform(1, n, tail); }
TruncationSpec two_mode(int n, double tail = kDefaultTailTol) { return TruncationSpec::uniform(2, n, tail); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("multi-index layout is row-major with mode 1 slowest") {
  const auto t = TruncationSpec::uniform(2, 3);
  const int occ[] = {1, 2};
  CHECK(t.dimension() == 16);
  CHECK(t.index(occ) == 1 * 4 + 2);
  CHECK(t.multi_index(6) == std::vector<int>{1, 2});
  CHECK(t.total_photons(6) == 3);
}

TEST_CASE("coherent_amps") {
  SUBCASE("vacuum") {
    const auto v = coherent_amps({{0.0}}, one_mode(4));
    CHECK(std::abs(v.amps()[0] - 1.0) == 0.0);
    for (int n = 1; n <= 4; ++n) CHECK(std::abs(v.amps()[n]) == 0.0);
    CHECK(v.norm_defect() == 0.0);
  }
  SUBCASE("alpha = 1") {
    const auto v = coherent_amps({{1.0}}, one_mode(20));
    double fact = 1.0;
    for (int n = 0; n <= 20; ++n) {
      if (n > 0) fact *= n;
      CHECK(v.amps()[n].real() == doctest::Approx(std::exp(-0.5) / std::sqrt(fact)).epsilon(1e-14));
    }
    CHECK(v.amps()[0].real() == doctest::Approx(0.6065307).epsilon(1e-7));
  }
  SUBCASE("two modes (1, i)") {
    const auto v = coherent_amps({{1.0, kI}}, two_mode(24));
    const int occ[] = {1, 1};
    CHECK(std::abs(v.amp(occ) - std::exp(-1.0) * kI) < 1e-15);
  }
  SUBCASE("norm defect equals the Poisson tail") {
    for (double a : {0.5, 1.0, 2.0, 3.0}) {
      const int n = poisson_sufficient_cutoff(a * a, 1e-12);
      const auto v = coherent_amps({{a}}, one_mode(n));
      CHECK(std::abs(v.norm_defect() - poisson_tail(a * a, n)) < 1e-12);
    }
  }
  SUBCASE("too small a cutoff reports sufficient cutoffs") {
    try {
      (void)coherent_amps({{3.0}}, one_mode(5));
      FAIL("expected TruncationTooSmall");
    } catch (const TruncationTooSmall& e) {
      REQUIRE(e.sufficient_cutoffs().size() == 1);
      CHECK(e.sufficient_cutoffs()[0] == poisson_sufficient_cutoff(9.0, kDefaultTailTol));
    }
  }
}

TEST_CASE("poisson_tail") {
  CHECK(poisson_tail(0.0, 0) == 0.0);
  CHECK(poisson_tail(1.0, 0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(poisson_tail(1.0, 1) == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(poisson_tail(4.0, 40) < 1e-20);
  CHECK(poisson_tail(4.0, 40) >= 0.0);
  CHECK(default_cutoff(1.0) == 29);
}

TEST_CASE("overlap") {
  const auto t = one_mode(30);
  const auto a = coherent_amps({{1.0}}, t);
  CHECK(std::abs(overlap(a, a) - 1.0) < 1e-12);
  CHECK(std::abs(overlap(number_state({0}, t), a) - std::exp(-0.5)) < 1e-15);
  CHECK(std::abs(overlap(number_state({1}, t), number_state({2}, t))) == 0.0);
  const auto b = coherent_amps({{kI}}, t);
  CHECK(std::abs(overlap(a, b) - std::conj(overlap(b, a))) < 1e-15);
  CHECK_THROWS_AS((void)overlap(a, number_state({0}, one_mode(4))), InvalidArgument);
}

TEST_CASE("outer") {
  const auto t = one_mode(3);
  CHECK(std::abs(outer(number_state({0}, t)).entry(0, 0) - 1.0) == 0.0);
  const auto one = outer(number_state({1}, t));
  CHECK(std::abs(one.entry(1, 1) - 1.0) == 0.0);
  CHECK(one.matrix().nonZeros() == 1);
  ComplexVector amps = ComplexVector::Zero(4);
  amps[0] = amps[1] = 1.0 / std::sqrt(2.0);
  const auto plus = outer(FockVector(t, amps)).to_dense();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(plus(i, j) - 0.5) < 1e-15);
  CHECK(std::abs(plus(2, 2)) == 0.0);
}

TEST_CASE("tensor and partial_trace") {
  const auto t = one_mode(4);
  const auto rho = outer(cat_state({Parity::odd, 0.7}, one_mode(30)));
  const auto vac = outer(number_state({0}, t));
  const int keep0[] = {0};
  const auto back = partial_trace(tensor(rho, vac), keep0);
  CHECK(max_abs_diff(back.to_dense(), rho.to_dense()) == 0.0);

  const auto one = outer(number_state({1}, t));
  const auto pair = tensor(one, one);
  CHECK(max_abs_diff(pair.to_dense(), outer(number_state({1, 1}, two_mode(4))).to_dense()) == 0.0);
  CHECK(pair.trace() == doctest::Approx(1.0));

  const double s = 1.0 / std::sqrt(2.0);
  const auto chi = outer(multimode_noon(2, {s, s}, two_mode(2)));
  const auto reduced = partial_trace(chi, keep0);
  const double diag[] = {0.5, 0.0, 0.5};
  CHECK(max_abs_diff(reduced.to_dense(), DensityMatrix::diagonal(one_mode(2), diag).to_dense()) < 1e-15);

  const int bad[] = {2};
  CHECK_THROWS_AS((void)partial_trace(chi, bad), InvalidArgument);
}

TEST_CASE("passive_unitary") {
  const auto t = two_mode(3);
  SUBCASE("identity") {
    const auto op = passive_unitary(ComplexMatrix::Identity(2, 2), t);
    const auto psi = multimode_noon(3, {0.6, 0.8 * kI}, t);
    CHECK((apply(op, psi).amps() - psi.amps()).norm() < 1e-15);
  }
  SUBCASE("50:50 on |1,0>") {
    const auto out = apply(passive_unitary(beam_splitter(0.5), t), number_state({1, 0}, t));
    const int a[] = {1, 0}, b[] = {0, 1};
    CHECK(std::abs(out.amp(a) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(out.amp(b) - std::sqrt(0.5)) < 1e-15);
  }
  SUBCASE("Hong-Ou-Mandel") {
    const auto out = apply(passive_unitary(beam_splitter(0.5), t), number_state({1, 1}, t));
    const int a[] = {2, 0}, b[] = {0, 2}, c[] = {1, 1};
    CHECK(std::abs(out.amp(c)) < 1e-15);
    CHECK(std::abs(std::abs(out.amp(a)) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(out.amp(a) + out.amp(b)) < 1e-15);
  }
  SUBCASE("conserves photon number and is unitary per block") {
    const ComplexMatrix U = beam_splitter(0.3) * Complex(std::cos(0.4), std::sin(0.4));
    const auto op = passive_unitary(U, t);
    const ComplexMatrix dense = ComplexMatrix(op.matrix);
    for (std::size_t i = 0; i < t.dimension(); ++i)
      for (std::size_t j = 0; j < t.dimension(); ++j)
        if (t.total_photons(i) != t.total_photons(j)) CHECK(dense(i, j) == Complex(0.0));
    // Blocks up to the smallest cutoff are closed.
    for (std::size_t i = 0; i < t.dimension(); ++i) {
      if (t.total_photons(i) > 3) continue;
      CHECK(std::abs(dense.col(static_cast<Eigen::Index>(i)).norm() - 1.0) < 1e-12);
    }
  }
  SUBCASE("non-unitary input") {
    ComplexMatrix U = ComplexMatrix::Identity(2, 2);
    U(0, 1) = 0.1;
    CHECK_THROWS_AS((void)passive_unitary(U, t), InvalidArgument);
  }
  SUBCASE("coherent states map to U alpha") {
    const auto big = two_mode(40);
    const ComplexMatrix U = beam_splitter(0.7);
    const std::vector<Complex> alpha{Complex(1.0, 0.5), Complex(-0.3, 0.2)};
    const auto out = apply(passive_unitary(U, big), coherent_amps({alpha}, big));
    const Eigen::Map<const ComplexVector> a(alpha.data(), 2);
    const ComplexVector ua = U * a;
    const auto expect = coherent_amps({{ua[0], ua[1]}}, big);
    CHECK((out.amps() - expect.amps()).norm() < 1e-10);
  }
}

TEST_CASE("displacement") {
  const auto t = one_mode(30);
  const Complex zero[] = {0.0};
  const auto id = displacement(zero, t);
  const auto psi = cat_state({Parity::even, 1.0}, t);
  CHECK((apply(id, psi).amps() - psi.amps()).norm() < 1e-15);

  const Complex g[] = {1.0};
  const auto d = displacement(g, t);
  CHECK((apply(d, number_state({0}, t)).amps() - coherent_amps({{1.0}}, t).amps()).norm() < 1e-10);

  const Complex gc[] = {Complex(0.6, -0.4)};
  const Complex mg[] = {-gc[0]};
  const auto there_and_back = apply(displacement(mg, t), apply(displacement(gc, t), number_state({1}, t)));
  CHECK((there_and_back.amps() - number_state({1}, t).amps()).norm() < 1e-8);
}
