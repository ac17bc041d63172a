#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ncdist/channels.hpp"
#include "ncdist/husimi.hpp"
#include "ncdist/random_states.hpp"
#include "ncdist/states.hpp"

using namespace ncdist;

TEST_CASE("q_tilde") {
  const auto t = TruncationSpec::uniform(1, 40);
  CHECK(q_tilde(outer(number_state({0}, t)), {{0.0}}) == doctest::Approx(1.0));
  const CatParams p{Parity::even, 1.0};
  const double expect = std::exp(-0.25) * std::pow(std::cosh(0.5), 2) / std::cosh(1.0);
  CHECK(q_tilde(outer(cat_state(p, t)), {{0.5}}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cat_q_tilde(p, 0.5) == doctest::Approx(expect).epsilon(1e-14));
  const double s = 1.0 / std::sqrt(2.0);
  const auto chi = outer(multimode_noon(2, {s, s}, TruncationSpec::uniform(2, 30)));
  CHECK(q_tilde(chi, {{std::sqrt(2.0), 0.0}}) == doctest::Approx(gamma_n(2) / 2.0).epsilon(1e-12));
}

TEST_CASE("gamma_n") {
  CHECK(gamma_n(0) == 1.0);
  CHECK(gamma_n(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(gamma_n(4) == doctest::Approx(std::exp(-4.0) * 256.0 / 24.0).epsilon(1e-14));
  CHECK(gamma_n(4) == doctest::Approx(0.1953668).epsilon(1e-7));
  for (int n = 1; n <= 200; ++n) {
    CHECK(gamma_n(n) < gamma_n(n - 1));
    CHECK(std::exp(-n) <= gamma_n(n));
    CHECK(gamma_n(n) <= 1.0 / std::sqrt(2.0 * std::numbers::pi * n));
  }
}

TEST_CASE("q_sup") {
  SUBCASE("coherent state") {
    const Complex a0(0.7, -0.4);
    const auto m = q_sup(outer(coherent_amps({{a0}}, TruncationSpec::uniform(1, 30))));
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(m.argmax.front().alpha[0] - a0) < 1e-5);
  }
  SUBCASE("number state n = 3") {
    const auto m = q_sup(outer(number_state({3}, TruncationSpec::uniform(1, 3))));
    CHECK(m.value == doctest::Approx(0.2240418).epsilon(1e-7));
    CHECK(m.value == doctest::Approx(gamma_n(3)).epsilon(1e-10));
    CHECK(m.argmax.size() > 1);
    for (const auto& a : m.argmax) CHECK(std::abs(a.alpha[0]) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-5));
    CHECK(m.certificate <= 1e-8);
  }
  SUBCASE("equal-amplitude N00N, n = 2, M = 3") {
    const double r = 1.0 / std::sqrt(3.0);
    const auto m = q_sup(outer(multimode_noon(2, {r, r, r}, TruncationSpec::uniform(3, 2))));
    CHECK(m.value == doctest::Approx(gamma_n(2) / 3.0).epsilon(1e-9));
    CHECK(m.value == doctest::Approx(0.0902235).epsilon(1e-6));
  }
  SUBCASE("supremum dominates sampled points") {
    Rng rng(5);
    const auto t = TruncationSpec::uniform(1, 8);
    const auto rho = random_density(t, 2, rng);
    const auto m = q_sup(rho);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) CHECK(q_tilde(rho, {{Complex(u(rng), u(rng))}}) <= m.value + 1e-12);
  }
  SUBCASE("product rule") {
    const auto t = TruncationSpec::uniform(1, 30);
    const auto a = number_state({2}, t);
    const auto b = cat_state({Parity::odd, 1.0}, t);
    const double ma = q_sup(outer(a)).value;
    const double mb = q_sup(outer(b)).value;
    CHECK(q_sup(outer(tensor(a, b))).value == doctest::Approx(ma * mb).epsilon(1e-9));
  }
  SUBCASE("displacement invariance") {
    const auto t = TruncationSpec::uniform(1, 40);
    const auto rho = outer(cat_state({Parity::odd, 0.8}, t));
    const Complex g[] = {Complex(0.5, 0.3)};
    const auto moved = conjugate(displacement(g, t), rho);
    CHECK(q_sup(moved).value == doctest::Approx(q_sup(rho).value).epsilon(1e-8));
  }
}

TEST_CASE("noon_qmax_analytic") {
  const auto one = noon_qmax_analytic(1, {0.6, Complex(0.0, 0.8)});
  CHECK(one.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(std::abs(one.argmax.front().alpha[1] - Complex(0.0, 0.8)) < 1e-15);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(noon_qmax_analytic(2, {s, s}).value == doctest::Approx(gamma_n(2) / 2.0).epsilon(1e-15));
  const auto three = noon_qmax_analytic(3, {0.8, 0.6});
  CHECK(three.value == doctest::Approx(gamma_n(3) * 0.64).epsilon(1e-15));
  const auto numeric = q_sup(outer(multimode_noon(3, {0.8, 0.6}, TruncationSpec::uniform(2, 3))));
  CHECK(numeric.value == doctest::Approx(three.value).epsilon(1e-9));
}

TEST_CASE("cat_qmax") {
  SUBCASE("even, beta = 0.8") {
    const auto m = cat_qmax({Parity::even, 0.8});
    CHECK(m.value == doctest::Approx(1.0 / std::cosh(0.64)).epsilon(1e-14));
    CHECK(std::abs(m.argmax.front().alpha[0]) == 0.0);
  }
  SUBCASE("even, beta = 2 against multistart") {
    const CatParams p{Parity::even, 2.0};
    const auto m = cat_qmax(p);
    const double a = m.argmax.front().alpha[0].real();
    CHECK(std::abs(std::abs(a) - 2.0 * std::tanh(2.0 * std::abs(a))) < 1e-12);
    const auto numeric = q_sup(outer(cat_state(p, TruncationSpec::uniform(1, cat_cutoff(p)))));
    CHECK(numeric.value == doctest::Approx(m.value).epsilon(1e-8));
  }
  SUBCASE("odd, beta = 1e-4") {
    const auto m = cat_qmax({Parity::odd, 1e-4});
    CHECK(m.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(std::abs(m.argmax.front().alpha[0]) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("odd root lies in its bracket") {
    for (double b : {0.3, 1.0, 2.5}) {
      const auto m = cat_qmax({Parity::odd, b});
      const double a = std::abs(m.argmax.front().alpha[0]);
      CHECK(a > b);
      CHECK(a <= b / std::tanh(b * b) + 1e-12);
      CHECK(std::abs(a - b / std::tanh(b * a)) < 1e-12);
    }
  }
}
