#include <doctest.h>

#include <cmath>
#include <vector>

#include "hamstep/errors.hpp"
#include "hamstep/hamiltonian.hpp"
#include "hamstep/problems.hpp"
#include "support.hpp"

using namespace hamstep;
using Term = PolynomialHamiltonian::Term;

namespace {

PolynomialHamiltonian pendulum_poly() {
  return PolynomialHamiltonian(1, {{0.5, {0, 2}}, {0.5, {2, 0}}, {-1.0 / 6.0, {3, 0}}});
}

PolynomialHamiltonian fhp_poly() {
  return PolynomialHamiltonian(1, {{1.0 / 3.0, {0, 3}},
                                   {-0.5, {0, 1}},
                                   {1.0 / 30.0, {6, 0}},
                                   {0.25, {4, 0}},
                                   {-1.0 / 3.0, {3, 0}},
                                   {1.0 / 6.0, {0, 0}}});
}

// Two degrees of freedom with mixed terms, to exercise multi-index bookkeeping.
PolynomialHamiltonian coupled_poly() {
  return PolynomialHamiltonian(2, {{0.5, {0, 0, 2, 0}},
                                   {0.5, {0, 0, 0, 2}},
                                   {0.3, {1, 1, 0, 0}},
                                   {-0.2, {2, 0, 1, 0}},
                                   {0.05, {1, 2, 0, 1}},
                                   {1.5, {0, 0, 0, 0}}});
}

}  // namespace

TEST_CASE("state vectors validate length and finiteness") {
  CHECK(StateVector{1.0, 2.0}.dof() == 1);
  CHECK_THROWS_AS(StateVector({1.0, 2.0, 3.0}), DimensionMismatch);
  CHECK_THROWS_AS(StateVector(std::vector<double>{}), DimensionMismatch);
  CHECK_THROWS_AS(StateVector({1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(StateVector({INFINITY, 0.0}), InvalidArgument);
}

TEST_CASE("energy examples") {
  const Hamiltonian H(pendulum_poly());
  CHECK(H.energy(StateVector{0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-16));

  const PolynomialHamiltonian zero(2, {});
  CHECK(zero.evaluate(std::vector<double>{0.3, -1.0, 2.0, 5.0}) == 0.0);
  CHECK(zero.degree() == 0);
}

TEST_CASE("fhp energy agrees between term sum, nested Horner and a closed form") {
  const auto P = fhp_poly();
  const std::vector<double> y{0.2, 0.5};
  const double q = 0.2, p = 0.5;
  const double closed = p * p * p / 3.0 - p / 2.0 + std::pow(q, 6) / 30.0 + std::pow(q, 4) / 4.0 -
                        q * q * q / 3.0 + 1.0 / 6.0;
  const double a = P.evaluate(y);
  const double b = P.evaluate_horner(y);
  CHECK(std::abs(a - b) <= 1e-15 * std::abs(a));
  CHECK(std::abs(a - closed) <= 1e-15 * std::abs(a));

  auto gen = testing::rng(7);
  for (int i = 0; i < 200; ++i) {
    const auto x = testing::random_vector(gen, 2, -1.5, 1.5);
    const double t = P.evaluate(x);
    CHECK(std::abs(t - P.evaluate_horner(x)) <= 4e-15 * std::max(1.0, std::abs(t)));
  }
}

TEST_CASE("gradient examples") {
  const Hamiltonian sho(PolynomialHamiltonian(1, {{0.5, {0, 2}}, {0.5, {2, 0}}}));
  auto g = sho.gradient(StateVector{1.0, 2.0});
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 2.0);

  const Hamiltonian pend(pendulum_poly());
  g = pend.gradient(StateVector{2.0, 0.0});
  CHECK(std::abs(g[0]) <= 1e-15);
  CHECK(g[1] == 0.0);
}

TEST_CASE("apply_j examples and identities") {
  CHECK(apply_j(std::vector<double>{3.0, 7.0}) == std::vector<double>{7.0, -3.0});
  CHECK(apply_j(std::vector<double>{1.0, 2.0, 3.0, 4.0}) == std::vector<double>{3.0, 4.0, -1.0, -2.0});
  CHECK_THROWS_AS((void)apply_j(std::vector<double>{1.0, 2.0, 3.0}), DimensionMismatch);

  auto gen = testing::rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto v = testing::random_vector(gen, 6);
    const auto w = testing::random_vector(gen, 6);
    const auto jjv = apply_j(apply_j(v));
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(jjv[j] == -v[j]);
    // J^T J = I: J preserves the Euclidean norm, and J is linear.
    CHECK(testing::norm2(apply_j(v)) == doctest::Approx(testing::norm2(v)).epsilon(1e-15));
    std::vector<double> sum(6);
    for (std::size_t j = 0; j < 6; ++j) sum[j] = 2.0 * v[j] + w[j];
    const auto js = apply_j(sum);
    const auto jv = apply_j(v);
    const auto jw = apply_j(w);
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(js[j] - (2.0 * jv[j] + jw[j])) <= 1e-15);
  }

  std::vector<double> inplace{1.0, 2.0};
  apply_j(inplace, inplace);
  CHECK(inplace == std::vector<double>{2.0, -1.0});
}

TEST_CASE("degree") {
  CHECK(pendulum_poly().degree() == 3);
  CHECK(fhp_poly().degree() == 6);
  CHECK(PolynomialHamiltonian(1, {{4.0, {0, 0}}}).degree() == 0);
  CHECK(coupled_poly().degree() == 4);
  CHECK(Hamiltonian(pendulum_poly()).poly_degree() == 3);
}

TEST_CASE("canonical storage merges duplicates and drops zeros") {
  const PolynomialHamiltonian P(1, {{1.0, {2, 0}}, {2.0, {2, 0}}, {0.0, {5, 0}}, {1.0, {0, 1}}, {-1.0, {0, 1}}});
  const auto terms = P.terms();
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].coefficient == 3.0);
  CHECK(terms[0].exponents == Exponents{2, 0});
  CHECK(P.degree() == 2);

  CHECK_THROWS_AS(PolynomialHamiltonian(1, {{1.0, {1, 0, 0}}}), DimensionMismatch);
  CHECK_THROWS_AS(PolynomialHamiltonian(0, {}), InvalidArgument);
  CHECK_THROWS_AS(PolynomialHamiltonian(1, {{NAN, {1, 0}}}), InvalidArgument);
}

TEST_CASE("gradients match central differences at 100 random points") {
  for (const auto& P : {pendulum_poly(), fhp_poly(), coupled_poly()}) {
    const Hamiltonian H(P);
    auto gen = testing::rng(13 + P.dim());
    for (int i = 0; i < 100; ++i) {
      const auto y = testing::random_vector(gen, H.dim());
      CHECK(gradient_fd_mismatch(H, y) <= 1e-6);
    }
  }
}

TEST_CASE("gradient of a sum is the sum of gradients") {
  const auto A = coupled_poly();
  const PolynomialHamiltonian B(2, {{0.7, {3, 0, 0, 0}}, {-0.3, {0, 1, 1, 1}}, {0.3, {1, 1, 0, 0}}});
  const auto S = A + B;
  auto gen = testing::rng(17);
  std::vector<double> ga(4), gb(4), gs(4);
  for (int i = 0; i < 100; ++i) {
    const auto y = testing::random_vector(gen, 4);
    A.gradient(y, ga);
    B.gradient(y, gb);
    S.gradient(y, gs);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(gs[j] - (ga[j] + gb[j])) <= 1e-14);
  }
  CHECK_THROWS_AS((void)(A + pendulum_poly()), DimensionMismatch);
}

TEST_CASE("callback Hamiltonians and dimension checks") {
  const Hamiltonian H(
      1, [](std::span<const double> y) { return std::cos(y[0]) + 0.5 * y[1] * y[1]; },
      [](std::span<const double> y, std::span<double> g) {
        g[0] = -std::sin(y[0]);
        g[1] = y[1];
      });
  CHECK_FALSE(H.poly_degree().has_value());
  CHECK(H.polynomial() == nullptr);
  CHECK(gradient_fd_mismatch(H, std::vector<double>{0.4, -0.3}) <= 1e-6);
  CHECK_THROWS_AS((void)H.energy(std::vector<double>{1.0, 2.0, 3.0, 4.0}), DimensionMismatch);
  CHECK_THROWS_AS((void)H.gradient(std::vector<double>{1.0}), DimensionMismatch);

  const Hamiltonian P(pendulum_poly());
  CHECK_THROWS_AS((void)P.energy(std::vector<double>{1.0, 2.0, 3.0, 4.0}), DimensionMismatch);
}
