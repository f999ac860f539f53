#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "jsq/errors.hpp"
#include "jsq/reflection.hpp"

using jsq::Barrier;

TEST_CASE("identity path reflected at one") {
  std::vector<double> x;
  for (int j = 0; j <= 200; ++j) x.push_back(j * 0.0125);  // t on [0, 2.5], dyadic
  const auto r = jsq::reflect_upper(x, Barrier(1.0));
  for (std::size_t j = 0; j < x.size(); ++j) {
    CHECK(r.psi[j] == std::max(0.0, x[j] - 1.0));
    CHECK(r.phi[j] == std::min(x[j], 1.0));
  }
}

TEST_CASE("infinite barrier is the identity") {
  const std::vector<double> x{0.0, 3.0, -1.0, 1e300};
  const auto r = jsq::reflect_upper(x, Barrier::infinite());
  CHECK(r.phi == x);
  CHECK(r.psi == std::vector<double>(4, 0.0));
}

TEST_CASE("barrier and start validation") {
  CHECK_THROWS_AS(Barrier(-0.5), jsq::PreconditionViolation);
  CHECK_THROWS_AS(Barrier(std::nan("")), jsq::PreconditionViolation);
  const std::vector<double> x{2.0, 0.0};
  CHECK_THROWS_AS(jsq::reflect_upper(x, Barrier(1.0)), jsq::PreconditionViolation);
  CHECK(Barrier::infinite().is_infinite());
  CHECK(Barrier(0.0).value() == 0.0);
}

TEST_CASE("path already below the barrier is untouched") {
  const std::vector<double> x{-1.0, -0.5, -2.0, 0.0};
  const auto r = jsq::reflect_upper(x, Barrier(0.0));
  CHECK(r.phi == x);
  CHECK(r.psi == std::vector<double>(4, 0.0));
}

TEST_CASE("regulator matches the brute-force running maximum on dyadic paths") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double kappa = oracle::dyadic_level(rng);
    const auto x = oracle::dyadic_walk(rng, 300, -static_cast<double>(trial % 3));
    const auto r = jsq::reflect_upper(x, Barrier(kappa));
    const auto psi = oracle::brute_regulator(x, kappa);
    REQUIRE(r.psi == psi);
    for (std::size_t j = 0; j < x.size(); ++j) {
      CHECK(r.phi[j] + r.psi[j] == x[j]);
      CHECK(r.phi[j] <= kappa);
      if (j > 0 && r.psi[j] > r.psi[j - 1]) CHECK(r.phi[j] == kappa);
    }
  }
}

TEST_CASE("complementarity and bounds hold exactly on arbitrary doubles") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 0.37);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x{0.0};
    for (int j = 0; j < 500; ++j) x.push_back(x.back() + g(rng));
    const double kappa = 0.1 + 0.013 * trial;
    const auto r = jsq::reflect_upper(x, Barrier(kappa));
    for (std::size_t j = 0; j < x.size(); ++j) {
      CHECK(r.phi[j] <= kappa);
      CHECK(std::abs(r.phi[j] + r.psi[j] - x[j]) <= 4 * std::numeric_limits<double>::epsilon() *
                                                        std::max(1.0, std::abs(x[j]) + kappa));
      if (j > 0) {
        CHECK(r.psi[j] >= r.psi[j - 1]);
        if (r.psi[j] > r.psi[j - 1]) CHECK(r.phi[j] == kappa);
      }
    }
  }
}

TEST_CASE("lipschitz bounds of the reflection map") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const double k1 = oracle::dyadic_level(rng), k2 = oracle::dyadic_level(rng);
    const auto x1 = oracle::dyadic_walk(rng, 200), x2 = oracle::dyadic_walk(rng, 200);
    const auto a = jsq::reflect_upper(x1, Barrier(k1));
    const auto b = jsq::reflect_upper(x2, Barrier(k2));
    double dx = 0.0, dpsi = 0.0, dphi = 0.0;
    for (std::size_t j = 0; j < x1.size(); ++j) {
      dx = std::max(dx, std::abs(x1[j] - x2[j]));
      dpsi = std::max(dpsi, std::abs(a.psi[j] - b.psi[j]));
      dphi = std::max(dphi, std::abs(a.phi[j] - b.phi[j]));
    }
    const double dk = std::abs(k1 - k2);
    CHECK(dpsi <= dx + dk);
    CHECK(dphi <= 2 * dx + dk);
  }
}

TEST_CASE("lower reflection keeps the path above the level") {
  const std::vector<double> x{0.0, -0.5, -1.0, 0.25, -2.0};
  const auto r = jsq::reflect_lower(x, 0.0);
  const std::vector<double> phi{0.0, 0.0, 0.0, 1.25, 0.0};
  const std::vector<double> psi{0.0, 0.5, 1.0, 1.0, 2.0};
  CHECK(r.phi == phi);
  CHECK(r.psi == psi);
  CHECK_THROWS_AS(jsq::reflect_lower(x, 0.5), jsq::PreconditionViolation);
}

TEST_CASE("grid overload returns single-column paths") {
  jsq::GridPath x(jsq::GridSpec{0.0, 0.5, 5}, 1);
  for (std::size_t j = 0; j < 5; ++j) x.at(j, 0) = 0.5 * static_cast<double>(j);
  const auto [phi, psi] = jsq::reflect_upper(x, Barrier(1.0));
  CHECK(phi.cols() == 1);
  CHECK(psi.at(4, 0) == 1.0);
  CHECK(phi.at(4, 0) == 1.0);
  CHECK(phi.grid() == x.grid());
  jsq::GridPath two(jsq::GridSpec{0.0, 0.5, 5}, 2);
  CHECK_THROWS_AS(jsq::reflect_upper(two, Barrier(1.0)), jsq::MismatchedInputs);
}
