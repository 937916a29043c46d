#include <cmath>
#include <random>

#include <doctest.h>

#include "dcollapse/collapse_contraction.hpp"
#include "dcollapse/errors.hpp"
#include "oracles.hpp"

using namespace dcollapse;

namespace {

GaussianPacket packet(const Vec3& c, const Vec3& s, double alpha = 0.0, double mass = 1e-20,
                      Vec3 v = {}, double t = 0.0) {
  return GaussianPacket::create(c, s, v, mass, alpha, t);
}

CriterionOutcome fired_outcome() { return CriterionOutcome{true, true, 1.0, 0.0, 0.0}; }

}  // namespace

TEST_CASE("product gaussian") {
  SUBCASE("equal widths: midpoint and sigma/sqrt2") {
    const auto p = product_gaussian(packet({1.0, -2.0, 0}, {0.4, 0.4, 0.4}),
                                    packet({3.0, 2.0, 0}, {0.4, 0.4, 0.4}));
    CHECK(p.center[0] == doctest::Approx(2.0));
    CHECK(p.center[1] == doctest::Approx(0.0));
    CHECK(p.sigma[0] == doctest::Approx(0.4 / std::sqrt(2.0)));
  }

  SUBCASE("moments agree with quadrature of |psi1||psi2|") {
    // The normalized product of the two moduli has mean c_p and the same
    // Gaussian shape as a modulus with width sigma_p, so its density
    // (|psi1||psi2|)^2 normalized has variance sigma_p^2.
    const double c1 = 0.3, s1 = 0.8, c2 = -1.1, s2 = 1.7;
    auto f = [&](double x) {
      const double m = oracle::modulus_1d(x, c1, s1) * oracle::modulus_1d(x, c2, s2);
      return m * m;
    };
    const double z = oracle::simpson(f, -30, 30, 60000);
    const double mean = oracle::simpson([&](double x) { return x * f(x); }, -30, 30, 60000) / z;
    const double var =
        oracle::simpson([&](double x) { return (x - mean) * (x - mean) * f(x); }, -30, 30, 60000) / z;
    const auto p = product_gaussian(packet({c1, 0, 0}, {s1, 1, 1}), packet({c2, 0, 0}, {s2, 1, 1}));
    CHECK(p.center[0] == doctest::Approx(mean).epsilon(1e-10));
    CHECK(p.sigma[0] == doctest::Approx(std::sqrt(var)).epsilon(1e-10));
  }

  SUBCASE("broad partner leaves the narrow packet nearly unchanged") {
    const auto p = product_gaussian(packet({1e-9, 0, 0}, {1e-10, 1e-10, 1e-10}),
                                    packet({0, 0, 0}, {1e-4, 1e-4, 1e-4}));
    CHECK(p.center[0] == doctest::Approx(1e-9).epsilon(1e-6));
    CHECK(p.sigma[0] == doctest::Approx(1e-10).epsilon(1e-6));
  }

  SUBCASE("identical packets") {
    const auto a = packet({5, 6, 7}, {1, 2, 3});
    const auto p = product_gaussian(a, a);
    CHECK(p.center == a.center());
    CHECK(p.sigma[2] == doctest::Approx(3 / std::sqrt(2.0)));
  }
}

TEST_CASE("apply collapse") {
  SUBCASE("identical packets contract by sqrt 2") {
    const auto a = packet({0, 0, 0}, {2e-10, 2e-10, 2e-10}, 0.3);
    const auto r = apply_collapse(a, a, 0.0, fired_outcome());
    CHECK(r.contracted_1.sigma()[0] == doctest::Approx(1.414213562e-10).epsilon(1e-9));
    CHECK(r.contracted_1.center() == r.contracted_2.center());
  }

  SUBCASE("broad micro packet localizes to the narrow partner's scale") {
    const auto micro = packet({0, 0, 0}, {1e-6, 1e-6, 1e-6}, 0.0, 1.7e-23, {10, 0, 0}, 2.0);
    const auto env = packet({3e-7, 0, 0}, {1e-10, 1e-10, 1e-10}, 1.0, 4.65e-26, {}, 2.0);
    const auto r = apply_collapse(micro, env, 2.0, fired_outcome());
    CHECK(r.contracted_1.sigma()[0] == doctest::Approx(1e-10).epsilon(1e-6));
    CHECK(r.contracted_1.center()[0] == doctest::Approx(3e-7).epsilon(1e-6));
    CHECK(r.contracted_1.mass() == micro.mass());
    CHECK(r.contracted_1.velocity() == micro.velocity());
    CHECK(r.contracted_1.alpha() == micro.alpha());
    CHECK(r.contracted_2.alpha() == env.alpha());
    CHECK(r.contracted_2.mass() == env.mass());
    CHECK(r.contracted_1.t_ref() == 2.0);
    CHECK(r.contracted_1.waist() == r.overlap_sigma);
  }

  SUBCASE("contract violations") {
    const auto a = packet({0, 0, 0}, {1, 1, 1});
    CHECK_THROWS_AS(apply_collapse(a, a, 0.0, CriterionOutcome{true, false, 0.1, 0, 0}),
                    ContractViolation);
    CHECK_THROWS_AS(apply_collapse(a, a, 1.0, fired_outcome()), ContractViolation);
  }
}

TEST_CASE("contraction invariants over random pairs") {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    Vec3 c1{}, c2{}, s1{}, s2{};
    for (std::size_t i = 0; i < 3; ++i) {
      s1[i] = std::pow(10.0, -14.0 + 12.0 * u(g));
      s2[i] = std::pow(10.0, -14.0 + 12.0 * u(g));
      c1[i] = 1e-6 * n(g);
      c2[i] = 1e-6 * n(g);
    }
    const auto a = packet(c1, s1);
    const auto b = packet(c2, s2);
    const auto r = apply_collapse(a, b, 0.0, fired_outcome());
    for (std::size_t i = 0; i < 3; ++i) {
      REQUIRE(r.overlap_sigma[i] <= std::min(s1[i], s2[i]));
      REQUIRE(r.overlap_center[i] >= std::min(c1[i], c2[i]));
      REQUIRE(r.overlap_center[i] <= std::max(c1[i], c2[i]));
    }
    if (k % 100 == 0) {
      REQUIRE(std::abs(overlap_integral_quadrature(r.contracted_1, r.contracted_1) - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("repeated collapse against a frozen partner strictly shrinks") {
  const auto partner = packet({0, 0, 0}, {1e-10, 1e-10, 1e-10});
  auto obj = packet({0, 0, 0}, {1e-10, 1e-10, 1e-10});
  double prev = obj.sigma()[0];
  for (int k = 0; k < 20; ++k) {
    obj = apply_collapse(obj, partner, 0.0, fired_outcome()).contracted_1;
    REQUIRE(obj.sigma()[0] < prev);
    prev = obj.sigma()[0];
  }
  // sigma_n^2 = 1 / (1/s0^2 + n/s^2) with s0 = s: sigma_20 = s / sqrt(21).
  CHECK(prev == doctest::Approx(1e-10 / std::sqrt(21.0)).epsilon(1e-12));
}

TEST_CASE("damped contraction") {
  CHECK(damped_contraction({4e-10, 4e-10, 4e-10}, {1e-10, 1e-10, 1e-10}, 0.5)[0] ==
        doctest::Approx(2e-10).epsilon(1e-14));
  const Vec3 old{3e-9, 2e-9, 1e-9};
  const Vec3 product{1e-9, 2e-9, 0.5e-9};
  CHECK(damped_contraction(old, product, 1.0) == product);
  for (double eta : {0.01, 0.3, 0.7, 1.0}) {
    const auto s = damped_contraction(old, product, eta);
    CHECK(s[0] < old[0]);
    CHECK(s[1] == old[1]);
    CHECK(s[2] < old[2]);
    CHECK(s[0] >= product[0]);
  }
  CHECK_THROWS_AS(damped_contraction(old, product, 0.0), DomainError);
  CHECK_THROWS_AS(damped_contraction(old, product, 1.5), DomainError);
  CHECK_THROWS_AS(damped_contraction(product, old, 0.5), DomainError);
}
