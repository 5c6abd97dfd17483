#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kproc/quadrature.h"

namespace kproc {
namespace {

TEST(Quadrature, Polynomials) {
  const auto r = quad::integrate([](double x) { return 3 * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 8.0, 1e-13);
  EXPECT_LE(r.error, 1e-12);
}

TEST(Quadrature, ReversedLimitsFlipSign) {
  const auto f = [](double x) { return std::cos(x); };
  EXPECT_NEAR(quad::integrate(f, 1.0, 0.0).value, -std::sin(1.0), 1e-14);
  EXPECT_EQ(quad::integrate(f, 1.0, 1.0).value, 0.0);
}

TEST(Quadrature, OscillatoryIntegrand) {
  const auto r = quad::integrate([](double x) { return std::sin(50 * x); }, 0.0, std::numbers::pi);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(Quadrature, IntegrableSingularityNeedsManyPanels) {
  const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                 {1e-12, 1e-10, 20000});
  EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, HalfLine) {
  EXPECT_NEAR(quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0).value, 1.0, 1e-13);
  EXPECT_NEAR(quad::integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0).value,
              std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(quad::integrate_to_infinity([](double x) { return 1.0 / (x * x); }, 2.0).value, 0.5, 1e-13);
}

TEST(Quadrature, GaussianMass) {
  const auto r = quad::integrate_to_infinity([](double x) { return std::exp(-x * x / 2); }, 0.0);
  EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi / 2), 1e-13);
}

}  // namespace
}  // namespace kproc
