#include <hcr/error.hpp>
#include <hcr/geometry.hpp>

#include <doctest.h>

#include <numbers>
#include <random>

using namespace hcr;
using doctest::Approx;

constexpr double kPi = std::numbers::pi;

TEST_CASE("rotate_cw is a clockwise quarter turn") {
  CHECK(rotate_cw(Vec2(1, 0)) == Vec2(0, -1));
  CHECK(rotate_cw(Vec2(0, 0)) == Vec2(0, 0));
  const Vec2 v = rotate_cw(Vec2(3, 4));
  CHECK(v == Vec2(4, -3));
  CHECK(v.norm() == Approx(5.0));

  std::mt19937_64 gen(1);
  std::normal_distribution<double> n(0.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 w(n(gen), n(gen));
    CHECK((rotate_cw(rotate_cw(w)) + w).norm() == 0.0);
    CHECK(cross2(w, rotate_cw(w)) <= 0.0);
  }
}

TEST_CASE("polar_dir") {
  CHECK((polar_dir(0.0, 0.0) - Vec2(1, 0)).norm() < 1e-15);
  CHECK((polar_dir(kPi / 2, 0.0) - Vec2(0, 1)).norm() < 1e-15);
  CHECK((polar_dir(kPi / 4, kPi / 4) - Vec2(0, 1)).norm() < 1e-15);
  for (int k = 0; k < 1000; ++k) {
    const double psi = -50.0 + 0.1 * k;
    CHECK(std::abs(polar_dir(psi, 0.3).norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_to_2pi(-kPi / 2) == Approx(3 * kPi / 2));
  CHECK(wrap_to_2pi(2 * kPi) == 0.0);
  CHECK(wrap_to_2pi(7.0) == Approx(7.0 - 2 * kPi));
  CHECK(wrap_to_pi(3 * kPi / 2) == Approx(-kPi / 2));
  CHECK(wrap_to_pi(kPi) == Approx(kPi));
  CHECK(wrap_to_pi(-kPi) == Approx(kPi));
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_to_2pi(a);
    CHECK(w >= 0.0);
    CHECK(w < 2 * kPi);
    CHECK(std::abs(std::sin(w) - std::sin(a)) < 1e-12);
  }
}

TEST_CASE("heading_of and cross2") {
  CHECK(heading_of(Vec2(1, 0)) == 0.0);
  CHECK(heading_of(Vec2(0, 3)) == Approx(kPi / 2));
  CHECK(heading_of(Vec2(0, -1)) == Approx(3 * kPi / 2));
  CHECK(cross2(Vec2(1, 0), Vec2(0, 1)) == 1.0);
  CHECK(cross2(Vec2(2, 2), Vec2(1, 1)) == 0.0);
}

TEST_CASE("NumericConfig validation") {
  NumericConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps_active = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
