#include "support.hpp"

#include <doctest.h>

using namespace abme;
using abme::testing::random_field;

TEST_CASE("borrowed fields scale the inter-frame flow") {
  const MotionFieldd v01(4, 4, 4.0, -2.0);
  const MotionFieldd v10(4, 4, -6.0, 1.0);
  const auto [a0, a1] = approx_borrowed(v01, v10, 0.25, BorrowFrom::Flow01);
  CHECK(a0(1, 1).x() == doctest::Approx(-1.0));
  CHECK(a1(1, 1).x() == doctest::Approx(3.0));
  CHECK(a1(1, 1).y() == doctest::Approx(-1.5));
  const auto [b0, b1] = approx_borrowed(v01, v10, 0.25, BorrowFrom::Flow10);
  CHECK(b0(0, 0).x() == doctest::Approx(-1.5));
  CHECK(b1(0, 0).x() == doctest::Approx(4.5));
}

TEST_CASE("blended fields are the time-weighted mix of both borrowed pairs") {
  std::mt19937_64 rng(11);
  const auto v01 = random_field(rng, 6, 5, 3.0);
  const auto v10 = random_field(rng, 6, 5, 3.0);
  const double t = 0.3;
  const auto [p0, p1] = approx_borrowed(v01, v10, t, BorrowFrom::Flow01);
  const auto [q0, q1] = approx_borrowed(v01, v10, t, BorrowFrom::Flow10);
  const auto [m0, m1] = approx_blended(v01, v10, t);
  CHECK(((m0.dx() - ((1 - t) * p0.dx() + t * q0.dx())).abs().maxCoeff()) < 1e-12);
  CHECK(((m1.dy() - ((1 - t) * p1.dy() + t * q1.dy())).abs().maxCoeff()) < 1e-12);
}

TEST_CASE("linear motion pair is symmetric about t") {
  const MotionFieldd vt1(3, 3, 3.0, -1.5);
  CHECK(symmetric_counterpart(vt1, 0.5)(2, 2).x() == -3.0);
  CHECK(symmetric_counterpart(vt1, 0.25)(0, 0).x() == doctest::Approx(-1.0));
  CHECK(symmetric_counterpart(vt1, 0.75)(0, 0).y() == doctest::Approx(4.5));
  CHECK_THROWS_AS(symmetric_counterpart(vt1, 0.0), std::invalid_argument);
}

TEST_CASE("scaling rejects non-finite factors") {
  CHECK_THROWS_AS(scale_field(MotionFieldd(2, 2), std::nan("")), std::invalid_argument);
}
