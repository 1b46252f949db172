#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "shockshift/flux.hpp"

using namespace shockshift;
using doctest::Approx;

TEST_SUITE("flux") {

TEST_CASE("burgers values and derivatives") {
  const auto f = FluxField::burgers(2);
  CHECK(f.eval(0.0) == std::vector<double>{0.0, 0.0});
  CHECK(f.eval(2.0) == std::vector<double>{2.0, 2.0});
  CHECK(f.eval_deriv(3.0, 1) == std::vector<double>{3.0, 1.0});
  for (double u : {-2.0, 0.3, 7.0}) CHECK(f.eval_deriv(u, 2) == std::vector<double>{1.0, 0.0});
  CHECK_THROWS_AS(f.eval_deriv(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(f.eval(std::nan("")), std::domain_error);
}

TEST_CASE("cubic convex flux") {
  const auto f = FluxField::cubic_convex(2);
  CHECK(f.eval(1.0)[0] == Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(f.eval_deriv(2.0, 2)[0] == Approx(4.0));
  CHECK(f.eval_deriv(2.0, 3)[0] == Approx(2.0));
}

TEST_CASE("relative flux") {
  const auto b = FluxField::burgers(3);
  for (double u : {-1.0, 0.0, 0.7}) {
    for (double r : b.relative(u, u)) CHECK(r == 0.0);
  }
  const auto r = b.relative(1.0, 0.0);
  CHECK(r[0] == Approx(0.5));
  // linear transverse components carry no relative flux
  for (double u : {-3.0, 0.2, 5.0}) {
    for (double v : {-1.0, 4.0}) {
      const auto rr = b.relative(u, v);
      CHECK(rr[1] == Approx(0.0).epsilon(1e-14));
      CHECK(rr[2] == Approx(0.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("w kernel against the direct quotient") {
  const auto b = FluxField::burgers(2);
  for (double k : b.w_kernel(0.4, 0.4)) CHECK(k == 0.0);
  CHECK(b.w_kernel(1.0, 0.0)[0] == Approx(0.5).epsilon(1e-14));

  const auto c = FluxField::cubic_convex(2);
  const double u = 0.3, v = 0.1;
  const double direct = c.relative(u, v)[0] / (u - v);
  CHECK(std::abs(c.w_kernel(u, v)[0] - direct) <= 1e-12);
  CHECK(std::abs(c.w_kernel_component(0, u, v) - direct) <= 1e-12);

  // a quartic normal flux with a cubic transverse one
  const auto q = FluxField::custom(Polynomial({0.0, 0.0, 0.5, 0.0, 0.25}), {Polynomial({0.0, 1.0, 0.0, 1.0})});
  for (auto [a, bb] : {std::pair{0.9, -0.4}, std::pair{-1.2, 0.3}, std::pair{2.0, 1.5}}) {
    const auto rel = q.relative(a, bb);
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(q.w_kernel(a, bb)[std::size_t(k)] - rel[std::size_t(k)] / (a - bb)) <= 1e-12);
      CHECK(std::abs(q.w_kernel_component(k, a, bb) - rel[std::size_t(k)] / (a - bb)) <= 1e-12);
    }
  }
}

TEST_CASE("polynomial helpers") {
  const Polynomial p({1.0, -2.0, 0.0, 3.0});  // 1 - 2u + 3u^3
  CHECK(p(2.0) == Approx(21.0));
  CHECK(p.derivative(2.0, 1) == Approx(34.0));
  CHECK(p.derivative(2.0, 2) == Approx(36.0));
  CHECK(p.divided_difference(2.0, 1.0) == Approx((21.0 - 2.0) / 1.0));
  CHECK(p.divided_difference(1.5, 1.5) == Approx(p.derivative(1.5, 1)));
  std::vector<double> x{-1.0, 0.0, 0.5, 3.0}, y(4);
  p.eval_many(x.data(), y.data(), x.size());
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(y[k] == Approx(p(x[k])));
}

TEST_CASE("gauss legendre rule integrates polynomials exactly") {
  for (int n = 1; n <= 8; ++n) {
    const auto r = gauss_legendre_unit(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.nodes.size(); ++q) s += r.weights[q] * std::pow(r.nodes[q], deg);
      CHECK(s == Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("convexity sampling") {
  CHECK(FluxField::burgers(2).a1_convex_on(-1.0, 1.0));
  CHECK_FALSE(FluxField::custom(Polynomial({0.0, 0.0, 0.0, 1.0}), {Polynomial({0.0, 1.0})}).a1_convex_on(-1.0, 1.0));
}

}
