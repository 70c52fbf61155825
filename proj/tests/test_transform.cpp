#include <cmath>

#include "doctest.h"
#include "hnls/transform.hpp"
#include "oracles.hpp"

using namespace hnls;

namespace {

PhysicsParams params_a() {
  PhysicsParams p;
  p.alpha = 2.0;
  p.delta = 8.0;
  p.r = 1.0;
  return p;
}

Eigen::VectorXcd datum(const Grid& g) {
  return sample(g, [](double x) { return 3.0 - std::exp(4.0 * I * x) - 2.0 * std::exp(-2.0 * I * x); });
}

}  // namespace

TEST_CASE("I - Upsilon is unit upper triangular") {
  const Grid g{201, params_a().L};
  const TransformMatrix T = build_upsilon(solve_kernel(params_a()), g);
  const Eigen::MatrixXcd K = forward_matrix(T);
  double lower = 0.0, diag = 0.0;
  for (int i = 0; i < g.M; ++i) {
    diag = std::max(diag, std::abs(K(i, i) - 1.0));
    for (int j = 0; j < i; ++j) lower = std::max(lower, std::abs(K(i, j)));
  }
  CHECK(lower == 0.0);
  CHECK(diag <= 1e-13);
  CHECK(T.U.row(g.M - 1).norm() == 0.0);
}

TEST_CASE("forward and invert round-trip") {
  for (Family f : {Family::A, Family::B}) {
    PhysicsParams p = params_a();
    p.family = f;
    const Grid g{201, p.L};
    const TransformMatrix T = build_upsilon(solve_kernel(p), g);
    const Eigen::VectorXcd u = datum(g);
    CHECK((invert(T, forward(T, u)) - u).norm() / u.norm() <= 1e-12);
    CHECK((forward(T, invert(T, u)) - u).norm() / u.norm() <= 1e-12);
  }
}

TEST_CASE("back substitution agrees with the fixed-point recursion") {
  const Grid g{201, params_a().L};
  const TransformMatrix T = build_upsilon(solve_kernel(params_a()), g);
  const Eigen::VectorXcd w = datum(g);
  const Eigen::VectorXcd a = invert(T, w);
  const Eigen::VectorXcd b = oracle::fixed_point_invert(T, w);
  CHECK((a - b).norm() / a.norm() <= 1e-10);
}

TEST_CASE("transform rows follow the trapezoid rule") {
  const PhysicsParams p = params_a();
  const Grid g{11, p.L};
  const Kernel k = solve_kernel(p);
  const TransformMatrix T = build_upsilon(k, g);
  const double h = g.h();
  CHECK(std::abs(T.U(2, 5) - h * k.eval(g.x(2), g.x(5))) < 1e-15);
  CHECK(std::abs(T.U(2, 10) - 0.5 * h * k.eval(g.x(2), g.x(10))) < 1e-15);
  CHECK(std::abs(T.U(2, 2) - 0.5 * h * k.eval(g.x(2), g.x(2))) < 1e-15);
}

TEST_CASE("control signal matches direct quadrature") {
  const PhysicsParams p = params_a();
  const Grid g{101, p.L};
  const Kernel k = solve_kernel(p);
  const TransformMatrix T = build_upsilon(k, g);
  const Eigen::VectorXcd u = datum(g);
  CHECK(std::abs(control_signal(T, u) - control_signal(k, g, u)) < 1e-12 * (1 + std::abs(control_signal(k, g, u))));
}

TEST_CASE("zero kernel gives the identity transform") {
  PhysicsParams p = params_a();
  p.r = 0.0;
  const Grid g{31, p.L};
  const TransformMatrix T = build_upsilon(solve_kernel(p), g);
  const Eigen::VectorXcd u = datum(g);
  CHECK(forward(T, u) == u);
  CHECK(inverse_norm_estimate(T) == doctest::Approx(1.0));
  CHECK(stability_constant(T) == doctest::Approx(1.0));
}

TEST_CASE("stability constant is at least one and finite") {
  const Grid g{101, params_a().L};
  const TransformMatrix T = build_upsilon(solve_kernel(params_a()), g);
  const double ck = stability_constant(T);
  CHECK(std::isfinite(ck));
  CHECK(ck >= 1.0);
  CHECK(kernel_l2_triangle(T) > 0.0);
}

TEST_CASE("grid length must match the kernel") {
  const Kernel k = solve_kernel(params_a());
  CHECK_THROWS_AS(build_upsilon(k, Grid{21, 2.0}), Error);
}
