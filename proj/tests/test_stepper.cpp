#include <cmath>

#include "doctest.h"
#include "hnls/stepper.hpp"

using namespace hnls;

namespace {

const double kPi = 3.14159265358979323846;

Eigen::VectorXcd datum(const Grid& g) {
  return sample(g, [](double x) { return 3.0 - std::exp(4.0 * I * x) - 2.0 * std::exp(-2.0 * I * x); });
}

PhysicsParams exp1() {
  PhysicsParams p;
  p.alpha = 2.0;
  p.delta = 8.0;
  p.r = 1.0;
  return p;
}

struct Controlled {
  Grid g;
  TimeGrid tg;
  TransformMatrix T;
  CnSystem sys;
  Eigen::VectorXcd w0;

  Controlled(const PhysicsParams& p, int M, int N, double Tend)
      : g{M, p.L},
        tg{N, Tend},
        T(build_upsilon(solve_kernel(p), g)),
        sys(make_cn(g, p, p.family, tg.dt(), {})),
        w0(forward(T, datum(g))) {}
};

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid tg{5, 2.0};
  CHECK(tg.dt() == 0.5);
  CHECK(tg.t(4) == 2.0);
  CHECK_THROWS_AS((TimeGrid{1, 1.0}.validate()), Error);
}

TEST_CASE("linear step preserves zero and boundary constraints") {
  const PhysicsParams p = exp1();
  const Grid g{61, kPi};
  const CnSystem sys = make_cn(g, p, Family::A, 0.01, {});
  CHECK(step_linear(sys, Eigen::VectorXcd::Zero(g.M)).norm() == 0.0);
  const Eigen::VectorXcd w1 = step_linear(sys, datum(g));
  CHECK(std::abs(w1[0]) < 1e-12);
  CHECK(std::abs(w1[g.M - 1]) < 1e-12);
  CHECK(sys.mask().sum() == g.M - 3);
}

TEST_CASE("stationary solution is preserved by the uncontrolled scheme") {
  PhysicsParams p = exp1();
  p.r = 0.0;
  const Grid g{201, kPi};
  const TimeGrid tg{1000, 1.0};
  OperatorOptions op;
  op.include_damping = false;
  const CnSystem sys = make_cn(g, p, Family::A, tg.dt(), op);
  const Eigen::VectorXcd u0 = datum(g);
  RunOptions ro;
  ro.reference = u0;
  const RunRecord rec = run_target(u0, sys, tg, nullptr, nullptr, ro);
  CHECK(rec.deviation.back() / l2_norm(u0, g) <= 0.02);
}

TEST_CASE("nonlinear stepper with zero data stays at zero after one correction") {
  PhysicsParams p = exp1();
  p.p_power = 2.0;
  const Controlled c(p, 41, 11, 0.1);
  for (Linearization s : {Linearization::taylor, Linearization::taylor_formal, Linearization::picard}) {
    NonlinearOptions opt;
    opt.scheme = s;
    const NonlinearStepper nl(c.sys, forward_matrix(c.T), 2.0, opt);
    int its = 0;
    const Eigen::VectorXcd w = nl.step(Eigen::VectorXcd::Zero(c.g.M), &its);
    CHECK(w.norm() == 0.0);
    CHECK(its == 1);
  }
}

TEST_CASE("Taylor and Picard agree at p = 1") {
  PhysicsParams p = exp1();
  p.p_power = 1.0;
  const Controlled c(p, 101, 201, 1.0);
  const Eigen::MatrixXcd K = forward_matrix(c.T);
  NonlinearOptions ta, pi;
  ta.scheme = Linearization::taylor;
  pi.scheme = Linearization::picard;
  const NonlinearStepper nt(c.sys, K, 1.0, ta), np(c.sys, K, 1.0, pi);
  Eigen::VectorXcd a = c.w0, b = c.w0;
  double worst = 0.0;
  for (int n = 1; n < c.tg.N; ++n) {
    a = nt.step(a);
    b = np.step(b);
    worst = std::max(worst, l2_norm(nt.to_u(a) - np.to_u(b), c.g));
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("Newton needs at most three inner iterations at p = 2, r = 8") {
  PhysicsParams p = exp1();
  p.r = 8.0;
  p.p_power = 2.0;
  const Controlled c(p, 101, 200, 0.2);
  NonlinearOptions opt;
  const NonlinearStepper nl(c.sys, forward_matrix(c.T), 2.0, opt);
  const RunRecord rec = run_target(c.w0, c.sys, c.tg, &c.T, &nl);
  CHECK(rec.solve.max_iterations() <= 3);
  CHECK(rec.l2_u.back() < rec.l2_u.front());
}

TEST_CASE("formal Taylor converges but more slowly than Newton") {
  PhysicsParams p = exp1();
  p.r = 8.0;
  p.p_power = 2.0;
  const Controlled c(p, 61, 21, 0.2);
  const Eigen::MatrixXcd K = forward_matrix(c.T);
  NonlinearOptions nw, fm;
  fm.scheme = Linearization::taylor_formal;
  const NonlinearStepper a(c.sys, K, 2.0, nw), b(c.sys, K, 2.0, fm);
  const RunRecord ra = run_target(c.w0, c.sys, c.tg, &c.T, &a);
  const RunRecord rb = run_target(c.w0, c.sys, c.tg, &c.T, &b);
  CHECK(ra.solve.mean_iterations() <= rb.solve.mean_iterations());
  CHECK(std::abs(ra.l2_u.back() - rb.l2_u.back()) < 1e-8);
}

TEST_CASE("inner iteration failure is a solver error") {
  PhysicsParams p = exp1();
  p.r = 8.0;
  p.p_power = 2.0;
  const Controlled c(p, 41, 3, 0.5);
  NonlinearOptions opt;
  opt.scheme = Linearization::picard;
  opt.max_inner = 1;
  opt.inner_tol = 1e-300;
  const NonlinearStepper nl(c.sys, forward_matrix(c.T), 2.0, opt);
  try {
    nl.step(c.w0);
    FAIL("expected solver failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::solver);
  }
}

TEST_CASE("Newton Jacobian matches a finite-difference derivative") {
  const int M = 6;
  Eigen::MatrixXcd LK = Eigen::MatrixXcd::Random(M, M), CK = Eigen::MatrixXcd::Random(M, M);
  const Eigen::VectorXd a = Eigen::VectorXd::Random(M);
  const Eigen::VectorXcd b = Eigen::VectorXcd::Random(M);
  const Eigen::MatrixXd J = assemble_newton_jacobian(LK, CK, a, b);
  REQUIRE(J.rows() == 2 * M);
  auto F = [&](const Eigen::VectorXcd& z) -> Eigen::VectorXcd {
    Eigen::VectorXcd az = a.cast<cplx>().cwiseProduct(z);
    return -LK * z + CK * (az + b.cwiseProduct(z.conjugate()));
  };
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(M);
  for (int j = 0; j < M; ++j)
    for (int part = 0; part < 2; ++part) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(M);
      e[j] = part == 0 ? cplx(1.0) : I;
      const Eigen::VectorXcd col = F(e);
      for (int i = 0; i < M; ++i) {
        CHECK(J(i, j + part * M) == doctest::Approx(col[i].real()).epsilon(1e-12));
        CHECK(J(i + M, j + part * M) == doctest::Approx(col[i].imag()).epsilon(1e-12));
      }
    }
}
