#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hnls/kernel.hpp"
#include "hnls/kernel_io.hpp"
#include "oracles.hpp"

using namespace hnls;

namespace {

PhysicsParams params_a() {
  PhysicsParams p;
  p.beta = 1.0;
  p.alpha = 2.0;
  p.delta = 8.0;
  p.r = 1.0;
  return p;
}

PhysicsParams params_b() {
  PhysicsParams p;
  p.beta = 1.0;
  p.alpha = 1.0;
  p.delta = 2.0;
  p.r = 1.0;
  p.family = Family::B;
  return p;
}

std::pair<int, int> shift(SplitTerm t) {
  switch (t) {
    case SplitTerm::p2m2: return {2, -2};
    case SplitTerm::p1m1: return {1, -1};
    case SplitTerm::p2m1: return {2, -1};
    case SplitTerm::p1p0: return {1, 0};
    case SplitTerm::p2p0: return {2, 0};
    case SplitTerm::p2p1: return {2, 1};
  }
  return {0, 0};
}

}  // namespace

TEST_CASE("family A split operators match the monomial coefficient table") {
  PhysicsParams p = params_a();
  p.beta = 1.5;
  for (int m = 0; m <= 5; ++m)
    for (int k = 0; k <= 5; ++k)
      for (SplitTerm term : kSplitTerms) {
        const Poly2 out = apply_split(Poly2::monomial(m, k, 1.0), p, Family::A, term);
        const auto [i, j] = shift(term);
        const cplx want = oracle::split_coefficient(i, j, m, k, p.alpha_t(), p.delta_t(), p.r_t());
        CAPTURE(m);
        CAPTURE(k);
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::abs(out(m + i, k + j) - want) < 1e-14);
        double other = 0.0;
        for (int a = 0; a <= out.degree(); ++a)
          for (int b = 0; a + b <= out.degree(); ++b)
            if (a != m + i || b != k + j) other = std::max(other, std::abs(out(a, b)));
        CHECK(other == 0.0);
      }
}

TEST_CASE("apply_P is the sum of the split operators and linear") {
  const PhysicsParams p = params_b();
  Poly2 g = Poly2::monomial(1, 2, cplx(1.0, 0.5));
  g += Poly2::monomial(3, 0, cplx(-2.0, 0.0));
  Poly2 sum(g.degree() + 3);
  for (SplitTerm t : kSplitTerms) sum += apply_split(g, p, Family::B, t);
  const Poly2 P = apply_P(g, p, Family::B);
  for (int i = 0; i <= sum.degree(); ++i)
    for (int j = 0; i + j <= sum.degree(); ++j) CHECK(std::abs(P(i, j) - sum(i, j)) < 1e-15);
  const Poly2 P2 = apply_P(cplx(2.0) * g, p, Family::B);
  for (int i = 0; i <= sum.degree(); ++i)
    for (int j = 0; i + j <= sum.degree(); ++j) CHECK(std::abs(P2(i, j) - 2.0 * P(i, j)) < 1e-14);
}

TEST_CASE("family A kernel converges within the factorial bound") {
  const PhysicsParams p = params_a();
  const Kernel k = solve_kernel(p);
  CHECK(k.role() == KernelRole::control_k);
  CHECK(k.iterations() <= 60);
  CHECK(k.last_increment() <= 1e-12);
  const double scale = 3.0 / std::abs(p.r_t());
  for (int n = 1; n <= k.iterations(); ++n) CHECK(scale * k.increments()[n - 1] <= increment_bound(p, n));
}

TEST_CASE("kernel residuals for all four boundary value problems") {
  const Kernel ka = solve_kernel(params_a());
  const Kernel kb = solve_kernel(params_b());
  const Kernel pa = observer_kernel(params_a());
  const Kernel pb = observer_kernel(params_b());
  CHECK(kb.role() == KernelRole::control_ell);
  for (const Kernel* k : {&ka, &kb, &pa, &pb}) {
    const KernelResidual r = kernel_residual(*k);
    CAPTURE(to_string(k->role()));
    CHECK(r.bc_max <= 1e-10);
    CHECK(r.pde_max <= 1e-6);
    CHECK(r.bc_terms.size() == 3);
  }
}

TEST_CASE("ell has slope +r(L-x)/3 on the diagonal") {
  const PhysicsParams p = params_b();
  const Kernel l = solve_kernel(p);
  for (double x : {0.0, 0.5, 1.5, 3.0}) {
    const cplx v = kernel_eval(l, x, x, 1, 0);
    CHECK(std::abs(v - p.r_t() * (p.L - x) / 3.0) < 1e-12);
  }
}

TEST_CASE("control kernel vanishes on the diagonal and at y = L") {
  const Kernel k = solve_kernel(params_a());
  for (double x : {0.0, 1.0, 2.5, 3.14159265358979323846}) {
    CHECK(std::abs(kernel_eval(k, x, x)) < 1e-12);
    CHECK(std::abs(kernel_eval(k, x, k.params().L)) < 1e-12);
  }
}

TEST_CASE("observer kernel with the reflected rate fails its boundary value problem") {
  const Kernel pm = observer_kernel(params_a(), {}, ObserverSign::minus);
  CHECK(pm.rate() == doctest::Approx(-1.0));
  const KernelResidual r = kernel_residual(pm);
  CHECK(r.bc_max > 1e-3);
}

TEST_CASE("zero rate gives the zero kernel") {
  PhysicsParams p = params_a();
  p.r = 0.0;
  const Kernel k = solve_kernel(p);
  CHECK(k.G().is_zero());
  CHECK(kernel_eval(k, 0.3, 1.2) == cplx(0.0));
}

TEST_CASE("kernel errors") {
  const Kernel k = solve_kernel(params_a());
  CHECK_THROWS_AS(kernel_eval(k, 2.0, 1.0), Error);
  CHECK_THROWS_AS(kernel_eval(k, -0.1, 1.0), Error);
  CHECK_THROWS_AS(kernel_eval(k, 0.0, 4.0), Error);
  CHECK_THROWS_AS(kernel_eval(k, 0.0, 1.0, 4, 0), Error);
  KernelOptions few;
  few.max_iter = 3;
  try {
    solve_kernel(params_a(), few);
    FAIL("expected kernel failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kernel);
  }
  PhysicsParams bad = params_a();
  bad.beta = 0.0;
  CHECK_THROWS_AS(solve_kernel(bad), Error);
  bad = params_b();
  bad.delta = -1.0;
  CHECK_THROWS_AS(solve_kernel(bad), Error);
}

TEST_CASE("kernel export round-trips exactly") {
  for (const Kernel& k : {solve_kernel(params_a()), solve_kernel(params_b()), observer_kernel(params_a())}) {
    std::stringstream ss;
    write_kernel(ss, k);
    const std::string first = ss.str();
    CHECK(first.rfind("# {", 0) == 0);
    const Kernel back = read_kernel(ss);
    CHECK(back.role() == k.role());
    CHECK(back.rate() == k.rate());
    CHECK(back.params().family == k.params().family);
    CHECK(back.iterations() == k.iterations());
    for (double x : {0.0, 0.7, 2.0})
      for (double y : {2.0, 2.5, 3.1}) CHECK(back.eval(x, y) == k.eval(x, y));
    std::stringstream again;
    write_kernel(again, back);
    CHECK(again.str() == first);
  }
  std::stringstream junk("not a kernel\n");
  CHECK_THROWS_AS(read_kernel(junk), Error);
}

TEST_CASE("observer gains are finite and family dependent") {
  const Grid g{51, params_a().L};
  const Eigen::VectorXcd ga = observer_gain(observer_kernel(params_a()), g);
  const Eigen::VectorXcd gb = observer_gain(observer_kernel(params_b()), g);
  CHECK(ga.allFinite());
  CHECK(gb.allFinite());
  CHECK(std::abs(ga[0]) < 1e-12);
  CHECK((ga - gb).norm() > 1e-6);
}
