#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "hnls/experiment.hpp"
#include "oracles.hpp"

using namespace hnls;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void run(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PhysicsParams family_a(double beta, double alpha, double delta, double r) {
  PhysicsParams p;
  p.beta = beta;
  p.alpha = alpha;
  p.delta = delta;
  p.r = r;
  return p;
}

PhysicsParams family_b(double beta, double alpha, double delta, double r) {
  PhysicsParams p = family_a(beta, alpha, delta, r);
  p.family = Family::B;
  return p;
}

Eigen::VectorXcd exp1_datum(const Grid& g) { return initial_condition("exp1", g); }

double stationary_drift(int M, int N) {
  PhysicsParams p = family_a(1.0, 2.0, 8.0, 0.0);
  const Grid g{M, p.L};
  const TimeGrid tg{N, 1.0};
  OperatorOptions op;
  op.include_damping = false;
  const CnSystem sys = make_cn(g, p, Family::A, tg.dt(), op);
  RunOptions ro;
  ro.reference = exp1_datum(g);
  const RunRecord rec = run_target(ro.reference, sys, tg, nullptr, nullptr, ro);
  double dev = 0.0;
  for (double d : rec.deviation) dev = std::max(dev, d);
  return dev / rec.l2_u.front();
}

}  // namespace

int main() {
  run(1, [] {
    const auto t0 = std::chrono::steady_clock::now();
    const PhysicsParams p = family_a(1.0, 2.0, 8.0, 1.0);
    const Kernel k = solve_kernel(p);
    const double secs = seconds_since(t0);
    bool bounded = true;
    double worst = 0.0;
    for (int n = 1; n <= k.iterations(); ++n) {
      const double ratio = k.increments()[n - 1] * 3.0 / std::abs(p.r_t()) / increment_bound(p, n);
      worst = std::max(worst, ratio);
      bounded = bounded && ratio <= 1.0;
    }
    const bool ok = bounded && k.last_increment() <= 1e-12 && k.iterations() <= 60 && secs < 5.0;
    report(1, ok,
           fmt("iterations %d, last increment %.3e, max increment/bound %.3e, %.3f s", k.iterations(),
               k.last_increment(), worst, secs));
  });

  run(2, [] {
    const auto t0 = std::chrono::steady_clock::now();
    const PhysicsParams pa = family_a(1.0, 2.0, 8.0, 1.0);
    const PhysicsParams pb = family_b(1.0, 1.0, 2.0, 1.0);
    const Kernel ks[] = {solve_kernel(pa), solve_kernel(pb), observer_kernel(pa), observer_kernel(pb)};
    const char* names[] = {"k", "ell", "p", "p(B)"};
    double bc = 0.0, pde = 0.0;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
      const KernelResidual r = kernel_residual(ks[i]);
      bc = std::max(bc, r.bc_max);
      pde = std::max(pde, r.pde_max);
      detail += fmt("%s bc %.1e pde %.1e; ", names[i], r.bc_max, r.pde_max);
    }
    const double secs = seconds_since(t0);
    report(2, bc <= 1e-10 && pde <= 1e-6 && secs < 10.0, detail + fmt("%.3f s", secs));
  });

  run(3, [] {
    const PhysicsParams p = family_a(1.0, 2.0, 8.0, 1.0);
    const double L = p.L;
    const Kernel pk = observer_kernel(p);
    const Kernel km = observer_kernel(p, {}, ObserverSign::minus);
    const Kernel kp = solve_kernel(p);
    const Kernel k_minus(p, KernelRole::control_k, -p.r, km.G(), km.increments(), km.tol());
    double lit = 0.0, plus = 0.0;
    const int n = 51;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double x = L * i / (n - 1), y = L * j / (n - 1);
        lit = std::max(lit, std::abs(pk.eval(x, y) - k_minus.eval(L - y, L - x)));
        plus = std::max(plus, std::abs(pk.eval(x, y) - kp.eval(L - y, L - x)));
      }
    const KernelResidual rm = kernel_residual(km);
    std::printf("INFO criterion 3: p(x,y) = k_{+r}(L-y,L-x) holds to %.3e; the reflected -r kernel has "
                "observer boundary residual %.3e\n",
                plus, rm.bc_max);
    report(3, lit <= 1e-13, fmt("max |p(x,y) - k_{-r}(L-y,L-x)| = %.3e", lit));
  });

  run(4, [] {
    const PhysicsParams p = family_a(1.0, 2.0, 8.0, 1.0);
    const Grid g{201, p.L};
    const TransformMatrix T = build_upsilon(solve_kernel(p), g);
    const Eigen::MatrixXcd K = forward_matrix(T);
    double lower = 0.0, diag = 0.0;
    for (int i = 0; i < g.M; ++i) {
      diag = std::max(diag, std::abs(K(i, i) - 1.0));
      for (int j = 0; j < i; ++j) lower = std::max(lower, std::abs(K(i, j)));
    }
    const Eigen::VectorXcd u = exp1_datum(g);
    const double rt = (invert(T, forward(T, u)) - u).norm() / u.norm();
    const Eigen::VectorXcd w = forward(T, u);
    const Eigen::VectorXcd a = invert(T, w), b = oracle::fixed_point_invert(T, w);
    const double fp = (a - b).norm() / a.norm();
    report(4, lower == 0.0 && diag <= 1e-13 && rt <= 1e-12 && fp <= 1e-10,
           fmt("max |diag - 1| %.2e, max |lower| %.1e, round trip %.2e, fixed point %.2e", diag, lower, rt, fp));
  });

  run(5, [] {
    const double d1 = stationary_drift(201, 1000);
    const double d2 = stationary_drift(401, 1999);
    const double ratio = d1 / d2;
    report(5, d1 <= 0.02 && ratio >= 3.0 && ratio <= 5.0,
           fmt("drift %.4e at M=201/N=1000, %.4e at M=401/N=1999, ratio %.2f", d1, d2, ratio));
  });

  run(6, [] {
    const double g1 = run_experiment(preset("exp1_linear")).summary["gamma"];
    double gs[3];
    const double rs[3] = {0.5, 1.0, 2.0};
    for (int i = 0; i < 3; ++i) {
      ExperimentConfig c = preset("exp1_linear");
      c.params.r = rs[i];
      gs[i] = run_experiment(c).summary["gamma"];
    }
    const bool mono = gs[0] < gs[1] && gs[1] < gs[2];
    report(6, g1 >= 0.8 && g1 <= 1.5 && mono,
           fmt("gamma %.4f on [1,4]; sweep r = 0.5, 1, 2 -> %.4f, %.4f, %.4f", g1, gs[0], gs[1], gs[2]));
  });

  run(7, [] {
    const ExperimentResult e2 = run_experiment(preset("exp2"));
    const double ratio = e2.summary["final_ratio"];
    const int its = e2.summary["inner_iterations"]["max"];
    const ExperimentResult e3 = run_experiment(preset("exp3"));
    const double g3 = e3.summary["gamma"];
    const std::string scheme3 = e3.summary["scheme"];
    report(7, ratio < 0.05 && its <= 3 && g3 >= 0.5 && scheme3 == "picard",
           fmt("p=2: ||u(1)||/||u0|| = %.4e, max Newton iterations %d; p=1/2 (%s): gamma %.4f", ratio, its,
               scheme3.c_str(), g3));
  });

  run(8, [] {
    PhysicsParams p = family_a(1.0, 2.0, 8.0, 1.0);
    p.p_power = 1.0;
    const Grid g{201, p.L};
    const TimeGrid tg{1000, 1.0};
    const TransformMatrix T = build_upsilon(solve_kernel(p), g);
    const CnSystem sys = make_cn(g, p, Family::A, tg.dt(), {});
    const Eigen::MatrixXcd K = forward_matrix(T);
    NonlinearOptions ta, pi;
    pi.scheme = Linearization::picard;
    const NonlinearStepper nt(sys, K, 1.0, ta), np(sys, K, 1.0, pi);
    Eigen::VectorXcd a = forward(T, exp1_datum(g)), b = a;
    double worst = 0.0;
    for (int n = 1; n < tg.N; ++n) {
      a = nt.step(a);
      b = np.step(b);
      worst = std::max(worst, l2_norm(nt.to_u(a) - np.to_u(b), g));
    }
    report(8, worst <= 1e-7, fmt("max_n ||u_taylor - u_picard|| = %.3e", worst));
  });

  run(9, [] {
    const ExperimentResult r = run_experiment(preset("exp4_observer"));
    const double g = r.summary["gamma"];
    const double cons = r.summary["consistency"];
    const auto& uh = r.norms.column("l2_uhat");
    const auto& u = r.norms.column("l2_u");
    double peak = 0.0;
    for (double v : uh) peak = std::max(peak, v);
    const bool shape = peak > uh.front() && uh.back() < 0.1 * peak && u.back() < u.front();
    report(9, g >= 0.8 * 0.2 && cons <= 1e-12 && shape,
           fmt("error gamma %.4f on [5,25] (need >= 0.16), max | ||u - uhat|| - ||ut|| | = %.1e, "
               "uhat peak %.3e -> final %.3e",
               g, cons, peak, uh.back()));
  });

  run(10, [] {
    std::string detail;
    bool ok = true;
    for (const char* name : {"bcb_exp1", "bcb_exp2", "bcb_exp3"}) {
      const ExperimentConfig c = preset(name);
      const double g = run_experiment(c).summary["gamma"];
      ok = ok && g >= 0.6 * c.params.r;
      detail += fmt("%s gamma %.4f (r %.2g); ", name, g, c.params.r);
    }
    const bool mono = run_experiment(preset("bcb_uncontrolled")).summary["nonincreasing_after_first_step"];
    report(10, ok && mono, detail + (mono ? "uncontrolled norm nonincreasing" : "uncontrolled norm increased"));
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
