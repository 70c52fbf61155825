#include "hnls/observer.hpp"

#include <cmath>

namespace hnls {

double injection_sign(Family f) { return f == Family::A ? -1.0 : 1.0; }

CnSystem make_error_system(const Grid& g, const PhysicsParams& p, double dt, const Eigen::VectorXcd& p1,
                           const OperatorOptions& op) {
  OperatorOptions undamped = op;
  undamped.include_damping = false;
  Eigen::MatrixXcd A = interior_operator(g, p, undamped);
  const Eigen::RowVectorXcd y = measurement_row(g, p.family).cast<cplx>();
  A += (injection_sign(p.family) * I) * p1 * y;
  return CnSystem(g, p.family, A, dt);
}

namespace {

void check_sizes(const Grid& g, std::initializer_list<Eigen::Index> sizes) {
  for (auto s : sizes)
    if (s != g.M) throw Error(ErrorKind::domain, "observer: vector size differs from grid");
}

std::vector<int> snapshot_steps(const std::vector<double>& times, const TimeGrid& tg) {
  std::vector<int> out;
  for (double ts : times) {
    if (ts < 0.0 || ts > tg.T) throw Error(ErrorKind::config, "snapshot time outside the horizon");
    out.push_back(static_cast<int>(std::lround(ts / tg.dt())));
  }
  return out;
}

}  // namespace

RunRecord run_error(const Eigen::VectorXcd& ut0, const PhysicsParams& p, const Grid& g, const TimeGrid& tg,
                    const Eigen::VectorXcd& p1, const OperatorOptions& op, const RunOptions& ro) {
  check_sizes(g, {ut0.size(), p1.size()});
  const CnSystem sys = make_error_system(g, p, tg.dt(), p1, op);
  return run_target(ut0, sys, tg, nullptr, nullptr, ro);
}

RunRecord run_error_target_route(const Eigen::VectorXcd& ut0, const PhysicsParams& p, const Grid& g,
                                 const TimeGrid& tg, const TransformMatrix& Tp, const OperatorOptions& op) {
  check_sizes(g, {ut0.size()});
  tg.validate();
  OperatorOptions damped = op;
  damped.include_damping = true;
  const CnSystem sys = make_cn(g, p, p.family, tg.dt(), damped);
  const Eigen::RowVectorXcd y = measurement_row(g, p.family).cast<cplx>();
  RunRecord rec;
  Eigen::VectorXcd wt = invert(Tp, ut0);
  for (int n = 0; n < tg.N; ++n) {
    if (n > 0) wt = sys.step(wt);
    const Eigen::VectorXcd ut = forward(Tp, wt);
    rec.t.push_back(tg.t(n));
    rec.l2_w.push_back(l2_norm(wt, g));
    rec.l2_u.push_back(l2_norm(ut, g));
    rec.g0.push_back(cplx{});
    rec.trace.push_back((y * ut).value());
    if (n == tg.N - 1) {
      rec.final_w = wt;
      rec.final_u = ut;
    }
  }
  return rec;
}

RunRecord run_observer_target(const Eigen::VectorXcd& what0, const std::vector<cplx>& error_trace,
                              const Eigen::VectorXcd& g_transformed, const PhysicsParams& p, const Grid& g,
                              const TimeGrid& tg, const OperatorOptions& op, const TransformMatrix* Tk) {
  check_sizes(g, {what0.size(), g_transformed.size()});
  tg.validate();
  if (static_cast<int>(error_trace.size()) != tg.N)
    throw Error(ErrorKind::domain, "run_observer_target: trace series length differs from N");
  OperatorOptions damped = op;
  damped.include_damping = true;
  const CnSystem sys = make_cn(g, p, p.family, tg.dt(), damped);
  const Eigen::RowVectorXcd y = measurement_row(g, p.family).cast<cplx>();
  const cplx s = injection_sign(p.family) * I;
  RunRecord rec;
  Eigen::VectorXcd w = what0;
  for (int n = 0; n < tg.N; ++n) {
    if (n > 0) w = sys.step(w, (s * 0.5 * (error_trace[n - 1] + error_trace[n])) * g_transformed);
    const Eigen::VectorXcd u = Tk ? invert(*Tk, w) : w;
    rec.t.push_back(tg.t(n));
    rec.l2_w.push_back(l2_norm(w, g));
    rec.l2_u.push_back(l2_norm(u, g));
    rec.g0.push_back(Tk ? control_signal(*Tk, u) : cplx{});
    rec.trace.push_back((y * u).value());
    if (n == tg.N - 1) {
      rec.final_w = w;
      rec.final_u = u;
    }
  }
  return rec;
}

ObserverRun run_plant_observer(const Eigen::VectorXcd& u0, const Eigen::VectorXcd& uhat0, const PhysicsParams& p,
                               const Grid& g, const TimeGrid& tg, const ObserverOptions& opt) {
  check_sizes(g, {u0.size(), uhat0.size()});
  tg.validate();
  const Kernel kc = solve_kernel(p, opt.kernel);
  const Kernel kp = observer_kernel(p, opt.kernel, opt.sign);
  const TransformMatrix Tk = build_upsilon(kc, g);

  ObserverRun run;
  run.control_iterations = kc.iterations();
  run.observer_iterations = kp.iterations();
  run.p1 = observer_gain(kp, g);
  run.g = forward(Tk, run.p1);

  const CnSystem err = make_error_system(g, p, tg.dt(), run.p1, opt.op);
  OperatorOptions damped = opt.op;
  damped.include_damping = true;
  const CnSystem obs = make_cn(g, p, p.family, tg.dt(), damped);
  const Eigen::RowVectorXcd y = measurement_row(g, p.family).cast<cplx>();
  const cplx s = injection_sign(p.family) * I;
  const std::vector<int> snaps = snapshot_steps(opt.snapshot_times, tg);

  Eigen::VectorXcd ut = u0 - uhat0;
  Eigen::VectorXcd what = forward(Tk, uhat0);
  cplx y_prev = (y * ut).value();
  for (int n = 0; n < tg.N; ++n) {
    if (n > 0) {
      ut = err.step(ut);
      const cplx y_now = (y * ut).value();
      what = obs.step(what, (s * 0.5 * (y_prev + y_now)) * run.g);
      y_prev = y_now;
    }
    const Eigen::VectorXcd uhat = invert(Tk, what);
    const Eigen::VectorXcd u = uhat + ut;
    const double nu = l2_norm(u, g), nh = l2_norm(uhat, g), ne = l2_norm(ut, g);
    if (!std::isfinite(nu) || !std::isfinite(nh) || !std::isfinite(ne))
      throw Error(ErrorKind::solver, "observer run became non-finite");
    run.t.push_back(tg.t(n));
    run.l2_u.push_back(nu);
    run.l2_uhat.push_back(nh);
    run.l2_utilde.push_back(ne);
    run.l2_what.push_back(l2_norm(what, g));
    run.g0.push_back(control_signal(Tk, uhat));
    run.max_consistency = std::max(run.max_consistency, std::abs(l2_norm(u - uhat, g) - ne));
    for (int st : snaps)
      if (st == n) {
        run.snap_u.push_back({tg.t(n), u});
        run.snap_uhat.push_back({tg.t(n), uhat});
        run.snap_utilde.push_back({tg.t(n), ut});
      }
  }
  return run;
}

}  // namespace hnls
