#include "hnls/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hnls {

void TimeGrid::validate() const {
  if (N < 2) throw Error(ErrorKind::config, "time grid needs N >= 2");
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::config, "time grid needs T > 0");
}

int NonlinearSolveReport::max_iterations() const {
  return iterations.empty() ? 0 : *std::max_element(iterations.begin(), iterations.end());
}

double NonlinearSolveReport::mean_iterations() const {
  if (iterations.empty()) return 0.0;
  return std::accumulate(iterations.begin(), iterations.end(), 0.0) / iterations.size();
}

CnSystem::CnSystem(const Grid& g, Family f, const Eigen::MatrixXcd& A, double dt)
    : grid_(g), family_(f), dt_(dt), mask_(Eigen::VectorXd::Ones(g.M)) {
  const int M = g.M;
  if (A.rows() != M || A.cols() != M) throw Error(ErrorKind::domain, "CnSystem: operator size differs from grid");
  lhs_ = Eigen::MatrixXcd::Identity(M, M) + 0.5 * dt * A;
  rhs_ = Eigen::MatrixXcd::Identity(M, M) - 0.5 * dt * A;
  for (const auto& c : boundary_rows(g, f)) {
    lhs_.row(c.row).setZero();
    rhs_.row(c.row).setZero();
    for (auto [j, v] : c.entries) lhs_(c.row, j) = v;
    mask_[c.row] = 0.0;
  }
  lu_.compute(lhs_);
}

Eigen::VectorXcd CnSystem::step(const Eigen::VectorXcd& w) const { return lu_.solve(rhs_ * w); }

Eigen::VectorXcd CnSystem::step(const Eigen::VectorXcd& w, const Eigen::VectorXcd& forcing_avg) const {
  Eigen::VectorXcd r = rhs_ * w + dt_ * mask_.cwiseProduct(forcing_avg);
  return lu_.solve(r);
}

CnSystem make_cn(const Grid& g, const PhysicsParams& p, Family f, double dt, const OperatorOptions& opt) {
  return CnSystem(g, f, interior_operator(g, p, opt), dt);
}

Eigen::VectorXcd step_linear(const CnSystem& sys, const Eigen::VectorXcd& w) { return sys.step(w); }

namespace {

void newton_column(const Eigen::MatrixXcd& LK, const Eigen::MatrixXcd& CK, const Eigen::VectorXd& a,
                   const Eigen::VectorXcd& b, Eigen::MatrixXd& J, int j) {
  const int M = static_cast<int>(LK.rows());
  for (int i = 0; i < M; ++i) {
    const cplx ja = -LK(i, j) + CK(i, j) * a[j];
    const cplx jb = CK(i, j) * b[j];
    J(i, j) = ja.real() + jb.real();
    J(i, j + M) = -ja.imag() + jb.imag();
    J(i + M, j) = ja.imag() + jb.imag();
    J(i + M, j + M) = ja.real() - jb.real();
  }
}

}  // namespace

Eigen::MatrixXd assemble_newton_jacobian(const Eigen::MatrixXcd& LK, const Eigen::MatrixXcd& CK,
                                         const Eigen::VectorXd& a, const Eigen::VectorXcd& b) {
  const int M = static_cast<int>(LK.rows());
  Eigen::MatrixXd J(2 * M, 2 * M);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < M; ++j) newton_column(LK, CK, a, b, J, j);
  return J;
}

namespace serial {
Eigen::MatrixXd assemble_newton_jacobian(const Eigen::MatrixXcd& LK, const Eigen::MatrixXcd& CK,
                                         const Eigen::VectorXd& a, const Eigen::VectorXcd& b) {
  const int M = static_cast<int>(LK.rows());
  Eigen::MatrixXd J(2 * M, 2 * M);
  for (int j = 0; j < M; ++j) newton_column(LK, CK, a, b, J, j);
  return J;
}
}  // namespace serial

NonlinearStepper::NonlinearStepper(const CnSystem& sys, Eigen::MatrixXcd K, double p, NonlinearOptions opt)
    : sys_(sys), K_(std::move(K)), p_(p), opt_(opt) {
  const int M = sys.grid().M;
  if (K_.rows() != M || K_.cols() != M) throw Error(ErrorKind::domain, "NonlinearStepper: K size differs from grid");
  if (!(p > 0.0)) throw Error(ErrorKind::config, "NonlinearStepper: p must be > 0");
  c_ = (0.5 * sys.dt()) * I * sys.mask().cast<cplx>();
  LK_ = sys.lhs() * K_;
  CK_ = c_.asDiagonal() * K_;
}

Eigen::VectorXcd NonlinearStepper::to_u(const Eigen::VectorXcd& w) const {
  return K_.triangularView<Eigen::Upper>().solve(w);
}

Eigen::VectorXcd NonlinearStepper::nonlinearity(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd n(u.size());
  for (Eigen::Index m = 0; m < u.size(); ++m) n[m] = std::pow(std::abs(u[m]), p_) * u[m];
  return n;
}

Eigen::VectorXcd NonlinearStepper::residual(const Eigen::VectorXcd& F, const Eigen::VectorXcd& w) const {
  return F - sys_.lhs() * w + CK_ * nonlinearity(to_u(w));
}

Eigen::VectorXcd NonlinearStepper::step(const Eigen::VectorXcd& w, int* iterations, double* final_correction) const {
  const Grid& g = sys_.grid();
  const int M = g.M;
  const Eigen::VectorXcd F = sys_.rhs() * w + CK_ * nonlinearity(to_u(w));
  Eigen::VectorXcd wk = w;
  Eigen::VectorXcd R = residual(F, wk);
  int k = 0;
  double est = 0.0;
  do {
    const Eigen::VectorXcd u = to_u(wk);
    Eigen::VectorXcd du(M);
    if (opt_.scheme == Linearization::taylor) {
      Eigen::VectorXd a(M);
      Eigen::VectorXcd b(M);
      for (int m = 0; m < M; ++m) {
        const double au = std::abs(u[m]);
        const double ap = std::pow(au, p_);
        a[m] = (1.0 + 0.5 * p_) * ap;
        b[m] = au > 0.0 ? 0.5 * p_ * ap * (u[m] / au) * (u[m] / au) : cplx{};
      }
      const Eigen::MatrixXd J = assemble_newton_jacobian(LK_, CK_, a, b);
      Eigen::VectorXd rhs(2 * M);
      rhs << -R.real(), -R.imag();
      const Eigen::VectorXd z = J.partialPivLu().solve(rhs);
      du.real() = z.head(M);
      du.imag() = z.tail(M);
    } else {
      Eigen::VectorXcd D(M);
      for (int m = 0; m < M; ++m) {
        const double au = std::abs(u[m]);
        D[m] = std::pow(au, p_);
        if (opt_.scheme == Linearization::taylor_formal)
          D[m] += p_ * u[m] * std::pow(au * au + opt_.eps0, 0.5 * (p_ - 1.0));
      }
      const Eigen::MatrixXcd J = -LK_ + CK_ * D.asDiagonal();
      du = J.partialPivLu().solve(-R);
    }
    wk += K_ * du;
    ++k;
    R = residual(F, wk);
    est = l2_norm(sys_.solve_lhs(R), g);
    if (!std::isfinite(est)) throw Error(ErrorKind::solver, "nonlinear inner iteration produced a non-finite state");
  } while (est > opt_.inner_tol && k < opt_.max_inner);
  if (est > opt_.inner_tol) {
    std::ostringstream os;
    os << "nonlinear inner iteration did not converge in " << opt_.max_inner << " iterations (estimate " << est << ")";
    throw Error(ErrorKind::solver, os.str());
  }
  if (iterations) *iterations = k;
  if (final_correction) *final_correction = est;
  return wk;
}

RunRecord run_target(const Eigen::VectorXcd& w0, const CnSystem& sys, const TimeGrid& tg, const TransformMatrix* T,
                     const NonlinearStepper* nl, const RunOptions& opt) {
  tg.validate();
  const Grid& g = sys.grid();
  if (w0.size() != g.M) throw Error(ErrorKind::domain, "run_target: initial state size differs from grid");
  if (std::abs(sys.dt() - tg.dt()) > 1e-14 * tg.dt()) throw Error(ErrorKind::domain, "run_target: dt mismatch");
  const Eigen::RowVectorXd meas = measurement_row(g, sys.family());
  RunRecord rec;
  rec.t.reserve(tg.N);
  std::vector<int> snap_step;
  for (double ts : opt.snapshot_times) {
    if (ts < 0.0 || ts > tg.T) throw Error(ErrorKind::config, "snapshot time outside the horizon");
    snap_step.push_back(static_cast<int>(std::lround(ts / tg.dt())));
  }
  Eigen::VectorXcd w = w0;
  auto record = [&](int n) {
    const Eigen::VectorXcd u = T ? invert(*T, w) : w;
    const double nw = l2_norm(w, g), nu = T ? l2_norm(u, g) : nw;
    if (!std::isfinite(nw) || !std::isfinite(nu)) {
      std::ostringstream os;
      os << "solution became non-finite at t = " << tg.t(n);
      throw Error(ErrorKind::solver, os.str());
    }
    rec.t.push_back(tg.t(n));
    rec.l2_w.push_back(nw);
    rec.l2_u.push_back(nu);
    rec.g0.push_back(T ? control_signal(*T, u) : cplx{});
    rec.trace.push_back((meas.cast<cplx>() * u).value());
    if (opt.reference.size() == g.M) rec.deviation.push_back(l2_norm(u - opt.reference, g));
    for (std::size_t s = 0; s < snap_step.size(); ++s)
      if (snap_step[s] == n) rec.snapshots.push_back({tg.t(n), u});
    if (n == tg.N - 1) {
      rec.final_w = w;
      rec.final_u = u;
    }
  };
  record(0);
  for (int n = 1; n < tg.N; ++n) {
    if (nl) {
      int its = 0;
      double corr = 0.0;
      w = nl->step(w, &its, &corr);
      rec.solve.iterations.push_back(its);
      rec.solve.final_correction.push_back(corr);
    } else {
      w = sys.step(w);
    }
    record(n);
  }
  return rec;
}

}  // namespace hnls
