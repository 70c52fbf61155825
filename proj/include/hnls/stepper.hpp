#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hnls/grid.hpp"
#include "hnls/transform.hpp"

namespace hnls {

/// N time levels t_n = n dt, dt = T/(N-1).
struct TimeGrid {
  int N = 1000;
  double T = 1.0;

  double dt() const { return T / (N - 1); }
  double t(int n) const { return n == N - 1 ? T : n * dt(); }
  void validate() const;
};

/// taylor: exact real-linear Newton for |u|^p u. taylor_formal: the formal derivative
/// |u|^p + p u |u|^(p-1). picard: lagged coefficient |u|^p.
enum class Linearization { taylor, taylor_formal, picard };

struct NonlinearOptions {
  Linearization scheme = Linearization::taylor;
  double inner_tol = 1e-10;
  int max_inner = 50;
  double eps0 = 1e-14;
};

struct NonlinearSolveReport {
  std::vector<int> iterations;
  std::vector<double> final_correction;

  int max_iterations() const;
  double mean_iterations() const;
};

struct Snapshot {
  double t = 0.0;
  Eigen::VectorXcd u;
};

struct RunRecord {
  std::vector<double> t;
  std::vector<double> l2_w;
  std::vector<double> l2_u;
  std::vector<cplx> g0;
  /// Measured trace of u: u_xx(L) for family A, u(L) for family B.
  std::vector<cplx> trace;
  std::vector<Snapshot> snapshots;
  std::vector<double> deviation;
  NonlinearSolveReport solve;
  Eigen::VectorXcd final_w;
  Eigen::VectorXcd final_u;
};

/// Crank-Nicolson pair (I + dt/2 A, I - dt/2 A) with the boundary rows replaced by
/// constraint rows (left) and zero rows (right).
class CnSystem {
 public:
  CnSystem(const Grid& g, Family f, const Eigen::MatrixXcd& A, double dt);

  const Grid& grid() const { return grid_; }
  Family family() const { return family_; }
  double dt() const { return dt_; }
  const Eigen::MatrixXcd& lhs() const { return lhs_; }
  const Eigen::MatrixXcd& rhs() const { return rhs_; }
  /// 1 on rows carrying the evolution equation, 0 on constraint rows.
  const Eigen::VectorXd& mask() const { return mask_; }

  Eigen::VectorXcd step(const Eigen::VectorXcd& w) const;
  /// forcing_avg is (f^n + f^{n+1})/2; it is masked on constraint rows.
  Eigen::VectorXcd step(const Eigen::VectorXcd& w, const Eigen::VectorXcd& forcing_avg) const;
  Eigen::VectorXcd solve_lhs(const Eigen::VectorXcd& r) const { return lu_.solve(r); }

 private:
  Grid grid_;
  Family family_;
  double dt_;
  Eigen::MatrixXcd lhs_, rhs_;
  Eigen::VectorXd mask_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// CN system for w_t + A w = 0 with A from build_operator conventions.
CnSystem make_cn(const Grid& g, const PhysicsParams& p, Family f, double dt, const OperatorOptions& opt);

Eigen::VectorXcd step_linear(const CnSystem& sys, const Eigen::VectorXcd& w);

/// Real 2M x 2M Newton matrix for R + Ja z + Jb conj(z) = 0 with
/// Ja = -LK + CK diag(a), Jb = CK diag(b).
Eigen::MatrixXd assemble_newton_jacobian(const Eigen::MatrixXcd& LK, const Eigen::MatrixXcd& CK,
                                         const Eigen::VectorXd& a, const Eigen::VectorXcd& b);
namespace serial {
Eigen::MatrixXd assemble_newton_jacobian(const Eigen::MatrixXcd& LK, const Eigen::MatrixXcd& CK,
                                         const Eigen::VectorXd& a, const Eigen::VectorXcd& b);
}

/// One CN step of (I + dt/2 A) w' - (i dt/2) K N(u') = (I - dt/2 A) w + (i dt/2) K N(u),
/// u = K^{-1} w, N(u) = |u|^p u, solved by inner iteration. K is upper triangular.
class NonlinearStepper {
 public:
  NonlinearStepper(const CnSystem& sys, Eigen::MatrixXcd K, double p, NonlinearOptions opt);

  Eigen::VectorXcd step(const Eigen::VectorXcd& w, int* iterations = nullptr, double* final_correction = nullptr) const;
  Eigen::VectorXcd to_u(const Eigen::VectorXcd& w) const;
  Eigen::VectorXcd nonlinearity(const Eigen::VectorXcd& u) const;
  const NonlinearOptions& options() const { return opt_; }

 private:
  Eigen::VectorXcd residual(const Eigen::VectorXcd& F, const Eigen::VectorXcd& w) const;

  const CnSystem& sys_;
  Eigen::MatrixXcd K_, LK_, CK_;
  Eigen::VectorXcd c_;
  double p_;
  NonlinearOptions opt_;
};

struct RunOptions {
  std::vector<double> snapshot_times;
  /// When nonempty, ||u_n - reference|| is recorded in RunRecord::deviation.
  Eigen::VectorXcd reference;
};

/// Evolves w from w0. When T is given, u = (I - Upsilon)^{-1} w and g0 are recorded;
/// otherwise u = w and g0 = 0. When nl is given the nonlinear stepper is used.
RunRecord run_target(const Eigen::VectorXcd& w0, const CnSystem& sys, const TimeGrid& tg,
                     const TransformMatrix* T = nullptr, const NonlinearStepper* nl = nullptr,
                     const RunOptions& opt = {});

}  // namespace hnls
