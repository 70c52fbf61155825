#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hnls/kernel.hpp"
#include "hnls/stepper.hpp"
#include "hnls/transform.hpp"

namespace hnls {

struct ObserverOptions {
  ObserverSign sign = ObserverSign::plus;
  KernelOptions kernel;
  OperatorOptions op;
  std::vector<double> snapshot_times;
};

/// +1 or -1 such that the error equation reads ut_t + A0 ut + s i p1 y(ut) = 0 and the
/// observer target reads wh_t + A_r wh = s i g y(ut); y is the measured trace.
double injection_sign(Family f);

/// CN system of the error equation; the trace injection is part of the implicit matrix.
CnSystem make_error_system(const Grid& g, const PhysicsParams& p, double dt, const Eigen::VectorXcd& p1,
                           const OperatorOptions& op = {});

/// Direct evolution of the error system. l2_u holds ||ut||, trace holds y(ut).
RunRecord run_error(const Eigen::VectorXcd& ut0, const PhysicsParams& p, const Grid& g, const TimeGrid& tg,
                    const Eigen::VectorXcd& p1, const OperatorOptions& op = {}, const RunOptions& ro = {});

/// Error through the damped target: wt evolves in the target system and ut = (I - Upsilon_p) wt.
RunRecord run_error_target_route(const Eigen::VectorXcd& ut0, const PhysicsParams& p, const Grid& g,
                                 const TimeGrid& tg, const TransformMatrix& Tp, const OperatorOptions& op = {});

/// Observer target driven by a precomputed error-trace series (one value per time level).
/// When Tk is given, l2_u holds ||uhat|| with uhat = (I - Upsilon_k)^{-1} what.
RunRecord run_observer_target(const Eigen::VectorXcd& what0, const std::vector<cplx>& error_trace,
                              const Eigen::VectorXcd& g_transformed, const PhysicsParams& p, const Grid& g,
                              const TimeGrid& tg, const OperatorOptions& op = {},
                              const TransformMatrix* Tk = nullptr);

struct ObserverRun {
  std::vector<double> t;
  std::vector<double> l2_u, l2_uhat, l2_utilde, l2_what;
  std::vector<cplx> g0;
  /// max over steps of | ||u - uhat|| - ||ut|| |
  double max_consistency = 0.0;
  Eigen::VectorXcd p1, g;
  int control_iterations = 0, observer_iterations = 0;
  std::vector<Snapshot> snap_u, snap_uhat, snap_utilde;
};

ObserverRun run_plant_observer(const Eigen::VectorXcd& u0, const Eigen::VectorXcd& uhat0, const PhysicsParams& p,
                               const Grid& g, const TimeGrid& tg, const ObserverOptions& opt = {});

}  // namespace hnls
