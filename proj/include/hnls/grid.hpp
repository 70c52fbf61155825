#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hnls/common.hpp"

namespace hnls {

struct PhysicsParams;

/// Uniform spatial grid x_m = m h, m = 0..M-1, h = L/(M-1).
struct Grid {
  int M = 201;
  double L = 3.14159265358979323846;

  double h() const { return L / (M - 1); }
  double x(int m) const { return m == M - 1 ? L : m * h(); }
  void validate() const;
};

struct StateVector {
  Grid grid;
  Family family = Family::A;
  Eigen::VectorXcd values;
};

/// Discretization of the third derivative in the interior rows.
/// centered: (u_{m+2} - 2u_{m+1} + 2u_{m-1} - u_{m-2}) / (2h^3), one-sided at the first interior row.
/// paper: forward-forward-backward product, first order.
enum class Stencil { centered, paper };

struct OperatorOptions {
  bool include_damping = true;
  Stencil stencil = Stencil::centered;
};

struct ConstraintRow {
  int row;
  std::vector<std::pair<int, double>> entries;
};

/// Rows replaced by boundary constraints, with right-hand side zero.
std::vector<ConstraintRow> boundary_rows(const Grid& g, Family f);

/// A = beta D3 - i alpha D2 + delta D1 (+ r I) on rows 1..M-3; boundary rows are zero.
Eigen::MatrixXcd interior_operator(const Grid& g, const PhysicsParams& p, const OperatorOptions& opt);

/// interior_operator with the boundary rows overwritten by the constraint rows of the family.
Eigen::MatrixXcd build_operator(const Grid& g, const PhysicsParams& p, Family f, const OperatorOptions& opt);

Eigen::MatrixXd forward_difference(const Grid& g);
Eigen::MatrixXd backward_difference(const Grid& g);

/// One-sided second-order u_xx(L): (-u_{M-4} + 4u_{M-3} - 5u_{M-2} + 2u_{M-1}) / h^2.
Eigen::RowVectorXd trace_uxx_row(const Grid& g);
cplx trace_uxx_L(const Eigen::VectorXcd& v, const Grid& g);

/// Measured boundary trace: u_xx(L) for family A, u(L) for family B.
Eigen::RowVectorXd measurement_row(const Grid& g, Family f);

/// Trapezoidal L2(0,L) norm.
double l2_norm(const Eigen::VectorXcd& v, const Grid& g);

/// Samples a function of x on the grid.
template <class F>
Eigen::VectorXcd sample(const Grid& g, F&& f) {
  Eigen::VectorXcd v(g.M);
  for (int m = 0; m < g.M; ++m) v[m] = f(g.x(m));
  return v;
}

}  // namespace hnls
