#pragma once

#include <Eigen/Dense>

#include "hnls/grid.hpp"
#include "hnls/kernel.hpp"

namespace hnls {

/// Trapezoidal discretization of the Volterra operator
/// (Upsilon u)(x) = int_x^L kernel(x,y) u(y) dy. Row i holds h*[k_ii/2, k_i,i+1, ..., k_iM/2];
/// the last row is zero.
struct TransformMatrix {
  Grid grid;
  KernelRole role = KernelRole::control_k;
  Eigen::MatrixXcd U;
};

TransformMatrix build_upsilon(const Kernel& k, const Grid& g);

namespace serial {
TransformMatrix build_upsilon(const Kernel& k, const Grid& g);
}

/// (I - Upsilon) u
Eigen::VectorXcd forward(const TransformMatrix& T, const Eigen::VectorXcd& u);
/// Solves (I - Upsilon) u = w by back substitution.
Eigen::VectorXcd invert(const TransformMatrix& T, const Eigen::VectorXcd& w);
Eigen::MatrixXcd forward_matrix(const TransformMatrix& T);

/// g0 = int_0^L kernel(0,y) u(y) dy, trapezoidal.
cplx control_signal(const TransformMatrix& T, const Eigen::VectorXcd& u);
cplx control_signal(const Kernel& k, const Grid& g, const Eigen::VectorXcd& u);

/// ||(I - Upsilon)^{-1}||_2 from power iteration on the normal operator.
double inverse_norm_estimate(const TransformMatrix& T, int iterations = 100);
/// ||kernel||_{L2(triangle)} from the trapezoidal weights in Upsilon.
double kernel_l2_triangle(const TransformMatrix& T);
/// c_k = ||(I - Upsilon)^{-1}|| (1 + ||k||_{L2}).
double stability_constant(const TransformMatrix& T, int iterations = 100);

}  // namespace hnls
