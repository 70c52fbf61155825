#include "hnls/transform.hpp"

#include <cmath>

namespace hnls {

namespace {

void fill_row(const Kernel& k, const Grid& g, Eigen::MatrixXcd& U, int i) {
  const int M = g.M;
  const double h = g.h(), xi = g.x(i);
  for (int j = i; j < M; ++j) {
    const double w = (j == i || j == M - 1) ? 0.5 : 1.0;
    U(i, j) = h * w * k.eval(xi, g.x(j));
  }
}

TransformMatrix empty(const Kernel& k, const Grid& g) {
  g.validate();
  if (std::abs(g.L - k.params().L) > 1e-12 * g.L) throw Error(ErrorKind::domain, "grid length differs from kernel L");
  return {g, k.role(), Eigen::MatrixXcd::Zero(g.M, g.M)};
}

}  // namespace

TransformMatrix build_upsilon(const Kernel& k, const Grid& g) {
  TransformMatrix T = empty(k, g);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < g.M - 1; ++i) fill_row(k, g, T.U, i);
  return T;
}

namespace serial {
TransformMatrix build_upsilon(const Kernel& k, const Grid& g) {
  TransformMatrix T = empty(k, g);
  for (int i = 0; i < g.M - 1; ++i) fill_row(k, g, T.U, i);
  return T;
}
}  // namespace serial

Eigen::VectorXcd forward(const TransformMatrix& T, const Eigen::VectorXcd& u) {
  return u - T.U.triangularView<Eigen::Upper>() * u;
}

Eigen::VectorXcd invert(const TransformMatrix& T, const Eigen::VectorXcd& w) {
  const int M = T.grid.M;
  Eigen::VectorXcd u(M);
  for (int i = M - 1; i >= 0; --i) {
    cplx acc = w[i];
    for (int j = i + 1; j < M; ++j) acc += T.U(i, j) * u[j];
    u[i] = acc / (1.0 - T.U(i, i));
  }
  return u;
}

Eigen::MatrixXcd forward_matrix(const TransformMatrix& T) {
  Eigen::MatrixXcd K = -T.U;
  K.diagonal().array() += 1.0;
  return K;
}

cplx control_signal(const TransformMatrix& T, const Eigen::VectorXcd& u) { return T.U.row(0).transpose().cwiseProduct(u).sum(); }

cplx control_signal(const Kernel& k, const Grid& g, const Eigen::VectorXcd& u) {
  const int M = g.M;
  const double h = g.h();
  cplx acc = 0.0;
  for (int j = 0; j < M; ++j) {
    const double w = (j == 0 || j == M - 1) ? 0.5 : 1.0;
    acc += h * w * k.eval(0.0, g.x(j)) * u[j];
  }
  return acc;
}

double inverse_norm_estimate(const TransformMatrix& T, int iterations) {
  const int M = T.grid.M;
  const Eigen::MatrixXcd K = forward_matrix(T);
  const auto tri = K.triangularView<Eigen::Upper>();
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(M) / std::sqrt(double(M));
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd y = tri.solve(v);
    Eigen::VectorXcd z = K.adjoint().triangularView<Eigen::Lower>().solve(y);
    lambda = z.norm();
    if (lambda == 0.0) break;
    v = z / lambda;
  }
  return std::sqrt(lambda);
}

double kernel_l2_triangle(const TransformMatrix& T) {
  const int M = T.grid.M;
  const double h = T.grid.h();
  double total = 0.0;
  for (int i = 0; i < M - 1; ++i) {
    double row = 0.0;
    for (int j = i; j < M; ++j) {
      const double w = (j == i || j == M - 1) ? 0.5 : 1.0;
      row += std::norm(T.U(i, j)) / (h * w);
    }
    total += (i == 0 ? 0.5 : 1.0) * h * row;
  }
  return std::sqrt(total);
}

double stability_constant(const TransformMatrix& T, int iterations) {
  return inverse_norm_estimate(T, iterations) * (1.0 + kernel_l2_triangle(T));
}

}  // namespace hnls
