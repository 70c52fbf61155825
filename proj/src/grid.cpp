#include "hnls/grid.hpp"

#include <cmath>

#include "hnls/kernel.hpp"

namespace hnls {

void Grid::validate() const {
  if (M < 5) throw Error(ErrorKind::config, "grid needs M >= 5");
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::config, "grid needs L > 0");
}

std::vector<ConstraintRow> boundary_rows(const Grid& g, Family f) {
  const int M = g.M;
  const double h = g.h();
  std::vector<ConstraintRow> rows;
  rows.push_back({0, {{0, 1.0}}});
  const std::vector<std::pair<int, double>> neumann{
      {M - 3, 1.0 / (2 * h)}, {M - 2, -4.0 / (2 * h)}, {M - 1, 3.0 / (2 * h)}};
  if (f == Family::A) {
    rows.push_back({M - 1, {{M - 1, 1.0}}});
    rows.push_back({M - 2, neumann});
  } else {
    rows.push_back({M - 1, neumann});
    rows.push_back({M - 2, {{M - 4, -1.0 / (h * h)}, {M - 3, 4.0 / (h * h)}, {M - 2, -5.0 / (h * h)}, {M - 1, 2.0 / (h * h)}}});
  }
  return rows;
}

Eigen::MatrixXcd interior_operator(const Grid& g, const PhysicsParams& p, const OperatorOptions& opt) {
  g.validate();
  const int M = g.M;
  const double h = g.h(), h2 = h * h, h3 = h2 * h;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, M);
  for (int m = 1; m <= M - 3; ++m) {
    A(m, m + 1) += p.delta / (2 * h);
    A(m, m - 1) -= p.delta / (2 * h);
    A(m, m + 1) += -I * p.alpha / h2;
    A(m, m) += 2.0 * I * p.alpha / h2;
    A(m, m - 1) += -I * p.alpha / h2;
    const double b = p.beta / h3;
    if (opt.stencil == Stencil::paper) {
      A(m, m + 2) += b;
      A(m, m + 1) -= 3.0 * b;
      A(m, m) += 3.0 * b;
      A(m, m - 1) -= b;
    } else if (m >= 2) {
      A(m, m + 2) += 0.5 * b;
      A(m, m + 1) -= b;
      A(m, m - 1) += b;
      A(m, m - 2) -= 0.5 * b;
    } else {
      static constexpr double w[5] = {-1.5, 5.0, -6.0, 3.0, -0.5};
      for (int q = 0; q < 5; ++q) A(m, q) += w[q] * b;
    }
    if (opt.include_damping) A(m, m) += p.r;
  }
  return A;
}

Eigen::MatrixXcd build_operator(const Grid& g, const PhysicsParams& p, Family f, const OperatorOptions& opt) {
  Eigen::MatrixXcd A = interior_operator(g, p, opt);
  for (const auto& c : boundary_rows(g, f)) {
    A.row(c.row).setZero();
    for (auto [j, v] : c.entries) A(c.row, j) = v;
  }
  return A;
}

Eigen::MatrixXd forward_difference(const Grid& g) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g.M, g.M);
  for (int m = 0; m + 1 < g.M; ++m) {
    D(m, m) = -1.0 / g.h();
    D(m, m + 1) = 1.0 / g.h();
  }
  return D;
}

Eigen::MatrixXd backward_difference(const Grid& g) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g.M, g.M);
  for (int m = 1; m < g.M; ++m) {
    D(m, m) = 1.0 / g.h();
    D(m, m - 1) = -1.0 / g.h();
  }
  return D;
}

Eigen::RowVectorXd trace_uxx_row(const Grid& g) {
  const int M = g.M;
  const double h2 = g.h() * g.h();
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(M);
  r[M - 4] = -1.0 / h2;
  r[M - 3] = 4.0 / h2;
  r[M - 2] = -5.0 / h2;
  r[M - 1] = 2.0 / h2;
  return r;
}

cplx trace_uxx_L(const Eigen::VectorXcd& v, const Grid& g) {
  const int M = g.M;
  const double h2 = g.h() * g.h();
  return (-v[M - 4] + 4.0 * v[M - 3] - 5.0 * v[M - 2] + 2.0 * v[M - 1]) / h2;
}

Eigen::RowVectorXd measurement_row(const Grid& g, Family f) {
  if (f == Family::A) return trace_uxx_row(g);
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(g.M);
  r[g.M - 1] = 1.0;
  return r;
}

double l2_norm(const Eigen::VectorXcd& v, const Grid& g) {
  const int M = static_cast<int>(v.size());
  if (M == 0) return 0.0;
  double s = v.squaredNorm() - 0.5 * std::norm(v[0]) - 0.5 * std::norm(v[M - 1]);
  return std::sqrt(std::max(0.0, g.h() * s));
}

}  // namespace hnls
