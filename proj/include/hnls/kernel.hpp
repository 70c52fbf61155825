#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hnls/common.hpp"
#include "hnls/grid.hpp"
#include "hnls/poly2.hpp"

namespace hnls {

/// i u_t + i beta u_xxx + alpha u_xx + i delta u_x + |u|^p u = 0 on (0,L), target damping r.
struct PhysicsParams {
  double beta = 1.0;
  double alpha = 0.0;
  double delta = 0.0;
  double r = 1.0;
  double L = 3.14159265358979323846;
  double p_power = 0.0;
  Family family = Family::A;

  double alpha_t() const { return alpha / beta; }
  double delta_t() const { return delta / beta; }
  double r_t() const { return r / beta; }
  void validate() const;
};

enum class KernelRole { control_k, control_ell, observer_p };

/// Which rate the observer kernel is built from. plus solves the observer kernel problem;
/// minus is the literal reflected form k(L-y, L-x; -r).
enum class ObserverSign { plus, minus };

struct KernelOptions {
  double tol = 1e-12;
  int max_iter = 60;
  int degree_cap = -1;  ///< -1 means 4*max_iter + 4
};

/// Smooth kernel on the triangle 0 <= x <= y <= L stored as a polynomial G(s,t).
/// Control roles: k(x,y) = G(y-x, L-y). Observer role: p(x,y) = G(y-x, x).
class Kernel {
 public:
  Kernel(PhysicsParams params, KernelRole role, double rate, Poly2 G, std::vector<double> increments,
         double tol);

  const PhysicsParams& params() const { return params_; }
  KernelRole role() const { return role_; }
  double rate() const { return rate_; }
  double tol() const { return tol_; }
  const Poly2& G() const { return G_; }
  int iterations() const { return static_cast<int>(increments_.size()); }
  const std::vector<double>& increments() const { return increments_; }
  double last_increment() const { return increments_.empty() ? 0.0 : increments_.back(); }

  /// d_x^a d_y^b of the kernel, a,b in 0..3, without domain checks.
  cplx eval(double x, double y, int a = 0, int b = 0) const;
  const Poly2& derivative(int a, int b) const { return d_[a * 4 + b]; }

 private:
  PhysicsParams params_;
  KernelRole role_;
  double rate_;
  double tol_;
  Poly2 G_;
  std::vector<double> increments_;
  std::array<Poly2, 16> d_;
};

enum class SplitTerm { p2m2, p1m1, p2m1, p1p0, p2p0, p2p1 };
inline constexpr std::array<SplitTerm, 6> kSplitTerms{SplitTerm::p2m2, SplitTerm::p1m1, SplitTerm::p2m1,
                                                      SplitTerm::p1p0, SplitTerm::p2p0, SplitTerm::p2p1};

/// One of the six split integral operators of the kernel integral equation.
Poly2 apply_split(const Poly2& g, const PhysicsParams& p, Family f, SplitTerm term);
/// Sum of the six split operators.
Poly2 apply_P(const Poly2& g, const PhysicsParams& p, Family f);

/// Successive approximation for the control kernel of params.family (k for A, ell for B).
Kernel solve_kernel(const PhysicsParams& p, const KernelOptions& opt = {});
/// Observer kernel p(x,y), the reflection of the family-A kernel built with rate +r or -r.
Kernel observer_kernel(const PhysicsParams& p, const KernelOptions& opt = {},
                       ObserverSign sign = ObserverSign::plus);

/// Domain-checked evaluation of d_x^dx d_y^dy kernel(x,y).
cplx kernel_eval(const Kernel& k, double x, double y, int dx = 0, int dy = 0);

/// Output-injection gain p1 sampled on the grid for the family of the params.
Eigen::VectorXcd observer_gain(const Kernel& p, const Grid& g);

/// Right-hand side of the convergence bound for the n-th increment (n >= 1):
/// 6^n M^n L^(3n+2) / (n+1)!, M = max(1, |alpha~|, |delta~|, |r~|).
double increment_bound(const PhysicsParams& p, int n);

struct ResidualTerm {
  std::string name;
  double value = 0.0;
};

struct KernelResidual {
  double pde_max = 0.0;
  double bc_max = 0.0;
  std::vector<ResidualTerm> bc_terms;
};

/// PDE residual on the interior lattice (cell midpoints strictly above the diagonal)
/// and boundary residuals on the edges, both from a lattice with n points per axis.
KernelResidual kernel_residual(const Kernel& k, int lattice = 51);

namespace serial {
KernelResidual kernel_residual(const Kernel& k, int lattice = 51);
}

const char* to_string(KernelRole r);
KernelRole parse_role(const std::string& s);

}  // namespace hnls
