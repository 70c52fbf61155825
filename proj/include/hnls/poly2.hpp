#pragma once

#include <vector>

#include "hnls/common.hpp"

namespace hnls {

enum class Axis { s, t };

/// Bivariate polynomial sum c_ij s^i t^j with total degree at most n.
/// Coefficients live in an (n+1)x(n+1) row-major table; entries with i+j > n are zero.
class Poly2 {
 public:
  Poly2() : Poly2(0) {}
  explicit Poly2(int degree);

  static Poly2 monomial(int i, int j, cplx c);

  int degree() const { return n_; }
  cplx operator()(int i, int j) const;
  cplx& at(int i, int j);
  const std::vector<cplx>& coefficients() const { return c_; }

  void grow(int degree);
  /// Shrinks to the highest nonzero anti-diagonal and flushes |c| < 1e-300 to zero.
  void trim();
  bool is_zero() const;

  Poly2& operator+=(const Poly2& o);
  Poly2& operator-=(const Poly2& o);
  Poly2& operator*=(cplx a);

 private:
  int n_;
  std::vector<cplx> c_;
};

Poly2 operator+(Poly2 a, const Poly2& b);
Poly2 operator-(Poly2 a, const Poly2& b);
Poly2 operator*(cplx a, Poly2 p);

Poly2 diff(const Poly2& p, Axis ax);
/// Antiderivative vanishing on the axis' zero line.
Poly2 integrate(const Poly2& p, Axis ax);
cplx eval(const Poly2& p, double s, double t);
/// sum |c_ij| L^(i+j): a bound for sup |p| on [0,L]^2.
double sup_bound(const Poly2& p, double L);

}  // namespace hnls
