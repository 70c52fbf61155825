#include "hnls/poly2.hpp"

#include <algorithm>
#include <cmath>

namespace hnls {

namespace {
constexpr double kFlush = 1e-300;
}

Poly2::Poly2(int degree) : n_(degree), c_(static_cast<std::size_t>(degree + 1) * (degree + 1)) {
  if (degree < 0) throw Error(ErrorKind::domain, "Poly2: negative degree");
}

Poly2 Poly2::monomial(int i, int j, cplx c) {
  Poly2 p(i + j);
  p.at(i, j) = c;
  return p;
}

cplx Poly2::operator()(int i, int j) const {
  if (i < 0 || j < 0 || i + j > n_) return {};
  return c_[static_cast<std::size_t>(i) * (n_ + 1) + j];
}

cplx& Poly2::at(int i, int j) {
  if (i < 0 || j < 0 || i + j > n_) throw Error(ErrorKind::domain, "Poly2: index outside the triangle");
  return c_[static_cast<std::size_t>(i) * (n_ + 1) + j];
}

void Poly2::grow(int degree) {
  if (degree <= n_) return;
  Poly2 q(degree);
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; i + j <= n_; ++j) q.at(i, j) = (*this)(i, j);
  *this = std::move(q);
}

void Poly2::trim() {
  int top = 0;
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; i + j <= n_; ++j) {
      cplx& c = c_[static_cast<std::size_t>(i) * (n_ + 1) + j];
      if (std::abs(c) < kFlush) c = 0.0;
      if (c != 0.0) top = std::max(top, i + j);
    }
  if (top == n_) return;
  Poly2 q(top);
  for (int i = 0; i <= top; ++i)
    for (int j = 0; i + j <= top; ++j) q.at(i, j) = (*this)(i, j);
  *this = std::move(q);
}

bool Poly2::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](cplx c) { return c == 0.0; });
}

Poly2& Poly2::operator+=(const Poly2& o) {
  grow(o.n_);
  for (int i = 0; i <= o.n_; ++i)
    for (int j = 0; i + j <= o.n_; ++j) at(i, j) += o(i, j);
  return *this;
}

Poly2& Poly2::operator-=(const Poly2& o) {
  grow(o.n_);
  for (int i = 0; i <= o.n_; ++i)
    for (int j = 0; i + j <= o.n_; ++j) at(i, j) -= o(i, j);
  return *this;
}

Poly2& Poly2::operator*=(cplx a) {
  for (auto& c : c_) c *= a;
  return *this;
}

Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
Poly2 operator*(cplx a, Poly2 p) { return p *= a; }

Poly2 diff(const Poly2& p, Axis ax) {
  const int n = p.degree();
  if (n == 0) return Poly2(0);
  Poly2 q(n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; i + j < n; ++j)
      q.at(i, j) = ax == Axis::s ? double(i + 1) * p(i + 1, j) : double(j + 1) * p(i, j + 1);
  return q;
}

Poly2 integrate(const Poly2& p, Axis ax) {
  const int n = p.degree();
  Poly2 q(n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      if (ax == Axis::s)
        q.at(i + 1, j) = p(i, j) / double(i + 1);
      else
        q.at(i, j + 1) = p(i, j) / double(j + 1);
    }
  return q;
}

cplx eval(const Poly2& p, double s, double t) {
  const int n = p.degree();
  cplx acc = 0.0;
  for (int i = n; i >= 0; --i) {
    cplx row = 0.0;
    for (int j = n - i; j >= 0; --j) row = row * t + p(i, j);
    acc = acc * s + row;
  }
  return acc;
}

double sup_bound(const Poly2& p, double L) {
  const int n = p.degree();
  double acc = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) acc += std::abs(p(i, j)) * std::pow(L, i + j);
  return acc;
}

}  // namespace hnls
