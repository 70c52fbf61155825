#include "hnls/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hnls {

Family parse_family(const std::string& s) {
  if (s == "A" || s == "a") return Family::A;
  if (s == "B" || s == "b") return Family::B;
  throw Error(ErrorKind::config, "unknown bc_family '" + s + "' (expected A or B)");
}

void PhysicsParams::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::config, m); };
  if (!(beta > 0.0) || !std::isfinite(beta)) bad("beta must be > 0");
  if (!(L > 0.0) || !std::isfinite(L)) bad("L must be > 0");
  if (!std::isfinite(alpha) || !std::isfinite(delta) || !std::isfinite(r)) bad("non-finite parameter");
  if (r < 0.0) bad("r must be >= 0");
  if (p_power < 0.0 || p_power > 4.0) bad("p_power must lie in [0,4]");
  if (family == Family::B && delta < 0.0) bad("family B requires delta >= 0");
}

namespace {

/// (cs d_s + ct d_t)^m g
Poly2 directional(Poly2 g, double cs, double ct, int m) {
  for (int q = 0; q < m; ++q) {
    Poly2 next(std::max(g.degree() - 1, 0));
    if (cs != 0.0) next += cs * diff(g, Axis::s);
    if (ct != 0.0) next += ct * diff(g, Axis::t);
    g = std::move(next);
  }
  return g;
}

Poly2 sgl(const Poly2& f) { return integrate(f, Axis::s); }
Poly2 dbl(const Poly2& f) { return integrate(integrate(f, Axis::s), Axis::s); }
Poly2 trip(const Poly2& f) { return integrate(dbl(f), Axis::t); }

}  // namespace

Kernel::Kernel(PhysicsParams params, KernelRole role, double rate, Poly2 G, std::vector<double> increments,
               double tol)
    : params_(params), role_(role), rate_(rate), tol_(tol), G_(std::move(G)), increments_(std::move(increments)) {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (role_ == KernelRole::observer_p)
        d_[a * 4 + b] = directional(directional(G_, 1.0, 0.0, b), -1.0, 1.0, a);
      else
        d_[a * 4 + b] = directional(directional(G_, 1.0, -1.0, b), -1.0, 0.0, a);
    }
}

cplx Kernel::eval(double x, double y, int a, int b) const {
  const Poly2& d = d_[a * 4 + b];
  if (role_ == KernelRole::observer_p) return hnls::eval(d, y - x, x);
  return hnls::eval(d, y - x, params_.L - y);
}

Poly2 apply_split(const Poly2& g, const PhysicsParams& p, Family f, SplitTerm term) {
  const double a = p.alpha_t(), d = p.delta_t(), r = p.r_t();
  const Poly2 ft = diff(g, Axis::t);
  const Poly2 ftt = diff(ft, Axis::t);
  if (f == Family::A) {
    switch (term) {
      case SplitTerm::p2m2: return cplx(-1.0 / 3.0) * trip(diff(ftt, Axis::t));
      case SplitTerm::p1m1: return trip(diff(ftt, Axis::s));
      case SplitTerm::p2m1: return (I * a / 3.0) * trip(ftt);
      case SplitTerm::p1p0: return (-2.0 * I * a / 3.0) * trip(diff(ft, Axis::s));
      case SplitTerm::p2p0: return cplx(-d / 3.0) * trip(ft);
      case SplitTerm::p2p1: return cplx(r / 3.0) * trip(g);
    }
  } else {
    switch (term) {
      case SplitTerm::p2m2: return cplx(2.0 / 3.0) * trip(diff(ftt, Axis::t)) - dbl(ftt);
      case SplitTerm::p1m1: return cplx(2.0) * sgl(ft) - trip(diff(ftt, Axis::s));
      case SplitTerm::p2m1: return (-2.0 * I * a / 3.0) * trip(ftt) + (I * a) * dbl(ft);
      case SplitTerm::p1p0: return (I * a / 3.0) * trip(diff(ft, Axis::s)) - (I * a) * sgl(g);
      case SplitTerm::p2p0: return cplx(2.0 * d / 3.0) * trip(ft) - cplx(d) * dbl(g);
      case SplitTerm::p2p1: return cplx(r / 3.0) * trip(g);
    }
  }
  return Poly2(0);
}

Poly2 apply_P(const Poly2& g, const PhysicsParams& p, Family f) {
  Poly2 out(g.degree() + 3);
  for (SplitTerm t : kSplitTerms) out += apply_split(g, p, f, t);
  out.trim();
  return out;
}

namespace {

Kernel successive(const PhysicsParams& p, Family fam, double rate, KernelRole role, const KernelOptions& opt) {
  p.validate();
  if (opt.max_iter < 1 || !(opt.tol > 0.0)) throw Error(ErrorKind::config, "kernel options: max_iter >= 1, tol > 0");
  const int cap = opt.degree_cap > 0 ? opt.degree_cap : 4 * opt.max_iter + 4;
  PhysicsParams q = p;
  q.r = rate;
  Poly2 G = Poly2::monomial(1, 1, -q.r_t() / 3.0);
  Poly2 H = G;
  std::vector<double> inc;
  if (rate == 0.0) return Kernel(p, role, rate, Poly2(0), {0.0}, opt.tol);
  for (int n = 1; n <= opt.max_iter; ++n) {
    H = apply_P(H, q, fam);
    if (H.degree() > cap) {
      std::ostringstream os;
      os << "kernel degree " << H.degree() << " exceeds cap " << cap << " at iteration " << n;
      throw Error(ErrorKind::kernel, os.str());
    }
    G += H;
    const double s = sup_bound(H, p.L);
    if (!std::isfinite(s)) throw Error(ErrorKind::kernel, "kernel increment is not finite");
    inc.push_back(s);
    if (s <= opt.tol) {
      G.trim();
      return Kernel(p, role, rate, std::move(G), std::move(inc), opt.tol);
    }
  }
  std::ostringstream os;
  os << "kernel iteration did not reach tol " << opt.tol << " within " << opt.max_iter
     << " iterations (last increment " << inc.back() << ")";
  throw Error(ErrorKind::kernel, os.str());
}

}  // namespace

Kernel solve_kernel(const PhysicsParams& p, const KernelOptions& opt) {
  const KernelRole role = p.family == Family::A ? KernelRole::control_k : KernelRole::control_ell;
  return successive(p, p.family, p.r, role, opt);
}

Kernel observer_kernel(const PhysicsParams& p, const KernelOptions& opt, ObserverSign sign) {
  return successive(p, Family::A, sign == ObserverSign::plus ? p.r : -p.r, KernelRole::observer_p, opt);
}

cplx kernel_eval(const Kernel& k, double x, double y, int dx, int dy) {
  const double L = k.params().L;
  const double eps = 1e-12 * std::max(1.0, L);
  if (dx < 0 || dy < 0 || dx > 3 || dy > 3) throw Error(ErrorKind::domain, "kernel_eval: derivative order outside 0..3");
  if (!(x >= -eps && y <= L + eps && x <= y + eps)) {
    std::ostringstream os;
    os << "kernel_eval: (" << x << ", " << y << ") outside 0 <= x <= y <= L";
    throw Error(ErrorKind::domain, os.str());
  }
  return k.eval(x, y, dx, dy);
}

Eigen::VectorXcd observer_gain(const Kernel& p, const Grid& g) {
  const PhysicsParams& q = p.params();
  const double L = q.L;
  Eigen::VectorXcd g1(g.M);
  for (int m = 0; m < g.M; ++m) {
    const double x = g.x(m);
    if (q.family == Family::A)
      g1[m] = -I * q.beta * p.eval(x, L);
    else
      g1[m] = -I * q.beta * p.eval(x, L, 0, 2) + q.alpha * p.eval(x, L, 0, 1) - I * q.delta * p.eval(x, L);
  }
  return g1;
}

double increment_bound(const PhysicsParams& p, int n) {
  const double Mb = std::max({1.0, std::abs(p.alpha_t()), std::abs(p.delta_t()), std::abs(p.r_t())});
  const double logv = n * std::log(6.0 * Mb) + (3.0 * n + 2.0) * std::log(p.L) - std::lgamma(n + 2.0);
  return std::exp(logv);
}

namespace {

cplx pde_at(const Kernel& k, double x, double y) {
  const PhysicsParams& q = k.params();
  auto f = [&](int a, int b) { return k.eval(x, y, a, b); };
  const double sr = k.role() == KernelRole::observer_p ? -q.r_t() : q.r_t();
  return f(3, 0) + f(0, 3) - I * q.alpha_t() * (f(2, 0) - f(0, 2)) + q.delta_t() * (f(1, 0) + f(0, 1)) +
         sr * f(0, 0);
}

std::vector<ResidualTerm> boundary_terms(const Kernel& k, int n) {
  const PhysicsParams& q = k.params();
  const double L = q.L, rt = q.r_t();
  std::vector<ResidualTerm> t(3);
  auto edge = [&](int idx, const char* name, auto fn) {
    t[idx].name = name;
    for (int i = 0; i < n; ++i) {
      const double x = i == n - 1 ? L : L * i / (n - 1);
      t[idx].value = std::max(t[idx].value, std::abs(fn(x)));
    }
  };
  switch (k.role()) {
    case KernelRole::control_k:
      edge(0, "k(x,x)", [&](double x) { return k.eval(x, x); });
      edge(1, "k(x,L)", [&](double x) { return k.eval(x, L); });
      edge(2, "(k_xx+k_xy)(x,x)+r/3", [&](double x) { return k.eval(x, x, 2, 0) + k.eval(x, x, 1, 1) + rt / 3.0; });
      break;
    case KernelRole::control_ell:
      edge(0, "l(x,x)", [&](double x) { return k.eval(x, x); });
      edge(1, "l_x(x,x)-r(L-x)/3", [&](double x) { return k.eval(x, x, 1, 0) - rt * (L - x) / 3.0; });
      edge(2, "(l_yy+i a l_y+d l)(x,L)", [&](double x) {
        return k.eval(x, L, 0, 2) + I * q.alpha_t() * k.eval(x, L, 0, 1) + q.delta_t() * k.eval(x, L);
      });
      break;
    case KernelRole::observer_p:
      edge(0, "p(0,y)", [&](double y) { return k.eval(0.0, y); });
      edge(1, "p(x,x)", [&](double x) { return k.eval(x, x); });
      edge(2, "(p_xx+p_xy)(x,x)-r/3", [&](double x) { return k.eval(x, x, 2, 0) + k.eval(x, x, 1, 1) - rt / 3.0; });
      break;
  }
  return t;
}

KernelResidual finish(const Kernel& k, int lattice, double pde) {
  KernelResidual out;
  out.pde_max = pde;
  out.bc_terms = boundary_terms(k, lattice);
  for (const auto& t : out.bc_terms) out.bc_max = std::max(out.bc_max, t.value);
  return out;
}

void check_lattice(int lattice) {
  if (lattice < 3) throw Error(ErrorKind::domain, "residual lattice needs at least 3 points per axis");
}

}  // namespace

KernelResidual kernel_residual(const Kernel& k, int lattice) {
  check_lattice(lattice);
  const double hl = k.params().L / (lattice - 1);
  const int cells = lattice - 1;
  double pde = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : pde)
  for (int i = 0; i < cells; ++i)
    for (int j = i + 1; j < cells; ++j)
      pde = std::max(pde, std::abs(pde_at(k, (i + 0.5) * hl, (j + 0.5) * hl)));
  return finish(k, lattice, pde);
}

namespace serial {
KernelResidual kernel_residual(const Kernel& k, int lattice) {
  check_lattice(lattice);
  const double hl = k.params().L / (lattice - 1);
  const int cells = lattice - 1;
  double pde = 0.0;
  for (int i = 0; i < cells; ++i)
    for (int j = i + 1; j < cells; ++j) pde = std::max(pde, std::abs(pde_at(k, (i + 0.5) * hl, (j + 0.5) * hl)));
  return finish(k, lattice, pde);
}
}  // namespace serial

const char* to_string(KernelRole r) {
  switch (r) {
    case KernelRole::control_k: return "control_k";
    case KernelRole::control_ell: return "control_ell";
    case KernelRole::observer_p: return "observer_p";
  }
  return "?";
}

KernelRole parse_role(const std::string& s) {
  if (s == "control_k") return KernelRole::control_k;
  if (s == "control_ell") return KernelRole::control_ell;
  if (s == "observer_p") return KernelRole::observer_p;
  throw Error(ErrorKind::io, "unknown kernel role '" + s + "'");
}

}  // namespace hnls
