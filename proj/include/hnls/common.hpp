#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hnls {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

/// Boundary-condition family. A: u(0)=g, u(L)=0, u_x(L)=0. B: u(0)=g, u_x(L)=0, u_xx(L)=0.
enum class Family { A, B };

enum class ErrorKind { config, domain, kernel, solver, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(Family f) { return f == Family::A ? "A" : "B"; }

Family parse_family(const std::string& s);

}  // namespace hnls
