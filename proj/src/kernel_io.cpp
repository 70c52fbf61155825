#include "hnls/kernel_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace hnls {

using nlohmann::json;

void write_kernel(std::ostream& os, const Kernel& k) {
  const PhysicsParams& p = k.params();
  json h;
  h["format"] = "hnls-kernel";
  h["version"] = 1;
  h["family"] = to_string(p.family);
  h["role"] = to_string(k.role());
  h["beta"] = p.beta;
  h["alpha"] = p.alpha;
  h["delta"] = p.delta;
  h["r"] = p.r;
  h["L"] = p.L;
  h["p_power"] = p.p_power;
  h["rate"] = k.rate();
  h["tol"] = k.tol();
  h["degree"] = k.G().degree();
  h["iterations"] = k.iterations();
  h["increments"] = k.increments();
  os << "# " << h.dump() << "\n";
  os << std::setprecision(17);
  const Poly2& G = k.G();
  for (int i = 0; i <= G.degree(); ++i)
    for (int j = 0; i + j <= G.degree(); ++j) {
      const cplx c = G(i, j);
      if (c != 0.0) os << i << ' ' << j << ' ' << c.real() << ' ' << c.imag() << '\n';
    }
}

Kernel read_kernel(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw Error(ErrorKind::io, "kernel file: missing header");
  json h;
  try {
    h = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("kernel file: bad header: ") + e.what());
  }
  try {
    if (h.at("format") != "hnls-kernel") throw Error(ErrorKind::io, "kernel file: unknown format");
    PhysicsParams p;
    p.family = parse_family(h.at("family").get<std::string>());
    p.beta = h.at("beta");
    p.alpha = h.at("alpha");
    p.delta = h.at("delta");
    p.r = h.at("r");
    p.L = h.at("L");
    p.p_power = h.value("p_power", 0.0);
    const KernelRole role = parse_role(h.at("role").get<std::string>());
    const int degree = h.at("degree");
    Poly2 G(degree);
    int i, j;
    double re, im;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      if (!(ls >> i >> j >> re >> im)) throw Error(ErrorKind::io, "kernel file: malformed row '" + line + "'");
      G.at(i, j) = cplx(re, im);
    }
    return Kernel(p, role, h.at("rate"), std::move(G), h.at("increments").get<std::vector<double>>(), h.at("tol"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("kernel file: ") + e.what());
  }
}

void save_kernel(const std::string& path, const Kernel& k) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path);
  write_kernel(os, k);
}

Kernel load_kernel(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::io, "cannot read " + path);
  return read_kernel(is);
}

}  // namespace hnls
