#pragma once

#include <iosfwd>
#include <string>

#include "hnls/kernel.hpp"

namespace hnls {

/// Text format: a first line "# {json header}" with the parameters, followed by
/// whitespace-separated rows "i j re im" for every nonzero coefficient of G.
void write_kernel(std::ostream& os, const Kernel& k);
Kernel read_kernel(std::istream& is);

void save_kernel(const std::string& path, const Kernel& k);
Kernel load_kernel(const std::string& path);

}  // namespace hnls
