#pragma once

#include <cstdint>

#include "dirlat/instance.hpp"

namespace dirlat {

struct GeneratorOptions {
  int clients = 3;
  Cost cmax = 3;
  std::uint64_t seed = 0;
  bool symmetric = false;
};

// Uniform arc costs in [1, cmax] closed under shortest paths. Depot is vertex 0, no target,
// epsilon 1. Same options give the same matrix. Throws std::invalid_argument if clients < 1
// or cmax < 1.
Instance generate_instance(const GeneratorOptions& options);

}  // namespace dirlat
