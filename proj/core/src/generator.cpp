#include "dirlat/generator.hpp"

#include <random>
#include <stdexcept>

namespace dirlat {

Instance generate_instance(const GeneratorOptions& options) {
  if (options.clients < 1) throw std::invalid_argument("generate_instance: need at least one client");
  if (options.cmax < 1) throw std::invalid_argument("generate_instance: cmax must be at least 1");
  const int m = options.clients + 1;
  std::mt19937_64 rng(options.seed);
  // Drawn by hand from the raw engine: distribution objects differ between standard libraries.
  auto draw = [&] { return 1 + static_cast<Cost>(rng() % static_cast<std::uint64_t>(options.cmax)); };

  Instance inst;
  inst.cost = CostMatrix(m);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < m; ++v) {
      if (u == v) continue;
      if (options.symmetric && v < u) inst.cost(u, v) = inst.cost(v, u);
      else inst.cost(u, v) = draw();
    }
  inst.cost.close_metric();
  return inst;
}

}  // namespace dirlat
