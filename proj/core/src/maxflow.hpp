#pragma once

#include <vector>

namespace dirlat::detail {

// Edmonds-Karp on a dense capacity matrix. When `source_side` is given it receives the
// vertices reachable from the source in the final residual graph.
double max_flow(std::vector<std::vector<double>> capacity, int source, int sink,
                std::vector<char>* source_side = nullptr);

}  // namespace dirlat::detail
