#include "maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace dirlat::detail {

namespace {
constexpr double kResidualEps = 1e-12;
}

double max_flow(std::vector<std::vector<double>> cap, int source, int sink, std::vector<char>* source_side) {
  const int n = static_cast<int>(cap.size());
  double flow = 0.0;
  std::vector<int> parent(n);
  while (source != sink) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[source] = source;
    std::deque<int> queue{source};
    while (!queue.empty() && parent[sink] < 0) {
      const int u = queue.front();
      queue.pop_front();
      for (int w = 0; w < n; ++w)
        if (parent[w] < 0 && cap[u][w] > kResidualEps) {
          parent[w] = u;
          queue.push_back(w);
        }
    }
    if (parent[sink] < 0) break;
    double push = std::numeric_limits<double>::infinity();
    for (int w = sink; w != source; w = parent[w]) push = std::min(push, cap[parent[w]][w]);
    for (int w = sink; w != source; w = parent[w]) {
      cap[parent[w]][w] -= push;
      cap[w][parent[w]] += push;
    }
    flow += push;
    if (flow == std::numeric_limits<double>::infinity()) break;
  }
  if (source_side) {
    source_side->assign(n, 0);
    (*source_side)[source] = 1;
    std::deque<int> queue{source};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int w = 0; w < n; ++w)
        if (!(*source_side)[w] && cap[u][w] > kResidualEps) {
          (*source_side)[w] = 1;
          queue.push_back(w);
        }
    }
  }
  return flow;
}

}  // namespace dirlat::detail
