#include "dirlat/oracle.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

namespace dirlat {

LatencyPath latency_of(const std::vector<int>& order, const Instance& instance) {
  std::vector<char> seen(instance.m(), 0);
  for (int v : order) {
    if (v < 0 || v >= instance.m() || !instance.is_client(v))
      throw std::invalid_argument("latency_of: " + std::to_string(v) + " is not a client");
    if (seen[v]) throw std::invalid_argument("latency_of: duplicate client " + std::to_string(v));
    seen[v] = 1;
  }
  for (int v : instance.clients())
    if (!seen[v]) throw std::invalid_argument("latency_of: missing client " + std::to_string(v));
  return evaluate_order(instance.cost, instance.s, order);
}

LatencyPath exact_opt(const Instance& instance) {
  const std::vector<int> clients = instance.clients();
  const int n = static_cast<int>(clients.size());
  if (n > kExactOptMaxClients)
    throw std::length_error("exact_opt: " + std::to_string(n) + " clients exceed the DP budget");
  if (n == 0) return LatencyPath{};

  const std::size_t masks = std::size_t{1} << n;
  constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;
  std::vector<Cost> best(masks * n, kInf);
  std::vector<signed char> parent(masks * n, -1);
  auto at = [n](std::size_t mask, int j) { return mask * n + j; };
  auto c = [&](int a, int b) { return instance.cost(clients[a], clients[b]); };

  for (int j = 0; j < n; ++j) best[at(std::size_t{1} << j, j)] = Cost{n} * instance.cost(instance.s, clients[j]);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const Cost weight = n - std::popcount(mask);
    if (weight == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (!(mask >> j & 1)) continue;
      const Cost here = best[at(mask, j)];
      if (here >= kInf) continue;
      for (int w = 0; w < n; ++w) {
        if (mask >> w & 1) continue;
        const std::size_t next = mask | (std::size_t{1} << w);
        const Cost cand = here + weight * c(j, w);
        if (cand < best[at(next, w)]) {
          best[at(next, w)] = cand;
          parent[at(next, w)] = static_cast<signed char>(j);
        }
      }
    }
  }
  const std::size_t full = masks - 1;
  int last = 0;
  for (int j = 1; j < n; ++j)
    if (best[at(full, j)] < best[at(full, last)]) last = j;

  std::vector<int> order;
  std::size_t mask = full;
  for (int j = last; j >= 0;) {
    order.push_back(clients[j]);
    int prev = parent[at(mask, j)];
    mask &= ~(std::size_t{1} << j);
    j = prev;
  }
  std::reverse(order.begin(), order.end());
  return evaluate_order(instance.cost, instance.s, order);
}

LatencyPath brute_force(const Instance& instance) {
  std::vector<int> order = instance.clients();
  if (static_cast<int>(order.size()) > kBruteForceMaxClients)
    throw std::length_error("brute_force: too many clients");
  LatencyPath best = evaluate_order(instance.cost, instance.s, order);
  while (std::next_permutation(order.begin(), order.end())) {
    LatencyPath cand = evaluate_order(instance.cost, instance.s, order);
    if (cand.total < best.total) best = std::move(cand);
  }
  return best;
}

}  // namespace dirlat
