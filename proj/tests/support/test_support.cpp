#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>

namespace testsupport {

using namespace dirlat;

Instance random_metric(int clients, Cost cmax, std::uint64_t seed, bool symmetric) {
  const int m = clients + 1;
  std::mt19937 rng(static_cast<std::uint32_t>(seed * 2654435761u + 17));
  std::uniform_int_distribution<Cost> draw(1, cmax);
  Instance inst;
  inst.cost = CostMatrix(m);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < m; ++v)
      if (u != v) inst.cost(u, v) = (symmetric && v < u) ? inst.cost(v, u) : draw(rng);
  // Bellman-style relaxation until stable; independent of the library's Floyd-Warshall.
  for (bool changed = true; changed;) {
    changed = false;
    for (int u = 0; u < m; ++u)
      for (int v = 0; v < m; ++v)
        for (int w = 0; w < m; ++w)
          if (inst.cost(u, w) + inst.cost(w, v) < inst.cost(u, v)) {
            inst.cost(u, v) = inst.cost(u, w) + inst.cost(w, v);
            changed = true;
          }
  }
  return inst;
}

Cost latency_by_hand(const CostMatrix& cost, int start, const std::vector<int>& order) {
  Cost clock = 0, total = 0;
  int at = start;
  for (int v : order) {
    clock += cost(at, v);
    total += clock;
    at = v;
  }
  return total;
}

PermutationOptimum permutation_optimum(const Instance& instance) {
  std::vector<int> order = instance.clients();
  std::sort(order.begin(), order.end());
  PermutationOptimum best;
  bool first = true;
  do {
    const Cost total = latency_by_hand(instance.cost, instance.s, order);
    if (first || total < best.total) {
      best = {total, order};
      first = false;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

NiceInstance nice_auto(const Instance& instance) {
  return std::get<NiceInstance>(reduce_to_nice(instance, Rational(1), {Scaling::Auto}));
}

namespace {

int find_arc(const TimeNetwork& net, int tail, int head) {
  if (tail < 0 || head < 0) return -1;
  for (int a : net.out_arcs(tail))
    if (net.arcs()[a].head == head) return a;
  return -1;
}

}  // namespace

std::vector<double> embed_visits(const TimeNetwork& net, const std::vector<std::pair<int, Cost>>& visits) {
  std::vector<double> z(net.arcs().size(), 0.0);
  const bool compact = net.mode() == NetworkMode::Compact;
  for (std::size_t k = 1; k < visits.size(); ++k) {
    auto [from, arrived] = visits[k - 1];
    auto [to, when] = visits[k];
    const Cost tau = net.travel_time(from, to);
    const Cost depart = compact ? when - tau : arrived;
    if (depart < arrived) throw std::logic_error("embed_visits: step too fast");
    for (Cost t = arrived; t < depart; ++t) {
      const int a = find_arc(net, net.node_at(from, t), net.node_at(from, t + 1));
      if (a < 0) throw std::logic_error("embed_visits: missing wait arc");
      z[a] += 1.0;
    }
    const int a = find_arc(net, net.node_at(from, depart), net.node_at(to, when));
    if (a < 0) throw std::logic_error("embed_visits: missing travel arc");
    z[a] += 1.0;
  }
  return z;
}

std::vector<std::pair<int, Cost>> earliest_visits(const TimeNetwork& net, const std::vector<int>& order) {
  std::vector<std::pair<int, Cost>> visits{{net.depot_place(), 0}};
  for (int v : order) {
    const int p = net.client_place(v);
    visits.push_back({p, visits.back().second + net.travel_time(visits.back().first, p)});
  }
  visits.push_back({net.target_place(), net.horizon() + 1});
  return visits;
}

std::vector<std::vector<double>> x_from_z(const TimeNetwork& net, const std::vector<double>& z) {
  const int P = static_cast<int>(net.places().size());
  std::vector<std::vector<double>> x(P, std::vector<double>(net.horizon() + 2, 0.0));
  for (std::size_t a = 0; a < z.size(); ++a) {
    const TimeArc& arc = net.arcs()[a];
    if (arc.kind != ArcKind::Travel) continue;
    const TimeNode& head = net.nodes()[arc.head];
    if (net.places()[head.place].kind == PlaceKind::Client) x[head.place][head.time] += z[a];
  }
  return x;
}

std::optional<ExhaustiveCut> exhaustive_cut_check(const LpSolution& sol, const TimeNetwork& net, double tolerance) {
  std::vector<int> client_places = net.client_places();
  const int n = static_cast<int>(client_places.size());
  const Cost T = net.horizon();
  const auto x = x_from_z(net, sol.z);
  std::optional<ExhaustiveCut> worst;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<char> inside(net.places().size(), 0);
    for (int b = 0; b < n; ++b)
      if (mask >> b & 1u) inside[client_places[b]] = 1;
    // Entering mass per time.
    std::vector<double> entering(T + 2, 0.0);
    for (std::size_t a = 0; a < sol.z.size(); ++a) {
      const TimeArc& arc = net.arcs()[a];
      if (arc.kind != ArcKind::Travel) continue;
      const TimeNode& tail = net.nodes()[arc.tail];
      const TimeNode& head = net.nodes()[arc.head];
      if (inside[head.place] && !inside[tail.place]) entering[head.time] += sol.z[a];
    }
    for (int b = 0; b < n; ++b) {
      if (!(mask >> b & 1u)) continue;
      double lhs = 0.0, rhs = 0.0;
      for (Cost t = 1; t <= T; ++t) {
        lhs += entering[t];
        rhs += x[client_places[b]][t];
        const double violation = rhs - lhs;
        if (violation > tolerance && (!worst || violation > worst->violation)) {
          ExhaustiveCut cut;
          for (int c = 0; c < n; ++c)
            if (mask >> c & 1u) cut.S.push_back(net.places()[client_places[c]].vertex);
          cut.v = net.places()[client_places[b]].vertex;
          cut.t = t;
          cut.violation = violation;
          worst = cut;
        }
      }
    }
  }
  return worst;
}

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

double seconds_since(std::uint64_t start_ns) { return static_cast<double>(now_ns() - start_ns) * 1e-9; }

}  // namespace testsupport
