#include "dirlat/atsp_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dirlat/simplex.hpp"
#include "maxflow.hpp"

namespace dirlat {

namespace {
constexpr double kZero = 1e-12;
}

MetricFlow::MetricFlow(CostMatrix c, int s, int t)
    : cost(std::move(c)), f(cost.size(), std::vector<double>(cost.size(), 0.0)), source(s), sink(t),
      place(cost.size(), -1) {}

double MetricFlow::value() const { return outflow(source) - inflow(source); }

double MetricFlow::total_cost() const {
  double total = 0.0;
  for (int u = 0; u < size(); ++u)
    for (int v = 0; v < size(); ++v)
      if (u != v) total += f[u][v] * static_cast<double>(cost(u, v));
  return total;
}

double MetricFlow::inflow(int v) const {
  double total = 0.0;
  for (int u = 0; u < size(); ++u)
    if (u != v) total += f[u][v];
  return total;
}

double MetricFlow::outflow(int v) const {
  double total = 0.0;
  for (int w = 0; w < size(); ++w)
    if (w != v) total += f[v][w];
  return total;
}

double MetricFlow::max_imbalance() const {
  double worst = 0.0;
  for (int v = 0; v < size(); ++v)
    if (v != source && v != sink) worst = std::max(worst, std::abs(outflow(v) - inflow(v)));
  return worst;
}

double MetricFlow::crossing(const std::vector<char>& inside) const {
  double total = 0.0;
  for (int u = 0; u < size(); ++u)
    for (int v = 0; v < size(); ++v)
      if (u != v && inside[u] != inside[v]) total += f[u][v];
  return total;
}

MetricFlow time_aggregate(const std::vector<double>& z, const TimeNetwork& net, Cost a, Cost b,
                          WindowBoundary boundary) {
  const int P = static_cast<int>(net.places().size());
  const bool redirect = boundary == WindowBoundary::RedirectToSink;
  const int n = redirect ? P + 1 : P;
  CostMatrix cost(n);
  for (int u = 0; u < P; ++u)
    for (int v = 0; v < P; ++v) cost(u, v) = net.cost(u, v);
  if (redirect) {
    // Zero into the artificial sink; leaving it costs the largest entry into each place,
    // which keeps the table metric.
    for (int v = 0; v < P; ++v) {
      Cost worst = 0;
      for (int u = 0; u < P; ++u) worst = std::max(worst, cost(u, v));
      cost(P, v) = worst;
    }
  }
  MetricFlow flow(std::move(cost), net.depot_place(), redirect ? P : net.target_place());
  for (int p = 0; p < P; ++p) flow.place[p] = p;

  const auto& arcs = net.arcs();
  for (std::size_t e = 0; e < arcs.size(); ++e) {
    if (z[e] == 0.0) continue;
    const TimeNode& from = net.nodes()[arcs[e].tail];
    const TimeNode& to = net.nodes()[arcs[e].head];
    if (from.time < a) continue;
    if (to.time < b) {
      if (arcs[e].kind == ArcKind::Travel) flow.f[from.place][to.place] += z[e];
    } else if (redirect && from.time < b) {
      flow.f[from.place][P] += z[e];
    }
  }
  return flow;
}

namespace {

std::string refusal_text(int vertex, double connectivity, double required) {
  std::ostringstream out;
  out << "split_off: vertex " << vertex << " has terminal connectivity " << connectivity << " below coverage "
      << required;
  return out.str();
}

double connectivity_in(const std::vector<std::vector<double>>& f, int source, int sink, int v) {
  const int n = static_cast<int>(f.size());
  std::vector<std::vector<double>> cap(n, std::vector<double>(n, 0.0));
  for (int u = 0; u < n; ++u)
    for (int w = 0; w < n; ++w) {
      if (u == w || w == source || w == sink) continue;
      const int from = u == sink ? source : u;
      cap[from][w] += f[u][w];
    }
  return detail::max_flow(std::move(cap), source, v);
}

}  // namespace

SplitOffRefused::SplitOffRefused(int v, double have, double need)
    : std::invalid_argument(refusal_text(v, have, need)), vertex(v), connectivity(have), required(need) {}

double terminal_connectivity(const MetricFlow& flow, int v) {
  return connectivity_in(flow.f, flow.source, flow.sink, v);
}

MetricFlow split_off(const MetricFlow& flow, const std::vector<int>& keep, const std::vector<double>& coverage,
                     SplitOffStats* stats) {
  const int n = flow.size();
  std::vector<char> kept(n, 0);
  for (int v : keep) {
    if (v < 0 || v >= n) throw std::invalid_argument("split_off: kept vertex out of range");
    kept[v] = 1;
  }
  if (!kept[flow.source] || !kept[flow.sink]) throw std::invalid_argument("split_off: terminals must be kept");

  std::vector<int> watched;
  std::vector<double> need(n, 0.0);
  double scale = 1.0;
  for (int v = 0; v < n; ++v) {
    if (!kept[v] || v == flow.source || v == flow.sink) continue;
    need[v] = v < static_cast<int>(coverage.size()) ? coverage[v] : 0.0;
    if (need[v] > 0.0) watched.push_back(v);
    scale = std::max(scale, need[v]);
  }
  const double tol = 1e-7 * scale;

  auto work = flow.f;
  for (int v = 0; v < n; ++v) work[v][v] = 0.0;
  for (int v : watched) {
    const double have = connectivity_in(work, flow.source, flow.sink, v);
    if (have < need[v] - tol) throw SplitOffRefused(v, have, need[v]);
  }

  SplitOffStats local;
  auto feasible = [&]() {
    for (int v : watched)
      if (connectivity_in(work, flow.source, flow.sink, v) < need[v] - tol) return false;
    return true;
  };
  auto shift = [&](int u, int w, int v, double g) {
    work[u][w] -= g;
    work[w][v] -= g;
    if (u != v) work[u][v] += g;
    if (work[u][w] < kZero) work[u][w] = 0.0;
    if (work[w][v] < kZero) work[w][v] = 0.0;
  };

  for (int w = 0; w < n; ++w) {
    if (kept[w]) continue;
    bool touched = false;
    for (int round = 0; round < 64; ++round) {
      std::vector<int> ins, outs;
      for (int u = 0; u < n; ++u) {
        if (work[u][w] > kZero) ins.push_back(u);
        if (work[w][u] > kZero) outs.push_back(u);
      }
      if (ins.empty() || outs.empty()) break;
      touched = true;
      bool progress = false;
      for (int v : outs)
        for (int u : ins) {
          const double g = std::min(work[u][w], work[w][v]);
          if (g <= kZero) continue;
          shift(u, w, v, g);
          if (feasible()) {
            ++local.splits;
            progress = true;
            continue;
          }
          shift(u, w, v, -g);
          double lo = 0.0, hi = g;
          for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            shift(u, w, v, mid);
            const bool ok = feasible();
            shift(u, w, v, -mid);
            (ok ? lo : hi) = mid;
          }
          if (lo > kZero) {
            shift(u, w, v, lo);
            ++local.splits;
            progress = true;
          }
        }
      if (!progress) break;
    }
    double through = 0.0;
    for (int u = 0; u < n; ++u) through += work[u][w];
    if (through > kZero) {
      // Pair what is left proportionally; the connectivity requirement may slip here.
      ++local.fallback_vertices;
      std::vector<double> in_col(n), out_row(n);
      for (int u = 0; u < n; ++u) {
        in_col[u] = work[u][w];
        out_row[u] = work[w][u];
      }
      double out_total = std::accumulate(out_row.begin(), out_row.end(), 0.0);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          if (u != v && in_col[u] > 0.0 && out_row[v] > 0.0 && out_total > 0.0)
            work[u][v] += in_col[u] * out_row[v] / out_total;
    }
    for (int u = 0; u < n; ++u) work[u][w] = work[w][u] = 0.0;
    if (touched || through > kZero) ++local.vertices_removed;
  }

  MetricFlow out = flow;
  out.f = std::move(work);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (out.f[u][v] < kZero || u == v) out.f[u][v] = 0.0;
  if (stats) *stats = local;
  return out;
}

double atspp_lp_value(const std::vector<int>& vertices, int start, int end, const CostMatrix& metric, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("atspp_lp_value: rho must lie in (0,1]");
  const int n = static_cast<int>(vertices.size());
  int si = -1, ti = -1;
  for (int i = 0; i < n; ++i) {
    if (vertices[i] == start) si = i;
    if (vertices[i] == end) ti = i;
  }
  if (si < 0 || ti < 0) throw std::invalid_argument("atspp_lp_value: terminals not among the vertices");
  if (n == 1) return 0.0;

  simplex::Solver lp;
  std::vector<std::vector<int>> var(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) var[i][j] = lp.add_variable(static_cast<double>(metric(vertices[i], vertices[j])));

  for (int i = 0; i < n; ++i) {
    std::vector<simplex::Term> row;
    for (int j = 0; j < n; ++j)
      if (j != i) {
        row.push_back({var[i][j], 1.0});
        row.push_back({var[j][i], -1.0});
      }
    double rhs = 0.0;
    if (si != ti) rhs = i == si ? 1.0 : (i == ti ? -1.0 : 0.0);
    lp.add_row(row, simplex::Sense::Equal, rhs);
  }

  std::vector<int> inner;
  for (int i = 0; i < n; ++i)
    if (i != si && i != ti) inner.push_back(i);
  auto add_cut = [&](const std::vector<char>& inside) {
    std::vector<simplex::Term> row;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && inside[i] != inside[j]) row.push_back({var[i][j], 1.0});
    lp.add_row(row, simplex::Sense::GreaterEqual, 2.0 * rho);
  };

  const int m = static_cast<int>(inner.size());
  if (n <= 12) {
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      std::vector<char> inside(n, 0);
      for (int b = 0; b < m; ++b)
        if (mask >> b & 1u) inside[inner[b]] = 1;
      add_cut(inside);
    }
    if (lp.solve() != simplex::Status::Optimal) throw std::runtime_error("atspp_lp_value: LP not solved");
    return lp.objective();
  }

  for (int round = 0; round < 10 * n; ++round) {
    if (lp.solve() != simplex::Status::Optimal) throw std::runtime_error("atspp_lp_value: LP not solved");
    const auto x = lp.values();
    bool added = false;
    for (int v : inner) {
      // Entering weight of the cheapest set around v that avoids both terminals.
      std::vector<std::vector<double>> cap(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && j != si && j != ti) cap[i == ti ? si : i][j] += x[var[i][j]];
      std::vector<char> side;
      const double value = detail::max_flow(std::move(cap), si, v, &side);
      if (2.0 * value < 2.0 * rho - 1e-7) {
        std::vector<char> inside(n, 0);
        for (int i = 0; i < n; ++i) inside[i] = !side[i] && i != si && i != ti;
        add_cut(inside);
        added = true;
      }
    }
    if (!added) return lp.objective();
  }
  throw std::runtime_error("atspp_lp_value: cut loop did not converge");
}

const char* to_string(PathSolverMode mode) {
  return mode == PathSolverMode::Exact ? "exact" : "heuristic";
}

PathSolverMode parse_path_solver_mode(const std::string& text) {
  if (text == "exact") return PathSolverMode::Exact;
  if (text == "heuristic") return PathSolverMode::Heuristic;
  throw std::invalid_argument("unknown path solver mode '" + text + "'");
}

namespace {

Cost sequence_cost(const std::vector<int>& seq, const CostMatrix& metric) {
  Cost total = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) total += metric(seq[i - 1], seq[i]);
  return total;
}

// Held-Karp over the vertices other than start; `end` is placed last unless tour.
std::optional<std::vector<int>> held_karp(const std::vector<int>& others, int start, int end_index,
                                          const std::vector<char>& banned_first, const CostMatrix& metric) {
  const int m = static_cast<int>(others.size());
  const bool tour = end_index < 0;
  const std::size_t full = (std::size_t{1} << m) - 1;
  constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;
  std::vector<Cost> dp((full + 1) * m, kInf);
  std::vector<signed char> parent((full + 1) * m, -1);
  auto at = [m](std::size_t mask, int j) { return mask * m + j; };
  for (int j = 0; j < m; ++j) {
    if (banned_first[j]) continue;
    if (!tour && j == end_index && m > 1) continue;
    dp[at(std::size_t{1} << j, j)] = metric(start, others[j]);
  }
  for (std::size_t mask = 1; mask <= full; ++mask)
    for (int j = 0; j < m; ++j) {
      const Cost here = dp[at(mask, j)];
      if (here >= kInf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask >> k & 1u) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        if (!tour && k == end_index && next != full) continue;
        const Cost cand = here + metric(others[j], others[k]);
        if (cand < dp[at(next, k)]) {
          dp[at(next, k)] = cand;
          parent[at(next, k)] = static_cast<signed char>(j);
        }
      }
    }
  int last = -1;
  Cost best = kInf;
  if (tour) {
    for (int j = 0; j < m; ++j) {
      const Cost here = dp[at(full, j)];
      if (here < kInf && here + metric(others[j], start) < best) {
        best = here + metric(others[j], start);
        last = j;
      }
    }
  } else if (dp[at(full, end_index)] < kInf) {
    last = end_index;
  }
  if (last < 0) return std::nullopt;
  std::vector<int> order;
  std::size_t mask = full;
  for (int j = last; j >= 0;) {
    order.push_back(others[j]);
    const int p = parent[at(mask, j)];
    mask &= ~(std::size_t{1} << j);
    j = p;
  }
  std::reverse(order.begin(), order.end());
  return order;
}

// Returns false when the ban on first vertices had to be ignored.
bool cheapest_insertion(std::vector<int> rest, std::vector<char> banned, std::vector<int>& seq,
                        const CostMatrix& metric) {
  bool honoured = true;
  while (!rest.empty()) {
    Cost best = std::numeric_limits<Cost>::max();
    std::size_t best_r = rest.size(), best_pos = 1;
    for (int pass = 0; pass < 2 && best_r == rest.size(); ++pass)
      for (std::size_t r = 0; r < rest.size(); ++r)
        for (std::size_t pos = 1; pos < seq.size(); ++pos) {
          if (pass == 0 && pos == 1 && banned[r]) continue;
          const Cost delta =
              metric(seq[pos - 1], rest[r]) + metric(rest[r], seq[pos]) - metric(seq[pos - 1], seq[pos]);
          if (delta < best) {
            best = delta;
            best_r = r;
            best_pos = pos;
          }
          if (pass == 1) honoured = false;
        }
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(best_pos), rest[best_r]);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best_r));
    banned.erase(banned.begin() + static_cast<std::ptrdiff_t>(best_r));
  }
  return honoured;
}

}  // namespace

PathSolution solve_path(const PathRequest& req, const CostMatrix& metric) {
  std::vector<int> verts = req.vertices;
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  if (!std::binary_search(verts.begin(), verts.end(), req.start) ||
      !std::binary_search(verts.begin(), verts.end(), req.end))
    throw std::invalid_argument("solve_path: start and end must be among the vertices");
  const bool tour = req.start == req.end;

  PathSolution out;
  std::vector<int> others;
  for (int v : verts)
    if (v != req.start) others.push_back(v);
  if (others.empty()) {
    out.sequence = {req.start};
    return out;
  }

  auto banned_for = [&](const std::vector<int>& list, bool honour) {
    std::vector<char> banned(list.size(), 0);
    if (!honour) return banned;
    for (std::size_t j = 0; j < list.size(); ++j)
      banned[j] = std::find(req.forbidden_first.begin(), req.forbidden_first.end(), list[j]) !=
                  req.forbidden_first.end();
    return banned;
  };

  const bool exact = req.mode == PathSolverMode::Exact && static_cast<int>(verts.size()) <= kExactPathMaxVertices;
  out.heuristic = !exact;
  if (exact) {
    const int end_index =
        tour ? -1 : static_cast<int>(std::find(others.begin(), others.end(), req.end) - others.begin());
    auto order = held_karp(others, req.start, end_index, banned_for(others, true), metric);
    if (!order) {
      out.constraint_relaxed = true;
      order = held_karp(others, req.start, end_index, banned_for(others, false), metric);
    }
    out.sequence.push_back(req.start);
    out.sequence.insert(out.sequence.end(), order->begin(), order->end());
    if (tour) out.sequence.push_back(req.start);
  } else {
    std::vector<int> rest;
    for (int v : others)
      if (tour || v != req.end) rest.push_back(v);
    out.sequence = {req.start, req.end};
    out.constraint_relaxed = !cheapest_insertion(rest, banned_for(rest, true), out.sequence, metric);
  }
  out.cost = sequence_cost(out.sequence, metric);
  return out;
}

}  // namespace dirlat
