#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirlat/cost_matrix.hpp"
#include "dirlat/guessing.hpp"
#include "dirlat/timegraph.hpp"

namespace dirlat {

// Arc weights on a complete digraph with a designated source and sink.
struct MetricFlow {
  CostMatrix cost;
  std::vector<std::vector<double>> f;
  int source = -1;
  int sink = -1;
  std::vector<int> place;  // network place per vertex, -1 for an artificial sink

  MetricFlow() = default;
  MetricFlow(CostMatrix cost, int source, int sink);

  int size() const { return cost.size(); }
  double value() const;  // net outflow at the source
  double total_cost() const;
  double inflow(int v) const;
  double outflow(int v) const;
  // Largest |out - in| over vertices other than source and sink.
  double max_imbalance() const;
  // Undirected weight of arcs with exactly one end in `inside`.
  double crossing(const std::vector<char>& inside) const;
};

enum class WindowBoundary { Drop, RedirectToSink };

// Sums z over travel arcs ((u,t),(v,t')) with a <= t and t' < b onto the place pair (u,v).
// With RedirectToSink an artificial vertex is appended (costs 0 into it) and every arc or wait
// step that leaves the window at b is charged to (u, sink). Source is the depot; sink is the
// artificial vertex or the target.
MetricFlow time_aggregate(const std::vector<double>& z, const TimeNetwork& network, Cost window_begin,
                          Cost window_end, WindowBoundary boundary = WindowBoundary::Drop);

class SplitOffRefused : public std::invalid_argument {
 public:
  SplitOffRefused(int vertex, double connectivity, double required);
  int vertex;
  double connectivity;
  double required;
};

struct SplitOffStats {
  int vertices_removed = 0;
  int splits = 0;
  int fallback_vertices = 0;  // vertices finished by proportional pairing
};

// Connectivity of v from the terminals: min over U containing v and avoiding source and sink of
// the weight entering U.
double terminal_connectivity(const MetricFlow& flow, int v);

// Splits off every vertex outside `keep` pair by pair, keeping terminal_connectivity(v) at least
// coverage[v] for every kept non-terminal v. Throws SplitOffRefused when the input already misses
// the requirement. The result lives on `keep` only.
MetricFlow split_off(const MetricFlow& flow, const std::vector<int>& keep, const std::vector<double>& coverage,
                     SplitOffStats* stats = nullptr);

// Optimum of the path LP with cut rows x(delta(U)) >= 2 rho; start == end gives the tour variant.
double atspp_lp_value(const std::vector<int>& vertices, int start, int end, const CostMatrix& metric, double rho);

enum class PathSolverMode { Exact, Heuristic };
const char* to_string(PathSolverMode mode);
PathSolverMode parse_path_solver_mode(const std::string& text);

inline constexpr int kExactPathMaxVertices = 18;

struct PathRequest {
  std::vector<int> vertices;  // must contain start and end
  int start = -1;
  int end = -1;               // equal to start for a closed tour
  PathSolverMode mode = PathSolverMode::Exact;
  std::vector<int> forbidden_first;  // may not directly follow start
};

struct PathSolution {
  std::vector<int> sequence;  // start ... end (tours repeat start at the end)
  Cost cost = 0;
  bool heuristic = false;
  bool constraint_relaxed = false;  // forbidden_first could not be honoured
};

PathSolution solve_path(const PathRequest& request, const CostMatrix& metric);

}  // namespace dirlat
