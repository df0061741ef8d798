#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirlat/guessing.hpp"
#include "dirlat/simplex.hpp"
#include "dirlat/timegraph.hpp"

namespace dirlat {

inline constexpr double kFeasibilityTol = 1e-7;
inline constexpr double kCutViolationTol = 1e-6;

// Sum_{t' <= t} z(entering S at t') >= Sum_{t' <= t} x_{v,t'}; S and v are client vertices.
struct CutConstraint {
  std::vector<int> S;
  int v = -1;
  Cost t = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double violation() const { return rhs - lhs; }
};

enum class LpStatus { Optimal, Infeasible, IterationLimit };
const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  std::vector<double> z;               // per network arc
  std::vector<int> client_vertices;    // row order of x
  std::vector<int> row_of_vertex;      // inverse of client_vertices, -1 elsewhere
  std::vector<std::vector<double>> x;  // x[c][t], t in [0, T+1]
  double feasibility_tolerance = kFeasibilityTol;
  int cuts_added = 0;
  int rounds = 0;
  long simplex_iterations = 0;

  double x_at(int vertex, Cost t) const;
  double x_sum(int vertex, Cost from, Cost to) const;  // sum over t in [from, to)
};

// Computes x from z: x_{v,t} is the travel inflow into (v,t).
LpSolution solution_from_z(const TimeNetwork& network, std::vector<double> z);

enum class RowKind { Source, Flow, Visit, Shortness, Cut };

struct LinearRow {
  std::vector<std::pair<int, double>> terms;  // (network arc, coefficient)
  simplex::Sense sense = simplex::Sense::Equal;
  double rhs = 0.0;
  std::string name;
  RowKind kind = RowKind::Flow;
};

class LpModel {
 public:
  const TimeNetwork& network() const { return *network_; }
  const std::vector<LinearRow>& rows() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<char>& fixed_zero() const { return fixed_zero_; }
  const std::optional<GuessTriple>& triple() const { return triple_; }
  int shortness_rows() const { return shortness_rows_; }
  int forbidden_arcs() const { return forbidden_arcs_; }

 private:
  friend LpModel build_base_lp(const TimeNetwork&, const NiceInstance&);
  friend LpModel& strengthen_lp(LpModel&, const GuessTriple&, const NiceInstance&);
  const TimeNetwork* network_ = nullptr;
  std::vector<LinearRow> rows_;
  std::vector<double> objective_;
  std::vector<char> fixed_zero_;
  std::optional<GuessTriple> triple_;
  int shortness_rows_ = 0;
  int forbidden_arcs_ = 0;
};

// Visit rows, flow conservation at every inner node, unit outflow at (s,0).
// The network must outlive the model.
LpModel build_base_lp(const TimeNetwork& network, const NiceInstance& nice);

// Adds the guess-specific structure: forbidden boundary crossings of tour intervals,
// shortness rows for pairs that are not t_{i+1}-short, x = 0 from t_q on, and the
// interval-charged objective. Root conservation is already part of the base rows.
LpModel& strengthen_lp(LpModel& model, const GuessTriple& triple, const NiceInstance& nice);

// True if the arc crosses a tour-interval boundary anywhere but at that interval's root.
bool crosses_tour_boundary_illegally(const TimeNetwork& network, const TimeArc& arc, const GuessTriple& triple);

struct SeparationOptions {
  double tolerance = kCutViolationTol;
  bool most_violated = false;
};

// First violated cut in scan order (clients by index, candidate times ascending).
std::optional<CutConstraint> separate(const LpSolution& solution, const TimeNetwork& network,
                                      const SeparationOptions& options = {});
// One violated cut per client, same scan order.
std::vector<CutConstraint> separate_per_client(const LpSolution& solution, const TimeNetwork& network,
                                               const SeparationOptions& options = {});

LinearRow cut_row(const CutConstraint& cut, const TimeNetwork& network);

// Arcs: one variable per time arc. Paths: column generation over source-sink paths
// of the time network, which keeps conservation implicit.
enum class LpMethod { Arcs, Paths };
const char* to_string(LpMethod method);
LpMethod parse_lp_method(const std::string& text);

struct SolveOptions {
  LpMethod method = LpMethod::Paths;
  long max_pricing_rounds = 50000;
  int max_rounds = 200;
  double cut_tolerance = kCutViolationTol;
  simplex::Options simplex;
};

LpSolution solve(const LpModel& model, const TimeNetwork& network, const SolveOptions& options = {});

double evaluate_objective(const LpModel& model, const LpSolution& solution);

// Row-by-row check of a point against the model and all cut constraints; empty means feasible.
std::vector<std::string> feasibility_report(const LpModel& model, const LpSolution& solution,
                                            double tolerance = kFeasibilityTol);

}  // namespace dirlat
