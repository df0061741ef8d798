#pragma once

#include <map>
#include <string>
#include <vector>

#include "dirlat/atsp_path.hpp"
#include "dirlat/guessing.hpp"
#include "dirlat/lp.hpp"
#include "dirlat/timegraph.hpp"

namespace dirlat {

struct RoundingParams {
  double delta = 0.063;
  double rho1 = 0.196;
  double rho2 = 0.946;
  PathSolverMode solver = PathSolverMode::Exact;

  double nontour_floor() const { return rho2 * (1.0 - delta) - 3.0 * delta; }
  // Throws std::invalid_argument naming the failed inequality.
  void validate() const;
};

// Fractional mass below this counts as zero when testing "x > 0".
inline constexpr double kMassEps = 1e-9;

struct BucketPlan {
  RoundingParams params;
  std::vector<int> v_tour;                           // client vertices, sorted
  std::map<int, std::vector<int>> tour_buckets;      // i in A_tour
  std::map<int, std::vector<int>> preliminary;       // i outside A_tour, before augmentation
  std::map<int, std::vector<int>> augment;           // W_i
  std::map<int, char> augment_case;                  // 'a', 'b' or 'c'
  std::map<int, std::vector<int>> nontour_buckets;   // final buckets outside A_tour
  std::vector<std::string> notes;                    // tolerance fallbacks
};

BucketPlan classify(const LpSolution& solution, const GuessTriple& triple, const Instance& metric,
                    const RoundingParams& params = {});

struct TourResult {
  int interval = 0;
  int root_place = -1;
  std::vector<int> walk;  // places, closed at the root
  Cost cost = 0;
  double flow_cost = 0.0;
  double cost_bound = 0.0;  // (1 + alpha/(rho1 delta)) t_i with alpha = 1
  bool within_bound = true;
  bool members_charged = true;  // every member pays at least (1-rho1) delta t_i in the LP
  bool heuristic = false;
  std::string split_note;
};

struct PathResult {
  int interval = 0;
  std::vector<int> walk;  // places, artificial ends removed
  Cost cost = 0;
  double flow_cost = 0.0;
  double cost_bound = 0.0;  // t_i / (2 rho2 (1-delta) - 6 delta - 1) with psi = 1
  bool within_bound = true;
  bool end_visited_early = true;  // mass of the last vertex before t_i
  bool start_in_interval = true;  // required when i = 1 or i-1 is a tour interval
  bool members_charged = true;
  bool start_relaxed = false;
  bool heuristic = false;
  std::string split_note;
};

// Place-indexed metric of the network (roots copy their hosts).
CostMatrix place_metric(const TimeNetwork& network);

std::map<int, TourResult> round_tour_intervals(const BucketPlan& plan, const LpSolution& solution,
                                               const GuessTriple& triple, const TimeNetwork& network);
std::map<int, PathResult> round_nontour_intervals(const BucketPlan& plan, const LpSolution& solution,
                                                  const GuessTriple& triple, const TimeNetwork& network);

struct Concatenation {
  std::vector<int> walk;  // places from the depot, roots included
  LatencyPath path;       // over nice.inner, roots and target dropped
  std::vector<double> joint_bound;  // sum_{j<=i} (2 t_j + c(P_j)) per interval
  bool joints_within_bound = true;  // each client's latency below its interval's joint bound
};

// Joins the walks in interval order and shortcuts the roots. Throws std::logic_error on a
// missing or repeated client.
Concatenation concatenate(const std::map<int, TourResult>& tours, const std::map<int, PathResult>& paths,
                          const GuessTriple& triple, const TimeNetwork& network, const Instance& metric);

struct RoundingResult {
  BucketPlan plan;
  std::map<int, TourResult> tours;
  std::map<int, PathResult> paths;
  Concatenation joined;
  bool heuristic = false;
  std::vector<std::string> diagnostics;  // per-interval bound misses
};

RoundingResult round_solution(const LpSolution& solution, const GuessTriple& triple, const TimeNetwork& network,
                              const NiceInstance& nice, const RoundingParams& params = {});

// 4 max{3 + a'/(r1 d), 2 + psi/(2 r2 (1-d) - 6d - 1)} max{1/(d(1-r1)), 1/((1-d)(1-r2))}, psi = 1 + 32 a.
double guarantee_constant(double alpha_atsp, double alpha_atspp, double delta, double rho1, double rho2);
// One ratio for both solvers.
double guarantee_constant(double alpha, double delta, double rho1, double rho2);
// The same with both solver ratios set to 1, as used with the exact path solver.
double effective_guarantee(const RoundingParams& params = {});

}  // namespace dirlat
