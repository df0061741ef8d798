#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dirlat/certificate.hpp"
#include "dirlat/oracle.hpp"
#include "dirlat/rounding.hpp"
#include "test_support.hpp"

using namespace dirlat;
using testsupport::nice_auto;
using testsupport::random_metric;

namespace {

constexpr double kTol = 1e-9;

// An LP point with arbitrary x and no z: enough for classification.
LpSolution synthetic_x(int clients, Cost horizon, Cost last_time, std::mt19937& rng) {
  LpSolution sol;
  sol.row_of_vertex.assign(clients + 2, -1);
  std::uniform_int_distribution<Cost> when(1, last_time);
  std::uniform_int_distribution<int> pieces(1, 3), share(1, 20);
  for (int v = 1; v <= clients; ++v) {
    sol.row_of_vertex[v] = static_cast<int>(sol.client_vertices.size());
    sol.client_vertices.push_back(v);
    std::vector<double> row(horizon + 2, 0.0);
    const int k = pieces(rng);
    std::vector<int> w(k);
    int total = 0;
    for (int& x : w) total += x = share(rng);
    for (int j = 0; j < k; ++j) row[when(rng)] += static_cast<double>(w[j]) / total;
    sol.x.push_back(row);
  }
  return sol;
}

struct ExpectedPlan {
  std::set<int> v_tour;
  std::map<int, std::set<int>> tour, prelim, augment, final_buckets;
  std::map<int, char> cases;
};

// Direct reading of the classification rules over per-interval masses.
ExpectedPlan expected_plan(const LpSolution& sol, const GuessTriple& g, const CostMatrix& c,
                           const RoundingParams& p) {
  const int q = g.q();
  std::map<int, std::vector<double>> mass;  // vertex -> mass per interval, [0] unused
  std::map<int, std::vector<double>> prefix;  // vertex -> mass before t_i
  for (std::size_t r = 0; r < sol.client_vertices.size(); ++r) {
    const int v = sol.client_vertices[r];
    mass[v].assign(q + 1, 0.0);
    prefix[v].assign(q + 1, 0.0);
    for (Cost t = 0; t < static_cast<Cost>(sol.x[r].size()); ++t) {
      for (int i = 1; i <= q; ++i) {
        if (t >= g.thresholds[i - 1] && t < g.thresholds[i]) mass[v][i] += sol.x[r][t];
        if (t < g.thresholds[i]) prefix[v][i] += sol.x[r][t];
      }
    }
  }
  auto tour_flag = [&](int i) { return std::count(g.a_tour.begin(), g.a_tour.end(), i) > 0; };

  ExpectedPlan e;
  std::vector<int> outside;
  for (auto& [v, m] : mass) {
    double in_tours = 0.0;
    for (int i = 1; i <= q; ++i)
      if (tour_flag(i)) in_tours += m[i];
    if (in_tours + kTol >= p.delta) e.v_tour.insert(v);
    else outside.push_back(v);
  }
  for (int i : g.a_tour) e.tour[i];
  for (int v : e.v_tour) {
    double run = 0.0;
    int at = g.a_tour.back();
    for (int i : g.a_tour) {
      run += mass[v][i];
      if (run + kTol >= p.rho1 * p.delta) {
        at = i;
        break;
      }
    }
    e.tour[at].insert(v);
  }
  std::vector<int> free_intervals;
  for (int i = 1; i <= q; ++i)
    if (!tour_flag(i)) free_intervals.push_back(i);
  for (int i : free_intervals) e.prelim[i];
  for (int v : outside) {
    double run = 0.0;
    int at = free_intervals.back();
    for (int i : free_intervals) {
      run += mass[v][i];
      if (run + kTol >= p.rho2 * (1 - p.delta)) {
        at = i;
        break;
      }
    }
    e.prelim[at].insert(v);
  }
  const double floor = p.rho2 * (1 - p.delta) - 3 * p.delta;
  for (int i : free_intervals) {
    e.augment[i];
    if (i == q) continue;
    if (tour_flag(i + 1)) {
      const bool both = i >= 2 && tour_flag(i - 1);
      e.cases[i] = both ? 'a' : 'b';
      for (int v : outside)
        if (prefix[v][i] + kTol >= floor && (!both || mass[v][i] > kTol)) e.augment[i].insert(v);
    } else {
      e.cases[i] = 'c';
      const Cost limit = g.thresholds[i + 1];
      for (int w : outside)
        for (int u : e.prelim[i])
          if (u != w && c(u, w) > std::max(c(w, u), limit)) e.augment[i].insert(w);
    }
  }
  std::set<int> used;
  for (int i : free_intervals) {
    std::set<int>& out = e.final_buckets[i];
    for (int v : e.prelim[i])
      if (!used.count(v)) out.insert(v);
    for (int v : e.augment[i])
      if (!used.count(v)) out.insert(v);
    used.insert(out.begin(), out.end());
  }
  return e;
}

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

template <class Map>
std::map<int, std::set<int>> as_sets(const Map& m) {
  std::map<int, std::set<int>> out;
  for (const auto& [k, v] : m) out[k] = as_set(v);
  return out;
}

GuessTriple triple_with(std::vector<Cost> t, std::vector<int> a_tour) {
  GuessTriple g;
  g.thresholds = std::move(t);
  g.a_tour = std::move(a_tour);
  for (int i : g.a_tour) g.roots[i] = 1;
  return g;
}

NiceInstance three_point() {
  const std::vector<std::vector<Cost>> rows{{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
  NiceInstance nice;
  nice.original.cost = CostMatrix(3);
  nice.inner.cost = CostMatrix(4);
  for (int u = 0; u < 3; ++u) {
    for (int v = 0; v < 3; ++v) nice.original.cost(u, v) = nice.inner.cost(u, v) = rows[u][v];
    nice.inner.cost(u, 3) = 1;
    nice.inner.cost(3, u) = 100;
  }
  nice.inner.target = 3;
  return nice;
}

void check_rounded(const RoundingResult& r, const LpSolution& sol, const GuessTriple& g, const TimeNetwork& net,
                   const NiceInstance& nice, const std::string& label) {
  std::vector<int> order = r.joined.path.order;
  std::sort(order.begin(), order.end());
  EXPECT_EQ(order, nice.inner.clients()) << label;
  EXPECT_EQ(r.joined.path.total, testsupport::latency_by_hand(nice.inner.cost, nice.inner.s, r.joined.path.order))
      << label;
  for (const auto& [i, tour] : r.tours) {
    const int root = net.root_place(g.roots.at(i));
    EXPECT_EQ(tour.walk.front(), root) << label;
    EXPECT_EQ(tour.walk.back(), root) << label;
  }
  for (const auto& [i, path] : r.paths) {
    std::set<int> seen;
    for (int place : path.walk) seen.insert(net.places()[place].vertex);
    EXPECT_EQ(seen, as_set(r.plan.nontour_buckets.at(i))) << label;
  }
  EXPECT_LE(static_cast<double>(r.joined.path.total), effective_guarantee() * sol.objective + 1e-6) << label;
}

}  // namespace

TEST(Params, DefaultsAndValidation) {
  RoundingParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_NEAR(p.nontour_floor(), 0.946 * 0.937 - 0.189, 1e-12);
  EXPECT_THROW((RoundingParams{0.0, 0.196, 0.946}.validate()), std::invalid_argument);
  EXPECT_THROW((RoundingParams{0.063, 1.0, 0.946}.validate()), std::invalid_argument);
  EXPECT_THROW((RoundingParams{0.063, 0.196, 0.6}.validate()), std::invalid_argument);
}

TEST(Constants, RoundingGuarantee) {
  const double g = guarantee_constant(17 + 1e-5, 0.063, 0.196, 0.946);
  EXPECT_GE(g, 109278.0);
  EXPECT_LE(g, 109298.0);
  EXPECT_DOUBLE_EQ(g, guarantee_constant(17 + 1e-5, 17 + 1e-5, 0.063, 0.196, 0.946));
  EXPECT_NEAR(effective_guarantee(), 6765.94, 0.01);
  EXPECT_LT(guarantee_constant(1.0, 17.0, 0.063, 0.196, 0.946), g);
  EXPECT_THROW(guarantee_constant(0.5, 0.063, 0.196, 0.946), std::invalid_argument);
}

TEST(Constants, CertificateChain) {
  EXPECT_EQ(kThresholdFactor, 76);
  EXPECT_EQ(kDelayFactor, 304);
  EXPECT_DOUBLE_EQ(kCertificateFactor, 532.0);
}

TEST(Classify, MatchesRuleByRuleReading) {
  std::mt19937 rng(3);
  const std::vector<Cost> t{0, 4, 9, 16};
  for (int trial = 0; trial < 60; ++trial) {
    const int clients = 3 + trial % 5;
    LpSolution sol = synthetic_x(clients, 18, 15, rng);
    Instance metric = random_metric(clients, 9, 100 + trial);
    for (unsigned mask = 0; mask < 8; ++mask) {
      std::vector<int> a;
      for (int i = 1; i <= 3; ++i)
        if (mask >> (i - 1) & 1u) a.push_back(i);
      GuessTriple g = triple_with(t, a);
      BucketPlan plan = classify(sol, g, metric);
      ExpectedPlan e = expected_plan(sol, g, metric.cost, plan.params);
      const std::string label = "trial " + std::to_string(trial) + " mask " + std::to_string(mask);
      EXPECT_EQ(as_set(plan.v_tour), e.v_tour) << label;
      EXPECT_EQ(as_sets(plan.tour_buckets), e.tour) << label;
      EXPECT_EQ(as_sets(plan.preliminary), e.prelim) << label;
      EXPECT_EQ(as_sets(plan.augment), e.augment) << label;
      EXPECT_EQ(plan.augment_case, e.cases) << label;
      EXPECT_EQ(as_sets(plan.nontour_buckets), e.final_buckets) << label;
    }
  }
}

TEST(Classify, BucketsPartitionTheClients) {
  std::mt19937 rng(8);
  const std::vector<Cost> t{0, 3, 7, 12, 20};
  for (int trial = 0; trial < 40; ++trial) {
    LpSolution sol = synthetic_x(7, 22, 19, rng);
    Instance metric = random_metric(7, 5, trial + 1);
    std::vector<int> a;
    for (int i = 1; i <= 4; ++i)
      if (rng() % 2) a.push_back(i);
    if (a.size() == 4) a.pop_back();
    BucketPlan plan = classify(sol, triple_with(t, a), metric);
    std::multiset<int> tour_members, path_members;
    for (const auto& [i, b] : plan.tour_buckets) tour_members.insert(b.begin(), b.end());
    for (const auto& [i, b] : plan.nontour_buckets) path_members.insert(b.begin(), b.end());
    EXPECT_EQ(std::set<int>(tour_members.begin(), tour_members.end()), as_set(plan.v_tour));
    EXPECT_EQ(tour_members.size(), plan.v_tour.size());
    EXPECT_EQ(tour_members.size() + path_members.size(), 7u);
    for (int v : path_members) EXPECT_EQ(tour_members.count(v), 0u);
    for (const auto& [i, b] : plan.nontour_buckets)
      for (int v : plan.preliminary.at(i)) EXPECT_TRUE(std::count(b.begin(), b.end(), v)) << "lost " << v;
  }
}

TEST(Classify, ThresholdMassIsInclusive) {
  LpSolution sol;
  sol.client_vertices = {1, 2};
  sol.row_of_vertex = {-1, 0, 1, -1};
  sol.x.assign(2, std::vector<double>(12, 0.0));
  sol.x[0][2] = 0.063;  // exactly delta inside the tour interval
  sol.x[0][6] = 0.937;
  sol.x[1][2] = 0.05;
  sol.x[1][6] = 0.95;
  Instance metric = random_metric(2, 3, 1);
  BucketPlan plan = classify(sol, triple_with({0, 4, 9}, {1}), metric);
  EXPECT_EQ(plan.v_tour, std::vector<int>{1});
  EXPECT_EQ(plan.tour_buckets.at(1), std::vector<int>{1});
  EXPECT_EQ(plan.nontour_buckets.at(2), std::vector<int>{2});
  EXPECT_TRUE(plan.notes.empty());
}

TEST(Concatenate, JoinsWalksAndDropsRoots) {
  NiceInstance nice = three_point();
  TimeNetwork net = build_network(nice, {1}, 10, {NetworkMode::Compact});
  GuessTriple g = triple_with({0, 5, 10}, {1});
  const int r = net.root_place(1), p1 = net.client_place(1), p2 = net.client_place(2);
  TourResult tour;
  tour.interval = 1;
  tour.root_place = r;
  tour.walk = {r, p2, r};
  tour.cost = 3;
  PathResult path;
  path.interval = 2;
  path.walk = {p1};
  Concatenation joined = concatenate({{1, tour}}, {{2, path}}, g, net, nice.inner);
  EXPECT_EQ(joined.path.order, (std::vector<int>{2, 1}));
  EXPECT_EQ(joined.path.total, 2 + 4);
  EXPECT_EQ(joined.walk, (std::vector<int>{net.depot_place(), r, p2, r, p1}));
  EXPECT_DOUBLE_EQ(joined.joint_bound[1], 13.0);
  EXPECT_DOUBLE_EQ(joined.joint_bound[2], 33.0);
  EXPECT_TRUE(joined.joints_within_bound);

  EXPECT_THROW(concatenate({{1, tour}}, {}, g, net, nice.inner), std::logic_error);
  PathResult twice = path;
  twice.walk = {p2, p1};
  EXPECT_THROW(concatenate({{1, tour}}, {{2, twice}}, g, net, nice.inner), std::logic_error);
}

TEST(RoundSolution, SmallInstancesStayWithinGuarantee) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    NiceInstance nice = nice_auto(random_metric(seed == 1 ? 1 : 3, 2, seed));
    const Cost T = compute_horizon(nice, nullptr, true).horizon;
    auto triples = setup_triples(nice, T);
    int rounded = 0;
    for (std::size_t k = 0; k < triples.size() && rounded < 4; k += 3) {
      const GuessTriple& g = triples[k];
      TimeNetwork net = build_network(nice, g.root_hosts(), g.t_last(), {NetworkMode::Compact});
      LpModel model = build_base_lp(net, nice);
      strengthen_lp(model, g, nice);
      LpSolution sol = solve(model, net);
      if (sol.status != LpStatus::Optimal) continue;
      ++rounded;
      RoundingResult r = round_solution(sol, g, net, nice);
      check_rounded(r, sol, g, net, nice, "seed " + std::to_string(seed) + " " + g.encoding());
    }
    EXPECT_GT(rounded, 0) << seed;
  }
}

TEST(RoundSolution, TourIntervalFromCertificateTriple) {
  int with_tour = 0;
  for (std::uint64_t seed = 1; seed <= 6 && with_tour < 2; ++seed) {
    NiceInstance nice = nice_auto(random_metric(7, 3, seed));
    Certificate cert = certificate_from_opt(nice, exact_opt(nice.inner));
    ASSERT_TRUE(cert.ok()) << seed;
    const GuessTriple& g = cert.triple;
    if (g.a_tour.empty()) continue;
    ++with_tour;
    TimeNetwork net = build_network(nice, g.root_hosts(), g.t_last(), {NetworkMode::Compact});
    LpModel model = build_base_lp(net, nice);
    strengthen_lp(model, g, nice);
    LpSolution sol = solve(model, net);
    ASSERT_EQ(sol.status, LpStatus::Optimal) << seed;
    EXPECT_LE(sol.objective, cert.objective + 1e-5) << seed;
    RoundingResult r = round_solution(sol, g, net, nice);
    EXPECT_EQ(r.tours.size(), g.a_tour.size());
    check_rounded(r, sol, g, net, nice, "seed " + std::to_string(seed));
  }
  EXPECT_EQ(with_tour, 2);
}
