#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dirlat/guessing.hpp"
#include "dirlat/lp.hpp"
#include "dirlat/oracle.hpp"
#include "test_support.hpp"

using namespace dirlat;
using testsupport::nice_auto;
using testsupport::random_metric;

namespace {

// Appends a target to a small table without padding or scaling, so hand-computed optima apply.
NiceInstance from_rows(const std::vector<std::vector<Cost>>& rows) {
  const int m = static_cast<int>(rows.size());
  NiceInstance nice;
  nice.original.cost = CostMatrix(m);
  nice.inner.cost = CostMatrix(m + 1);
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) nice.original.cost(u, v) = nice.inner.cost(u, v) = rows[u][v];
    nice.inner.cost(u, m) = 1;
    nice.inner.cost(m, u) = 100;
  }
  nice.inner.target = m;
  return nice;
}

GuessTriple make_triple(std::vector<Cost> thresholds, std::vector<int> a_tour = {}, std::map<int, int> roots = {}) {
  GuessTriple g;
  g.thresholds = std::move(thresholds);
  g.a_tour = std::move(a_tour);
  g.roots = std::move(roots);
  return g;
}

double plain_lp(const NiceInstance& nice, Cost horizon, NetworkMode mode, LpMethod method = LpMethod::Paths) {
  TimeNetwork net = build_network(nice, {}, horizon, {mode});
  LpModel model = build_base_lp(net, nice);
  SolveOptions opts;
  opts.method = method;
  LpSolution sol = solve(model, net, opts);
  EXPECT_EQ(sol.status, LpStatus::Optimal);
  return sol.objective;
}

}  // namespace

TEST(PlainLp, OneClientPaysItsDistance) {
  NiceInstance nice = from_rows({{0, 3}, {2, 0}});
  EXPECT_NEAR(plain_lp(nice, 6, NetworkMode::Compact), 3.0, 1e-6);
  EXPECT_NEAR(plain_lp(nice, 6, NetworkMode::Full), 3.0, 1e-6);
}

TEST(PlainLp, TwoClientsAtUnitDistance) {
  NiceInstance nice = from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  EXPECT_NEAR(plain_lp(nice, 6, NetworkMode::Compact), 3.0, 1e-6);
  EXPECT_NEAR(plain_lp(nice, 6, NetworkMode::Full), 3.0, 1e-6);
}

TEST(PlainLp, NoClientsGivesZero) {
  NiceInstance nice = from_rows({{0}});
  TimeNetwork net = build_network(nice, {}, 3);
  LpModel model = build_base_lp(net, nice);
  LpSolution sol = solve(model, net);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective, 0.0, 1e-9);
  double into_sink = 0.0;
  for (int a : net.in_arcs(net.sink())) into_sink += sol.z[a];
  EXPECT_NEAR(into_sink, 1.0, 1e-9);
}

TEST(PlainLp, BelowExactOptimum) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    NiceInstance nice = nice_auto(random_metric(seed % 2 ? 3 : 1, 3, seed));
    const Cost opt = exact_opt(nice.inner).total;
    const Cost T = compute_horizon(nice, nullptr, true).horizon;
    EXPECT_LE(plain_lp(nice, T, NetworkMode::Compact), opt + 1e-5) << "seed " << seed;
  }
}

TEST(PlainLp, FullAndCompactAgree) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    NiceInstance nice = nice_auto(random_metric(3, 3, seed));
    const Cost H = compute_horizon(nice, nullptr, true).horizon;
    for (Cost T : {H, H + 3}) {
      EXPECT_NEAR(plain_lp(nice, T, NetworkMode::Full), plain_lp(nice, T, NetworkMode::Compact), 1e-6)
          << "seed " << seed << " T " << T;
    }
  }
}

TEST(PlainLp, ArcAndPathMethodsAgree) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    NiceInstance nice = nice_auto(random_metric(3, 3, seed));
    EXPECT_NEAR(plain_lp(nice, 10, NetworkMode::Compact, LpMethod::Arcs),
                plain_lp(nice, 10, NetworkMode::Compact, LpMethod::Paths), 1e-6);
  }
}

TEST(Strengthen, OneClientChargedAtThreshold) {
  NiceInstance nice = from_rows({{0, 3}, {2, 0}});
  GuessTriple g = make_triple({0, 8});
  TimeNetwork net = build_network(nice, {}, 8);
  LpModel model = build_base_lp(net, nice);
  strengthen_lp(model, g, nice);
  EXPECT_EQ(model.forbidden_arcs(), 0);
  LpSolution sol = solve(model, net);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective, 8.0, 1e-6);
}

TEST(Strengthen, TooSmallThresholdsAreInfeasible) {
  NiceInstance nice = from_rows({{0, 3, 3}, {2, 0, 2}, {2, 2, 0}});
  GuessTriple g = make_triple({0, 2});
  TimeNetwork net = build_network(nice, {}, 2);
  LpModel model = build_base_lp(net, nice);
  strengthen_lp(model, g, nice);
  for (LpMethod method : {LpMethod::Paths, LpMethod::Arcs}) {
    SolveOptions opts;
    opts.method = method;
    EXPECT_EQ(solve(model, net, opts).status, LpStatus::Infeasible);
  }
}

TEST(Strengthen, ShortnessRowCountMatchesPairEnumeration) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    NiceInstance nice = nice_auto(random_metric(3, 9, seed));
    GuessTriple g = make_triple({0, 3, 7, 12});
    TimeNetwork net = build_network(nice, {}, 12);
    LpModel model = build_base_lp(net, nice);
    strengthen_lp(model, g, nice);
    int expected = 0;
    const auto& c = nice.inner.cost;
    for (int i = 1; i <= 2; ++i)
      for (int u = 1; u <= 3; ++u)
        for (int v = 1; v <= 3; ++v)
          if (u != v && !(c(u, v) <= std::max(c(v, u), g.t(i + 1)))) ++expected;
    EXPECT_EQ(model.shortness_rows(), expected) << "seed " << seed;
  }
}

TEST(Strengthen, ForbiddenArcsMatchBoundaryRule) {
  NiceInstance nice = nice_auto(random_metric(3, 2, 5));
  GuessTriple g = make_triple({0, 3, 7, 11}, {1, 2}, {{1, 1}, {2, 3}});
  TimeNetwork net = build_network(nice, g.root_hosts(), 11);
  LpModel model = build_base_lp(net, nice);
  strengthen_lp(model, g, nice);
  int count = 0;
  for (std::size_t a = 0; a < net.arcs().size(); ++a) {
    const TimeArc& arc = net.arcs()[a];
    const TimeNode& from = net.nodes()[arc.tail];
    const TimeNode& to = net.nodes()[arc.head];
    bool forbidden = false;
    for (int i : g.a_tour) {
      const int root = net.root_place(g.roots.at(i));
      const Cost lo = g.t(i - 1), hi = g.t(i);
      if (from.time < lo && lo <= to.time && to.place != root) forbidden = true;
      if (from.time < hi && hi <= to.time && from.place != root) forbidden = true;
    }
    count += forbidden;
    const bool late_visit = arc.kind == ArcKind::Travel && net.places()[to.place].kind == PlaceKind::Client &&
                            to.time >= g.t_last();
    if (!late_visit) EXPECT_EQ(static_cast<bool>(model.fixed_zero()[a]), forbidden) << "arc " << a;
  }
  EXPECT_EQ(model.forbidden_arcs(), count);
  // Arcs from (s,0) into the first interval are not boundary crossings: nothing precedes time 0.
  for (int a : net.out_arcs(net.source()))
    if (net.nodes()[net.arcs()[a].head].time < g.t(1)) EXPECT_FALSE(model.fixed_zero()[a]);
}

TEST(Strengthen, RejectsMissingRootAndBadThresholds) {
  NiceInstance nice = nice_auto(random_metric(3, 2, 5));
  TimeNetwork net = build_network(nice, {}, 11);
  LpModel model = build_base_lp(net, nice);
  EXPECT_THROW(strengthen_lp(model, make_triple({0, 3, 7}, {2}, {{2, 1}}), nice), std::invalid_argument);
  LpModel model2 = build_base_lp(net, nice);
  EXPECT_THROW(strengthen_lp(model2, make_triple({0, 7, 3}), nice), std::invalid_argument);
}

TEST(Strengthen, NeverBelowThePlainLp) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    NiceInstance nice = nice_auto(random_metric(3, 2, seed));
    const Cost T = compute_horizon(nice, nullptr, true).horizon;
    int checked = 0;
    for (const GuessTriple& g : setup_triples(nice, T)) {
      if (checked++ >= 6) break;
      const double plain = plain_lp(nice, g.t_last(), NetworkMode::Compact);
      TimeNetwork net = build_network(nice, g.root_hosts(), g.t_last());
      LpModel model = build_base_lp(net, nice);
      strengthen_lp(model, g, nice);
      LpSolution sol = solve(model, net);
      if (sol.status != LpStatus::Optimal) continue;
      EXPECT_GE(sol.objective, plain - 1e-6);
      EXPECT_TRUE(feasibility_report(model, sol).empty());
      // Dropping the cut rounds can only lower the optimum.
      SolveOptions no_cuts;
      no_cuts.max_rounds = 0;
      EXPECT_LE(solve(model, net, no_cuts).objective, sol.objective + 1e-6);
    }
  }
}

TEST(Strengthen, ArcAndPathMethodsAgree) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    NiceInstance nice = nice_auto(random_metric(3, 2, seed));
    const Cost T = compute_horizon(nice, nullptr, true).horizon;
    int checked = 0;
    for (const GuessTriple& g : setup_triples(nice, T)) {
      if (checked++ >= 4) break;
      TimeNetwork net = build_network(nice, g.root_hosts(), g.t_last());
      LpModel model = build_base_lp(net, nice);
      strengthen_lp(model, g, nice);
      SolveOptions arcs;
      arcs.method = LpMethod::Arcs;
      LpSolution a = solve(model, net, arcs);
      LpSolution p = solve(model, net);
      ASSERT_EQ(a.status, p.status) << g.encoding();
      if (a.status == LpStatus::Optimal) EXPECT_NEAR(a.objective, p.objective, 1e-6) << g.encoding();
    }
  }
}

TEST(Separate, IntegralPathHasNoViolatedCut) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    NiceInstance nice = nice_auto(random_metric(3, 3, seed));
    for (NetworkMode mode : {NetworkMode::Compact, NetworkMode::Full}) {
      TimeNetwork net = build_network(nice, {}, 12, {mode});
      auto visits = testsupport::earliest_visits(net, {3, 1, 2});
      LpSolution sol = solution_from_z(net, testsupport::embed_visits(net, visits));
      EXPECT_FALSE(separate(sol, net).has_value());
      LpModel model = build_base_lp(net, nice);
      EXPECT_TRUE(feasibility_report(model, sol).empty());
    }
  }
}

TEST(Separate, MassWithoutInflowIsCut) {
  NiceInstance nice = nice_auto(random_metric(3, 3, 2));
  TimeNetwork net = build_network(nice, {}, 10);
  LpSolution sol = solution_from_z(net, std::vector<double>(net.arcs().size(), 0.0));
  const int row = sol.row_of_vertex[2];
  sol.x[row][4] = 0.25;
  sol.x[row][6] = 0.5;
  auto cut = separate(sol, net);
  ASSERT_TRUE(cut.has_value());
  // Every set holding 2 has zero inflow, so any of them is a minimum cut.
  EXPECT_TRUE(std::count(cut->S.begin(), cut->S.end(), 2));
  EXPECT_EQ(cut->v, 2);
  EXPECT_EQ(cut->t, 4);
  EXPECT_NEAR(cut->violation(), 0.25, 1e-12);
  SeparationOptions most;
  most.most_violated = true;
  auto worst = separate(sol, net, most);
  ASSERT_TRUE(worst.has_value());
  EXPECT_EQ(worst->t, 6);
  EXPECT_NEAR(worst->violation(), 0.75, 1e-12);
}

TEST(Separate, AgreesWithExhaustiveEnumerationOnRevisitingMixtures) {
  std::mt19937_64 rng(99);
  int violated = 0;
  for (int trial = 0; trial < 12; ++trial) {
    NiceInstance nice = nice_auto(random_metric(3, 2, 100 + trial));
    TimeNetwork net = build_network(nice, {}, 14);
    std::vector<double> z(net.arcs().size(), 0.0);
    double left = 1.0;
    for (int w = 0; w < 3; ++w) {
      const double weight = w == 2 ? left : left * (0.2 + 0.6 * static_cast<double>(rng() % 100) / 100.0);
      left -= weight;
      std::vector<int> order;
      for (int step = 0; step < 4; ++step) order.push_back(1 + static_cast<int>(rng() % 3));
      std::vector<int> walk;
      for (int v : order)
        if (walk.empty() || walk.back() != v) walk.push_back(v);
      auto part = testsupport::embed_visits(net, testsupport::earliest_visits(net, walk));
      for (std::size_t a = 0; a < z.size(); ++a) z[a] += weight * part[a];
    }
    LpSolution sol = solution_from_z(net, z);
    auto found = separate(sol, net);
    auto reference = testsupport::exhaustive_cut_check(sol, net, kCutViolationTol);
    EXPECT_EQ(found.has_value(), reference.has_value()) << "trial " << trial;
    violated += reference.has_value();
  }
  EXPECT_GT(violated, 0);
}

TEST(Separate, DeterministicAndCutRowMatchesEvaluation) {
  NiceInstance nice = nice_auto(random_metric(3, 2, 7));
  TimeNetwork net = build_network(nice, {}, 12);
  auto z = testsupport::embed_visits(net, testsupport::earliest_visits(net, {1, 2, 1, 3}));
  LpSolution sol = solution_from_z(net, z);
  auto a = separate(sol, net);
  auto b = separate(sol, net);
  ASSERT_TRUE(a.has_value());
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(a->S, b->S);
  EXPECT_EQ(a->t, b->t);
  LinearRow row = cut_row(*a, net);
  double lhs = 0.0;
  for (auto [arc, coef] : row.terms) lhs += coef * z[arc];
  EXPECT_NEAR(lhs, a->lhs - a->rhs, 1e-9);
  EXPECT_LT(lhs, 0.0);
}

TEST(Solve, RepeatedSolvesAreIdentical) {
  NiceInstance nice = nice_auto(random_metric(3, 2, 3));
  const Cost T = compute_horizon(nice, nullptr, true).horizon;
  GuessTriple g = setup_triples(nice, T).front();
  TimeNetwork net = build_network(nice, g.root_hosts(), g.t_last());
  LpModel model = build_base_lp(net, nice);
  strengthen_lp(model, g, nice);
  LpSolution a = solve(model, net);
  LpSolution b = solve(model, net);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.cuts_added, b.cuts_added);
  EXPECT_EQ(a.z, b.z);
}

TEST(Solve, VisitSumsAndObjectiveAreConsistent) {
  NiceInstance nice = nice_auto(random_metric(3, 3, 9));
  TimeNetwork net = build_network(nice, {}, compute_horizon(nice, nullptr, true).horizon);
  LpModel model = build_base_lp(net, nice);
  LpSolution sol = solve(model, net);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  for (std::size_t c = 0; c < sol.x.size(); ++c) EXPECT_NEAR(sol.x_sum(sol.client_vertices[c], 0, net.horizon() + 2), 1.0, 1e-7);
  EXPECT_NEAR(evaluate_objective(model, sol), sol.objective, 1e-6);
  EXPECT_FALSE(separate(sol, net).has_value());
}
