#include <gtest/gtest.h>

#include <algorithm>
#include <json.hpp>
#include <random>

#include "dirlat/certificate.hpp"
#include "dirlat/json_io.hpp"
#include "dirlat/oracle.hpp"
#include "test_support.hpp"

using namespace dirlat;
using testsupport::nice_auto;
using testsupport::random_metric;

namespace {

Instance table(const std::vector<std::vector<Cost>>& rows) {
  Instance inst;
  inst.cost = CostMatrix(static_cast<int>(rows.size()));
  for (std::size_t u = 0; u < rows.size(); ++u)
    for (std::size_t v = 0; v < rows.size(); ++v) inst.cost(u, v) = rows[u][v];
  return inst;
}

// Independent reading of a certificate: walk shape, objective and the cut rows for small n.
void recheck_certificate(const Certificate& cert, const NiceInstance& nice, Cost opt, const std::string& label) {
  ASSERT_TRUE(cert.ok()) << label << "\n" << cert.dump();
  EXPECT_EQ(cert.opt_reference, opt) << label;
  const TimeNetwork& net = cert.network;
  const GuessTriple& g = cert.triple;
  EXPECT_EQ(net.horizon(), g.t_last()) << label;

  std::vector<int> seen(nice.inner.m(), 0);
  double charged = 0.0;
  for (std::size_t k = 1; k < cert.walk.size(); ++k) {
    EXPECT_GT(cert.walk[k].time, cert.walk[k - 1].time) << label;
    const Place& p = net.places()[cert.walk[k].place];
    if (p.kind != PlaceKind::Client) continue;
    ++seen[p.vertex];
    charged += static_cast<double>(g.upper_bound(cert.walk[k].time));
  }
  for (int v : nice.inner.clients()) EXPECT_EQ(seen[v], 1) << label << " client " << v;
  EXPECT_NEAR(cert.objective, charged, 1e-6) << label;
  EXPECT_LE(cert.objective, 532.0 * static_cast<double>(opt) + 1e-6) << label;

  for (int i = 1; i <= g.q(); ++i) {
    EXPECT_LT(cert.segment_cost[i], 19 * cert.groups.ellmax_next(i)) << label << " interval " << i;
    EXPECT_LE(g.t(i), 76 * cert.groups.ellmax_next(i)) << label;
    if (!g.is_tour(i)) continue;
    std::vector<int> piece;
    for (const auto& v : cert.walk)
      if (v.interval == i) piece.push_back(v.place);
    ASSERT_FALSE(piece.empty()) << label;
    EXPECT_EQ(piece.back(), net.root_place(g.roots.at(i))) << label;
  }

  if (nice.n() <= 3) {
    auto worst = testsupport::exhaustive_cut_check(cert.xz, net, 1e-7);
    EXPECT_FALSE(worst.has_value()) << label;
  }
}

}  // namespace

TEST(LatencyOf, HandExampleAndValidation) {
  Instance inst = table({{0, 2, 5}, {1, 0, 4}, {3, 1, 0}});
  LatencyPath p = latency_of({1, 2}, inst);
  EXPECT_EQ(p.latencies, (std::vector<Cost>{2, 6}));
  EXPECT_EQ(p.total, 8);
  EXPECT_EQ(latency_of({2, 1}, inst).total, 5 + 6);
  EXPECT_THROW(latency_of({1}, inst), std::invalid_argument);
  EXPECT_THROW(latency_of({1, 1}, inst), std::invalid_argument);
  EXPECT_THROW(latency_of({0, 1, 2}, inst), std::invalid_argument);
  EXPECT_EQ(exact_opt(inst).total, 8);
  EXPECT_EQ(exact_opt(inst).order, (std::vector<int>{1, 2}));
}

TEST(LatencyOf, PositionWeightedIdentity) {
  std::mt19937 rng(4);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Instance inst = random_metric(6, 20, seed);
    std::vector<int> order = inst.clients();
    std::shuffle(order.begin(), order.end(), rng);
    Cost weighted = 0;
    int at = inst.s;
    for (std::size_t k = 0; k < order.size(); ++k) {
      weighted += static_cast<Cost>(order.size() - k) * inst.cost(at, order[k]);
      at = order[k];
    }
    EXPECT_EQ(latency_of(order, inst).total, weighted);
  }
}

TEST(ExactOpt, AgreesWithPermutationScans) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Instance inst = random_metric(1 + seed % 7, 9, seed, seed % 5 == 0);
    const Cost reference = testsupport::permutation_optimum(inst).total;
    LatencyPath dp = exact_opt(inst);
    LatencyPath bf = brute_force(inst);
    EXPECT_EQ(dp.total, reference) << seed;
    EXPECT_EQ(bf.total, reference) << seed;
    EXPECT_EQ(latency_of(dp.order, inst).total, dp.total) << seed;
    EXPECT_EQ(bf.order, testsupport::permutation_optimum(inst).order) << seed;
  }
}

TEST(ExactOpt, HandlesTargetsAndLimits) {
  Instance inst = table({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
  inst.target = 3;
  LatencyPath p = exact_opt(inst);
  EXPECT_EQ(p.order.size(), 2u);
  EXPECT_EQ(p.total, 3);
  EXPECT_EQ(exact_opt(table({{0}})).total, 0);
  EXPECT_THROW(exact_opt(random_metric(kExactOptMaxClients + 1, 3, 1)), std::length_error);
  EXPECT_THROW(brute_force(random_metric(kBruteForceMaxClients + 1, 3, 1)), std::length_error);
}

TEST(Certificate, SingleClient) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    NiceInstance nice = nice_auto(random_metric(1, 2, seed));
    const LatencyPath opt = exact_opt(nice.inner);
    Certificate cert = certificate_from_opt(nice, opt);
    recheck_certificate(cert, nice, opt.total, "n=1 seed " + std::to_string(seed));
    EXPECT_EQ(cert.triple.q(), 1);
  }
}

TEST(Certificate, ThreeClientsWithExhaustiveCuts) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    NiceInstance nice = nice_auto(random_metric(3, 3, seed, seed % 2 == 0));
    const LatencyPath opt = exact_opt(nice.inner);
    recheck_certificate(certificate_from_opt(nice, opt), nice, opt.total, "n=3 seed " + std::to_string(seed));
  }
}

TEST(Certificate, SevenClientsIncludingTourIntervals) {
  int with_tour = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    NiceInstance nice = nice_auto(random_metric(7, 3, seed));
    const LatencyPath opt = exact_opt(nice.inner);
    Certificate cert = certificate_from_opt(nice, opt);
    recheck_certificate(cert, nice, opt.total, "n=7 seed " + std::to_string(seed));
    with_tour += !cert.triple.a_tour.empty();
    for (int i : cert.triple.a_tour) {
      EXPECT_GE(i, 2);
      EXPECT_LT(i, cert.triple.q());
    }
  }
  EXPECT_GT(with_tour, 0);
}

TEST(Certificate, JsonShape) {
  NiceInstance nice = nice_auto(random_metric(3, 3, 1));
  Certificate cert = certificate_from_opt(nice, exact_opt(nice.inner));
  auto doc = nlohmann::json::parse(certificate_to_json(cert));
  EXPECT_EQ(doc.at("ok").get<bool>(), cert.ok());
  EXPECT_EQ(doc.at("opt_order").get<std::vector<int>>(), cert.opt_order);
  EXPECT_EQ(doc.at("triple").at("thresholds").get<std::vector<Cost>>(), cert.triple.thresholds);
  EXPECT_EQ(doc.at("walk").size(), cert.walk.size());
  EXPECT_EQ(doc.at("walk").front().at(0).get<std::string>(), "s");
  EXPECT_EQ(doc.at("walk").back().at(0).get<std::string>(), "s'");
  EXPECT_NEAR(doc.at("objective").get<double>(), cert.objective, 1e-9);
  EXPECT_TRUE(doc.at("failures").empty());
}
