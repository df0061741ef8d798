#include "dirlat/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dirlat {

void RoundingParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("rounding: delta must lie in (0,1)");
  if (!(rho1 > 0.0 && rho1 < 1.0)) throw std::invalid_argument("rounding: rho1 must lie in (0,1)");
  if (!(rho2 > 0.0 && rho2 < 1.0)) throw std::invalid_argument("rounding: rho2 must lie in (0,1)");
  if (!(nontour_floor() > 0.5))
    throw std::invalid_argument("rounding: rho2 (1 - delta) - 3 delta > 1/2 does not hold");
}

double guarantee_constant(double alpha_atsp, double alpha_atspp, double delta, double rho1, double rho2) {
  RoundingParams p{delta, rho1, rho2};
  p.validate();
  if (alpha_atsp < 1.0 || alpha_atspp < 1.0) throw std::invalid_argument("guarantee_constant: ratios must be >= 1");
  const double psi = 1.0 + 32.0 * alpha_atsp;
  const double path_den = 2.0 * rho2 * (1.0 - delta) - 6.0 * delta - 1.0;
  const double tour_term = 3.0 + alpha_atspp / (rho1 * delta);
  const double path_term = 2.0 + psi / path_den;
  const double charge = std::max(1.0 / (delta * (1.0 - rho1)), 1.0 / ((1.0 - delta) * (1.0 - rho2)));
  return 4.0 * std::max(tour_term, path_term) * charge;
}

double guarantee_constant(double alpha, double delta, double rho1, double rho2) {
  return guarantee_constant(alpha, alpha, delta, rho1, rho2);
}

double effective_guarantee(const RoundingParams& p) { return guarantee_constant(1.0, 1.0, p.delta, p.rho1, p.rho2); }

namespace {

struct Masses {
  const LpSolution& sol;
  const GuessTriple& triple;
  double interval(int v, int j) const { return sol.x_sum(v, triple.t(j - 1), triple.t(j)); }
  double before(int v, Cost t) const { return sol.x_sum(v, 0, t); }
  double tour(int v) const {
    double total = 0.0;
    for (int j : triple.a_tour) total += interval(v, j);
    return total;
  }
  double charge(int v) const {
    double total = 0.0;
    for (int j = 1; j <= triple.q(); ++j) total += static_cast<double>(triple.t(j)) * interval(v, j);
    return total;
  }
};

Cost walk_cost(const std::vector<int>& walk, const CostMatrix& metric) {
  Cost total = 0;
  for (std::size_t k = 1; k < walk.size(); ++k) total += metric(walk[k - 1], walk[k]);
  return total;
}

std::string split_summary(const MetricFlow& flow, const std::vector<int>& keep, const std::vector<double>& coverage) {
  try {
    SplitOffStats stats;
    MetricFlow reduced = split_off(flow, keep, coverage, &stats);
    std::ostringstream out;
    out << "split " << stats.vertices_removed << " vertices, cost " << flow.total_cost() << " -> "
        << reduced.total_cost();
    if (stats.fallback_vertices > 0) out << ", " << stats.fallback_vertices << " by proportional pairing";
    return out.str();
  } catch (const SplitOffRefused& e) {
    return std::string("not split: ") + e.what();
  }
}

}  // namespace

BucketPlan classify(const LpSolution& sol, const GuessTriple& triple, const Instance& metric,
                    const RoundingParams& params) {
  params.validate();
  BucketPlan plan;
  plan.params = params;
  const Masses m{sol, triple};
  const int q = triple.q();
  const double d = params.delta;

  std::vector<int> clients = sol.client_vertices;
  std::sort(clients.begin(), clients.end());
  std::vector<int> rest;
  for (int v : clients) (m.tour(v) >= d - kMassEps ? plan.v_tour : rest).push_back(v);

  for (int i : triple.a_tour) plan.tour_buckets[i];
  for (int v : plan.v_tour) {
    double cumulative = 0.0;
    int chosen = -1;
    for (int i : triple.a_tour) {
      cumulative += m.interval(v, i);
      if (cumulative >= params.rho1 * d - kMassEps) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) {
      chosen = triple.a_tour.back();
      plan.notes.push_back("vertex " + std::to_string(v) + " placed in the last tour bucket by tolerance");
    }
    plan.tour_buckets[chosen].push_back(v);
  }

  std::vector<int> nontour;
  for (int i = 1; i <= q; ++i)
    if (!triple.is_tour(i)) nontour.push_back(i);
  for (int i : nontour) plan.preliminary[i];
  for (int v : rest) {
    if (nontour.empty()) throw std::logic_error("classify: client outside V_tour with every interval a tour");
    double cumulative = 0.0;
    int chosen = -1;
    for (int i : nontour) {
      cumulative += m.interval(v, i);
      if (cumulative >= params.rho2 * (1.0 - d) - kMassEps) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) {
      chosen = nontour.back();
      plan.notes.push_back("vertex " + std::to_string(v) + " placed in the last non-tour bucket by tolerance");
    }
    plan.preliminary[chosen].push_back(v);
  }

  const double floor = params.nontour_floor();
  for (int i : nontour) {
    auto& w = plan.augment[i];
    if (i == q) continue;
    const bool next_tour = triple.is_tour(i + 1);
    const bool prev_tour = i > 1 && triple.is_tour(i - 1);
    if (next_tour) {
      plan.augment_case[i] = prev_tour ? 'a' : 'b';
      for (int v : rest) {
        if (m.before(v, triple.t(i)) < floor - kMassEps) continue;
        if (prev_tour && m.interval(v, i) <= kMassEps) continue;
        w.push_back(v);
      }
    } else {
      plan.augment_case[i] = 'c';
      const Cost horizon = triple.t(i + 1);
      for (int v : rest)
        for (int u : plan.preliminary[i])
          if (u != v && !is_t_short(metric.cost, u, v, horizon)) {
            w.push_back(v);
            break;
          }
    }
  }

  std::set<int> taken;
  for (int i : nontour) {
    std::set<int> bucket(plan.preliminary[i].begin(), plan.preliminary[i].end());
    bucket.insert(plan.augment[i].begin(), plan.augment[i].end());
    auto& out = plan.nontour_buckets[i];
    for (int v : bucket)
      if (!taken.count(v)) out.push_back(v);
    taken.insert(out.begin(), out.end());
  }
  return plan;
}

CostMatrix place_metric(const TimeNetwork& net) {
  const int P = static_cast<int>(net.places().size());
  CostMatrix metric(P);
  for (int u = 0; u < P; ++u)
    for (int v = 0; v < P; ++v) metric(u, v) = net.cost(u, v);
  return metric;
}

std::map<int, TourResult> round_tour_intervals(const BucketPlan& plan, const LpSolution& sol,
                                               const GuessTriple& triple, const TimeNetwork& net) {
  const RoundingParams& p = plan.params;
  const Masses m{sol, triple};
  const CostMatrix metric = place_metric(net);
  const double boost = 1.0 / (p.rho1 * p.delta) - 1.0;
  const int depot = net.depot_place();
  std::map<int, TourResult> out;

  for (int i : triple.a_tour) {
    TourResult res;
    res.interval = i;
    res.root_place = net.root_place(triple.roots.at(i));
    const int root = res.root_place;
    const std::vector<int>& bucket = plan.tour_buckets.at(i);
    const double ti = static_cast<double>(triple.t(i));

    MetricFlow flow = time_aggregate(sol.z, net, 0, triple.t(i));
    flow.sink = root;
    for (int j : triple.a_tour) {
      if (j > i) break;
      MetricFlow part = time_aggregate(sol.z, net, triple.t(j - 1), triple.t(j));
      // The first interval starts at the depot; route its mass back to close the circulation.
      if (triple.t(j - 1) == 0) part.f[net.root_place(triple.roots.at(j))][depot] += part.value();
      for (int u = 0; u < flow.size(); ++u)
        for (int v = 0; v < flow.size(); ++v) flow.f[u][v] += boost * part.f[u][v];
    }
    res.flow_cost = flow.total_cost();

    std::vector<int> keep{depot, root};
    std::vector<double> coverage(flow.size(), 0.0);
    for (int v : bucket) {
      keep.push_back(net.client_place(v));
      coverage[net.client_place(v)] = 1.0;
    }
    res.split_note = split_summary(flow, keep, coverage);

    if (bucket.empty()) {
      res.walk = {root};
    } else {
      PathRequest req;
      req.vertices = keep;
      req.start = depot;
      req.end = root;
      req.mode = p.solver;
      PathSolution path = solve_path(req, metric);
      res.heuristic = path.heuristic;
      res.walk.assign(path.sequence.begin(), path.sequence.end());
      res.walk.front() = root;  // leave the root instead of the depot
    }
    res.cost = walk_cost(res.walk, metric);
    res.cost_bound = (1.0 + 1.0 / (p.rho1 * p.delta)) * ti;
    res.within_bound = static_cast<double>(res.cost) <= res.cost_bound + 1e-9;
    for (int v : bucket)
      if (m.charge(v) < (1.0 - p.rho1) * p.delta * ti - 1e-6 * ti) res.members_charged = false;
    out.emplace(i, std::move(res));
  }
  return out;
}

std::map<int, PathResult> round_nontour_intervals(const BucketPlan& plan, const LpSolution& sol,
                                                  const GuessTriple& triple, const TimeNetwork& net) {
  const RoundingParams& p = plan.params;
  const Masses m{sol, triple};
  const CostMatrix metric = place_metric(net);
  const int depot = net.depot_place();
  std::map<int, PathResult> out;

  for (const auto& [i, bucket] : plan.nontour_buckets) {
    if (bucket.empty()) continue;
    PathResult res;
    res.interval = i;
    const double ti = static_cast<double>(triple.t(i));

    MetricFlow flow = time_aggregate(sol.z, net, 0, triple.t(i), WindowBoundary::RedirectToSink);
    res.flow_cost = flow.total_cost();
    std::vector<int> keep{depot, flow.sink};
    std::vector<double> coverage(flow.size(), 0.0);
    for (int v : bucket) {
      keep.push_back(net.client_place(v));
      coverage[net.client_place(v)] = p.nontour_floor();
    }
    res.split_note = split_summary(flow, keep, coverage);

    PathRequest req;
    req.vertices = keep;
    req.start = depot;
    req.end = flow.sink;
    req.mode = p.solver;
    const bool needs_start = i == 1 || triple.is_tour(i - 1);
    if (needs_start)
      for (int v : bucket)
        if (m.interval(v, i) <= kMassEps) req.forbidden_first.push_back(net.client_place(v));
    PathSolution path = solve_path(req, flow.cost);
    res.heuristic = path.heuristic;
    res.start_relaxed = path.constraint_relaxed;
    res.walk.assign(path.sequence.begin() + 1, path.sequence.end() - 1);

    res.cost = walk_cost(res.walk, metric);
    res.cost_bound = ti / (2.0 * p.rho2 * (1.0 - p.delta) - 6.0 * p.delta - 1.0);
    res.within_bound = static_cast<double>(res.cost) <= res.cost_bound + 1e-9;
    const int first = net.places()[res.walk.front()].vertex;
    const int last = net.places()[res.walk.back()].vertex;
    res.end_visited_early = m.before(last, triple.t(i)) > kMassEps;
    res.start_in_interval = !needs_start || m.interval(first, i) > kMassEps;
    for (int v : bucket)
      if (m.charge(v) < (1.0 - p.rho2) * (1.0 - p.delta) * ti - 1e-6 * ti) res.members_charged = false;
    out.emplace(i, std::move(res));
  }
  return out;
}

Concatenation concatenate(const std::map<int, TourResult>& tours, const std::map<int, PathResult>& paths,
                          const GuessTriple& triple, const TimeNetwork& net, const Instance& metric) {
  Concatenation out;
  out.walk.push_back(net.depot_place());
  std::vector<int> interval_of_client(metric.m(), 0);
  std::vector<int> order;
  double joint = 0.0;
  out.joint_bound.assign(triple.q() + 1, 0.0);
  for (int i = 1; i <= triple.q(); ++i) {
    const std::vector<int>* walk = nullptr;
    Cost cost = 0;
    if (auto t = tours.find(i); t != tours.end()) {
      walk = &t->second.walk;
      cost = t->second.cost;
    } else if (auto pth = paths.find(i); pth != paths.end()) {
      walk = &pth->second.walk;
      cost = pth->second.cost;
    }
    if (walk) {
      joint += 2.0 * static_cast<double>(triple.t(i)) + static_cast<double>(cost);
      for (int place : *walk) {
        if (out.walk.back() != place) out.walk.push_back(place);
        const Place& pl = net.places()[place];
        if (pl.kind != PlaceKind::Client) continue;
        if (interval_of_client[pl.vertex] != 0)
          throw std::logic_error("concatenate: client " + std::to_string(pl.vertex) + " visited twice");
        interval_of_client[pl.vertex] = i;
        order.push_back(pl.vertex);
      }
    }
    out.joint_bound[i] = joint;
  }
  for (int v : metric.clients())
    if (interval_of_client[v] == 0) throw std::logic_error("concatenate: client " + std::to_string(v) + " not covered");
  out.path = evaluate_order(metric.cost, metric.s, order);
  for (std::size_t k = 0; k < order.size(); ++k)
    if (static_cast<double>(out.path.latencies[k]) > out.joint_bound[interval_of_client[order[k]]] + 1e-9)
      out.joints_within_bound = false;
  return out;
}

RoundingResult round_solution(const LpSolution& sol, const GuessTriple& triple, const TimeNetwork& net,
                              const NiceInstance& nice, const RoundingParams& params) {
  RoundingResult res;
  res.plan = classify(sol, triple, nice.inner, params);
  res.tours = round_tour_intervals(res.plan, sol, triple, net);
  res.paths = round_nontour_intervals(res.plan, sol, triple, net);
  res.joined = concatenate(res.tours, res.paths, triple, net, nice.inner);
  for (const auto& note : res.plan.notes) res.diagnostics.push_back(note);
  for (const auto& [i, t] : res.tours) {
    res.heuristic |= t.heuristic;
    if (!t.within_bound) res.diagnostics.push_back("tour " + std::to_string(i) + " above its cost bound");
    if (!t.members_charged) res.diagnostics.push_back("tour " + std::to_string(i) + " has an undercharged member");
  }
  for (const auto& [i, pth] : res.paths) {
    res.heuristic |= pth.heuristic;
    if (!pth.within_bound) res.diagnostics.push_back("path " + std::to_string(i) + " above its cost bound");
    if (!pth.end_visited_early) res.diagnostics.push_back("path " + std::to_string(i) + " ends at an unvisited vertex");
    if (!pth.start_in_interval) res.diagnostics.push_back("path " + std::to_string(i) + " starts outside its interval");
    if (!pth.members_charged) res.diagnostics.push_back("path " + std::to_string(i) + " has an undercharged member");
  }
  if (!res.joined.joints_within_bound) res.diagnostics.push_back("a latency exceeds its joint bound");
  return res;
}

}  // namespace dirlat
