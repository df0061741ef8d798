#include "dirlat/certificate.hpp"

#include <algorithm>
#include <sstream>

namespace dirlat {

namespace {

Cost next_power_of_two(Cost v) {
  Cost p = 1;
  while (p < v) p *= 2;
  return p;
}

}  // namespace

std::string Certificate::dump() const {
  std::ostringstream out;
  out << "opt " << opt_reference << " order";
  for (int v : opt_order) out << ' ' << v;
  out << "\nell";
  for (Cost l : groups.ell) out << ' ' << l;
  out << "\ntriple " << triple.encoding() << "\nsegments";
  for (std::size_t i = 1; i < segment_cost.size(); ++i) out << ' ' << segment_cost[i];
  out << "\nwalk";
  for (const auto& v : walk) out << " (" << network.label(v.place) << ',' << v.time << ")";
  out << "\nobjective " << objective << '\n';
  for (const auto& f : failures) out << "FAIL " << f << '\n';
  return out.str();
}

Certificate certificate_from_opt(const NiceInstance& nice, const LatencyPath& opt) {
  const Instance& in = nice.inner;
  const int n = in.client_count();
  Certificate cert;
  cert.opt_order = opt.order;
  cert.opt_reference = opt.total;
  if (static_cast<int>(opt.order.size()) != n) throw std::invalid_argument("certificate_from_opt: order misses clients");

  // Buckets of halving size along the optimum, and their rounded maximum latencies.
  const int k = nice.k;
  std::vector<int> bucket_of(in.m(), 0);
  std::vector<Cost> ell;
  int pos = 0;
  for (int j = 1; j <= k; ++j) {
    const int size = (n + 1) >> j;
    for (int r = 0; r < size; ++r) bucket_of[opt.order[pos + r]] = j;
    pos += size;
    ell.push_back(next_power_of_two(std::max<Cost>(1, opt.latencies[pos - 1])));
  }
  cert.groups = make_group_sequence(n, ell);
  const GroupSequence& gs = cert.groups;
  const int q = gs.q();
  std::vector<int> group_of_bucket(k + 1, 0);
  for (int i = 1; i <= q; ++i)
    for (int j : gs.groups[i - 1]) group_of_bucket[j] = i;
  std::vector<int> group_of(in.m(), 0);
  for (int v : opt.order) group_of[v] = group_of_bucket[bucket_of[v]];
  std::vector<int> rank(in.m(), -1);
  for (int r = 0; r < n; ++r) rank[opt.order[r]] = r;

  // Tour intervals: some v in group i+1 has a backward edge no longer than the forward one
  // to a vertex of groups 1..i-1. The last certifying vertex along the optimum is kept.
  cert.triple.thresholds = thresholds_from_groups(gs);
  cert.triple.ell = gs.ell;
  cert.certifier.assign(q + 1, -1);
  for (int i = 2; i <= q - 1; ++i) {
    for (int v : opt.order) {
      if (group_of[v] != i + 1) continue;
      for (int u : opt.order)
        if (group_of[u] <= i - 1 && in.cost(v, u) <= in.cost(u, v)) {
          cert.certifier[i] = v;  // later vertices overwrite: largest latency wins
          break;
        }
    }
    if (cert.certifier[i] < 0) continue;
    auto root = compute_root(gs, i, in);
    if (!root) {
      cert.failures.push_back("no root for tour interval " + std::to_string(i));
      continue;
    }
    cert.triple.a_tour.push_back(i);
    cert.triple.roots[i] = *root;
  }
  const GuessTriple& triple = cert.triple;
  for (int i = 1; i <= q; ++i)
    if (triple.t(i) > kThresholdFactor * gs.ellmax_next(i))
      cert.failures.push_back("t_" + std::to_string(i) + " = " + std::to_string(triple.t(i)) + " exceeds " + std::to_string(kThresholdFactor) + " * " +
                              std::to_string(gs.ellmax_next(i)));

  cert.network = build_network(nice, triple.root_hosts(), triple.t_last(), {NetworkMode::Compact});
  const TimeNetwork& net = cert.network;

  // The delayed walk, as places per interval.
  std::vector<std::vector<int>> pieces(q + 1);
  std::vector<char> walked(in.m(), 0);
  for (int i = 1; i <= q; ++i) {
    auto& piece = pieces[i];
    if (!triple.is_tour(i)) {
      for (int v : opt.order)
        if (group_of[v] == i && !walked[v]) piece.push_back(net.client_place(v));
    } else {
      const int root = net.root_place(triple.roots.at(i));
      const int w = cert.certifier[i];
      piece.push_back(root);
      int first = -1;
      for (int v : opt.order)
        if (!walked[v]) {
          first = v;
          break;
        }
      for (int r = first < 0 ? n : rank[first]; r <= rank[w]; ++r) piece.push_back(net.client_place(opt.order[r]));
      piece.push_back(root);
    }
    for (int p : piece)
      if (net.places()[p].kind == PlaceKind::Client) walked[net.places()[p].vertex] = 1;
  }

  // Earliest embedding; each piece starts no earlier than its interval.
  cert.segment_cost.assign(q + 1, 0);
  cert.walk.push_back({net.depot_place(), 0, 0});
  for (int i = 1; i <= q; ++i) {
    bool hold = false;  // the walk already sits at this interval's root and waits for it to open
    for (std::size_t k2 = 0; k2 < pieces[i].size(); ++k2) {
      const int p = pieces[i][k2];
      const CertificateVisit prev = cert.walk.back();
      if (prev.place == p) {
        hold = hold || k2 == 0;
        continue;
      }
      Cost time = prev.time + net.travel_time(prev.place, p);
      if (k2 == 0) time = std::max(time, triple.t(i - 1));
      if (hold) time = std::max(prev.time, triple.t(i - 1)) + net.travel_time(prev.place, p);
      hold = false;
      cert.segment_cost[i] += net.cost(prev.place, p);
      cert.walk.push_back({p, time, i});
    }
    if (cert.segment_cost[i] >= kSegmentFactor * gs.ellmax_next(i))
      cert.failures.push_back("piece " + std::to_string(i) + " costs " + std::to_string(cert.segment_cost[i]) +
                              ", not below " + std::to_string(kSegmentFactor) + " * " + std::to_string(gs.ellmax_next(i)));
    if (cert.walk.back().interval == i && cert.walk.back().time >= triple.t(i))
      cert.failures.push_back("piece " + std::to_string(i) + " ends at " + std::to_string(cert.walk.back().time) +
                              ", past t_" + std::to_string(i));
  }
  cert.walk.push_back({net.target_place(), net.horizon() + 1, 0});

  // Arc incidence: wait at the previous place, then travel.
  std::vector<double> z(net.arcs().size(), 0.0);
  bool embedded = true;
  auto find_arc = [&](int tail, int head_node) {
    for (int a : net.out_arcs(tail))
      if (net.arcs()[a].head == head_node) return a;
    return -1;
  };
  for (std::size_t k2 = 1; k2 < cert.walk.size() && embedded; ++k2) {
    const auto& a = cert.walk[k2 - 1];
    const auto& b = cert.walk[k2];
    const Cost depart = b.time - net.travel_time(a.place, b.place);
    if (depart < a.time) {
      embedded = false;
      break;
    }
    for (Cost t = a.time; t < depart; ++t) {
      const int arc = find_arc(net.node_at(a.place, t), net.node_at(a.place, t + 1));
      if (arc < 0) {
        embedded = false;
        break;
      }
      z[arc] += 1.0;
    }
    const int from = net.node_at(a.place, depart);
    const int to = net.node_at(b.place, b.time);
    const int arc = from < 0 || to < 0 ? -1 : find_arc(from, to);
    if (arc < 0) {
      embedded = false;
      break;
    }
    z[arc] += 1.0;
  }
  if (!embedded) {
    cert.failures.push_back("walk does not embed in the network");
    return cert;
  }
  cert.xz = solution_from_z(net, std::move(z));

  LpModel model = build_base_lp(net, nice);
  strengthen_lp(model, triple, nice);
  cert.objective = evaluate_objective(model, cert.xz);
  cert.xz.objective = cert.objective;
  for (auto& issue : feasibility_report(model, cert.xz)) cert.failures.push_back(std::move(issue));
  if (cert.objective > kCertificateFactor * static_cast<double>(opt.total) + 1e-6)
    cert.failures.push_back("objective " + std::to_string(cert.objective) + " above 532 * " + std::to_string(opt.total));
  return cert;
}

}  // namespace dirlat
