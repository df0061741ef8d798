#include "dirlat/timegraph.hpp"

#include <algorithm>
#include <sstream>

namespace dirlat {

const char* to_string(NetworkMode mode) { return mode == NetworkMode::Full ? "full" : "compact"; }

NetworkMode parse_network_mode(const std::string& text) {
  if (text == "full") return NetworkMode::Full;
  if (text == "compact") return NetworkMode::Compact;
  throw std::invalid_argument("unknown network mode '" + text + "'");
}

NetworkTooLarge::NetworkTooLarge(std::size_t count)
    : std::runtime_error("time network would have " + std::to_string(count) +
                         " arcs, above the configured cap"),
      arcs(count) {}

Cost greedy_latency(const Instance& instance) {
  std::vector<int> left = instance.clients();
  int at = instance.s;
  Cost clock = 0, total = 0;
  while (!left.empty()) {
    auto best = left.begin();
    for (auto it = left.begin(); it != left.end(); ++it)
      if (instance.cost(at, *it) < instance.cost(at, *best)) best = it;
    clock += instance.cost(at, *best);
    total += clock;
    at = *best;
    left.erase(best);
  }
  return total;
}

HorizonInfo compute_horizon(const NiceInstance& nice, const std::vector<Cost>* thresholds, bool tighten) {
  const Instance& in = nice.inner;
  Cost cmax = 0;
  for (int u = 0; u < in.m(); ++u)
    for (int v = 0; v < in.m(); ++v)
      if (u != nice.target()) cmax = std::max(cmax, in.cost(u, v));
  const Cost n = nice.n();
  HorizonInfo info;
  info.horizon = n * n * cmax;
  if (thresholds && !thresholds->empty()) {
    const Cost tq = thresholds->back();
    info.horizon += tq;
    if (tighten && tq < info.horizon) {
      info.horizon = tq;
      info.tightened = true;
    }
  } else if (tighten) {
    const Cost greedy = greedy_latency(in);
    if (greedy < info.horizon) {
      info.horizon = std::max<Cost>(1, greedy);
      info.tightened = true;
    }
  }
  info.horizon = std::max<Cost>(1, info.horizon);
  return info;
}

int TimeNetwork::client_place(int vertex) const {
  return vertex >= 0 && vertex < static_cast<int>(client_place_of_vertex_.size())
             ? client_place_of_vertex_[vertex]
             : -1;
}

int TimeNetwork::root_place(int host) const {
  return host >= 0 && host < static_cast<int>(root_place_of_host_.size()) ? root_place_of_host_[host] : -1;
}

std::vector<int> TimeNetwork::client_places() const {
  std::vector<int> out;
  for (int p = 0; p < static_cast<int>(places_.size()); ++p)
    if (places_[p].kind == PlaceKind::Client) out.push_back(p);
  return out;
}

std::vector<int> TimeNetwork::root_places() const {
  std::vector<int> out;
  for (int p = 0; p < static_cast<int>(places_.size()); ++p)
    if (places_[p].kind == PlaceKind::Root) out.push_back(p);
  return out;
}

int TimeNetwork::node_at(int place, Cost time) const {
  if (place < 0 || place >= static_cast<int>(places_.size()) || time < 0 || time > horizon_ + 1) return -1;
  return node_index_[place][time];
}

std::vector<int> TimeNetwork::entering(const std::vector<char>& inside, Cost time) const {
  std::vector<int> out;
  for (int p = 0; p < static_cast<int>(places_.size()); ++p) {
    if (!inside[p]) continue;
    int node = node_at(p, time);
    if (node < 0) continue;
    for (int a : in_[node]) {
      const TimeArc& arc = arcs_[a];
      if (arc.kind == ArcKind::Travel && !inside[nodes_[arc.tail].place]) out.push_back(a);
    }
  }
  return out;
}

std::vector<int> TimeNetwork::leaving(const std::vector<char>& inside, Cost time) const {
  std::vector<int> out;
  for (int p = 0; p < static_cast<int>(places_.size()); ++p) {
    if (!inside[p]) continue;
    int node = node_at(p, time);
    if (node < 0) continue;
    for (int a : out_[node]) {
      const TimeArc& arc = arcs_[a];
      if (arc.kind == ArcKind::Travel && !inside[nodes_[arc.head].place]) out.push_back(a);
    }
  }
  return out;
}

Cost TimeNetwork::cost(int from_place, int to_place) const { return metric_(from_place, to_place); }

Cost TimeNetwork::travel_time(int from_place, int to_place) const {
  return std::max<Cost>(1, metric_(from_place, to_place));
}

std::string TimeNetwork::label(int place) const {
  const Place& p = places_[place];
  switch (p.kind) {
    case PlaceKind::Depot: return "s";
    case PlaceKind::Target: return "s'";
    case PlaceKind::Root: return "r" + std::to_string(p.vertex);
    case PlaceKind::Client: break;
  }
  return std::to_string(p.vertex);
}

std::string TimeNetwork::dump() const {
  std::ostringstream out;
  for (const TimeArc& a : arcs_) {
    const TimeNode& u = nodes_[a.tail];
    const TimeNode& v = nodes_[a.head];
    out << "(" << label(u.place) << "," << u.time << ")->(" << label(v.place) << "," << v.time << ") "
        << a.cost << "\n";
  }
  return out.str();
}

TimeNetwork build_network(const NiceInstance& nice, const std::vector<int>& root_hosts, Cost horizon,
                          const NetworkOptions& options) {
  if (horizon < 1) throw std::invalid_argument("build_network: horizon must be at least 1");
  const Instance& in = nice.inner;
  TimeNetwork net;
  net.mode_ = options.mode;
  net.horizon_ = horizon;
  net.client_place_of_vertex_.assign(in.m(), -1);
  net.root_place_of_host_.assign(in.m(), -1);

  net.places_.push_back({PlaceKind::Depot, in.s});
  for (int v : in.clients()) {
    net.client_place_of_vertex_[v] = static_cast<int>(net.places_.size());
    net.places_.push_back({PlaceKind::Client, v});
  }
  for (int host : root_hosts) {
    if (host < 0 || host >= in.m() || !in.is_client(host))
      throw std::invalid_argument("build_network: root host " + std::to_string(host) + " is not a client");
    if (net.root_place_of_host_[host] >= 0) continue;
    net.root_place_of_host_[host] = static_cast<int>(net.places_.size());
    net.places_.push_back({PlaceKind::Root, host});
  }
  net.places_.push_back({PlaceKind::Target, nice.target()});

  const int P = static_cast<int>(net.places_.size());
  net.metric_ = CostMatrix(P);
  for (int a = 0; a < P; ++a)
    for (int b = 0; b < P; ++b)
      net.metric_(a, b) = a == b ? 0 : in.cost(net.places_[a].vertex, net.places_[b].vertex);

  const bool compact = options.mode == NetworkMode::Compact;
  const int depot = 0, target = P - 1;
  const Cost T = horizon;

  // Node layout.
  net.node_index_.assign(P, std::vector<int>(static_cast<std::size_t>(T) + 2, -1));
  auto add_node = [&](int place, Cost time) {
    net.node_index_[place][time] = static_cast<int>(net.nodes_.size());
    net.nodes_.push_back({place, time});
  };
  add_node(depot, 0);
  if (compact)
    for (Cost t = 1; t <= T; ++t) add_node(depot, t);
  for (int p = 1; p < target; ++p)
    for (Cost t = 1; t <= T; ++t) add_node(p, t);
  add_node(target, T + 1);
  net.source_ = net.node_index_[depot][0];
  net.sink_ = net.node_index_[target][T + 1];

  auto tail_times = [&](int p) -> std::pair<Cost, Cost> {
    if (p == depot) return {0, compact ? T : 0};
    return {1, T};
  };

  // Count first so the cap is enforced before allocating.
  std::size_t count = 0;
  for (int u = 0; u < target; ++u) {
    auto [lo, hi] = tail_times(u);
    for (int v = 1; v <= target; ++v) {
      if (v == u) continue;
      const Cost tau = net.travel_time(u, v);
      if (v == target) {
        if (compact) count += (T + 1 - tau >= lo && T + 1 - tau <= hi) ? 1 : 0;
        else count += static_cast<std::size_t>(std::max<Cost>(0, std::min(hi, T + 1 - tau) - lo + 1));
        continue;
      }
      for (Cost t = lo; t <= hi; ++t) {
        const Cost room = T - t - tau + 1;
        if (room <= 0) break;
        count += compact ? 1 : static_cast<std::size_t>(room);
      }
    }
    if (compact) count += static_cast<std::size_t>(hi - lo);
  }
  if (count > options.arc_cap) throw NetworkTooLarge(count);
  net.arcs_.reserve(count);

  for (int u = 0; u < target; ++u) {
    auto [lo, hi] = tail_times(u);
    for (Cost t = lo; t <= hi; ++t) {
      const int tail = net.node_index_[u][t];
      for (int v = 1; v <= target; ++v) {
        if (v == u) continue;
        const Cost tau = net.travel_time(u, v);
        const Cost c = net.metric_(u, v);
        if (v == target) {
          if (compact ? t + tau == T + 1 : t + tau <= T + 1)
            net.arcs_.push_back({tail, net.sink_, ArcKind::Travel, c});
          continue;
        }
        if (compact) {
          if (t + tau <= T) net.arcs_.push_back({tail, net.node_index_[v][t + tau], ArcKind::Travel, c});
        } else {
          for (Cost t2 = t + tau; t2 <= T; ++t2)
            net.arcs_.push_back({tail, net.node_index_[v][t2], ArcKind::Travel, c});
        }
      }
      if (compact && t < hi) net.arcs_.push_back({tail, net.node_index_[u][t + 1], ArcKind::Wait, 0});
    }
  }

  net.out_.assign(net.nodes_.size(), {});
  net.in_.assign(net.nodes_.size(), {});
  for (int a = 0; a < static_cast<int>(net.arcs_.size()); ++a) {
    const TimeArc& arc = net.arcs_[a];
    if (net.nodes_[arc.head].time <= net.nodes_[arc.tail].time)
      throw std::logic_error("build_network: arc does not advance time");
    net.out_[arc.tail].push_back(a);
    net.in_[arc.head].push_back(a);
  }
  return net;
}

}  // namespace dirlat
