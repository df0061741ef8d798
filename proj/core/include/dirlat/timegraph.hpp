#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirlat/instance.hpp"

namespace dirlat {

enum class NetworkMode { Full, Compact };

const char* to_string(NetworkMode mode);
NetworkMode parse_network_mode(const std::string& text);

enum class PlaceKind { Depot, Client, Root, Target };

// A vertex of the extended metric: roots are copies sharing their host's distances.
struct Place {
  PlaceKind kind;
  int vertex;  // instance vertex; the host for roots
};

enum class ArcKind { Travel, Wait };

struct TimeNode {
  int place;
  Cost time;
};

struct TimeArc {
  int tail;
  int head;
  ArcKind kind;
  Cost cost;  // metric cost of the travel; 0 for waits
};

struct HorizonInfo {
  Cost horizon = 0;
  bool tightened = false;
};

// n^2 * cmax (+ t_q with thresholds). With `tighten`, the plain horizon drops to the
// greedy nearest-neighbour latency and the threshold horizon to t_q.
HorizonInfo compute_horizon(const NiceInstance& nice, const std::vector<Cost>* thresholds = nullptr,
                            bool tighten = false);

// Total latency of the nearest-neighbour order from s (ties by lower index).
Cost greedy_latency(const Instance& instance);

struct NetworkOptions {
  NetworkMode mode = NetworkMode::Compact;
  std::size_t arc_cap = 30'000'000;
};

class NetworkTooLarge : public std::runtime_error {
 public:
  explicit NetworkTooLarge(std::size_t arcs);
  std::size_t arcs;
};

class TimeNetwork {
 public:
  NetworkMode mode() const { return mode_; }
  Cost horizon() const { return horizon_; }

  const std::vector<Place>& places() const { return places_; }
  const std::vector<TimeNode>& nodes() const { return nodes_; }
  const std::vector<TimeArc>& arcs() const { return arcs_; }

  int depot_place() const { return 0; }
  int target_place() const { return static_cast<int>(places_.size()) - 1; }
  // Place of a client vertex or of the root copy of a host; -1 if absent.
  int client_place(int vertex) const;
  int root_place(int host) const;
  std::vector<int> client_places() const;
  std::vector<int> root_places() const;

  int source() const { return source_; }
  int sink() const { return sink_; }
  // -1 when the node does not exist.
  int node_at(int place, Cost time) const;

  const std::vector<int>& out_arcs(int node) const { return out_[node]; }
  const std::vector<int>& in_arcs(int node) const { return in_[node]; }

  // Travel arcs entering the place set `inside` (a mask over places) from outside at exactly `time`.
  std::vector<int> entering(const std::vector<char>& inside, Cost time) const;
  std::vector<int> leaving(const std::vector<char>& inside, Cost time) const;

  // Cost and travel time between places.
  Cost cost(int from_place, int to_place) const;
  Cost travel_time(int from_place, int to_place) const;

  std::string label(int place) const;
  std::string dump() const;

 private:
  friend TimeNetwork build_network(const NiceInstance&, const std::vector<int>&, Cost,
                                   const NetworkOptions&);
  NetworkMode mode_ = NetworkMode::Compact;
  Cost horizon_ = 0;
  CostMatrix metric_;  // over places
  std::vector<Place> places_;
  std::vector<TimeNode> nodes_;
  std::vector<TimeArc> arcs_;
  std::vector<std::vector<int>> node_index_;  // [place][time] -> node or -1
  std::vector<std::vector<int>> out_, in_;
  std::vector<int> client_place_of_vertex_;
  std::vector<int> root_place_of_host_;
  int source_ = -1;
  int sink_ = -1;
};

// Places: depot, clients in index order, one root copy per distinct host, target.
// Zero-cost steps between a root and its host take one time unit.
TimeNetwork build_network(const NiceInstance& nice, const std::vector<int>& root_hosts, Cost horizon,
                          const NetworkOptions& options = {});

}  // namespace dirlat
