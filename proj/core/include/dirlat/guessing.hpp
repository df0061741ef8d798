#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirlat/instance.hpp"

namespace dirlat {

// Indices of buckets and groups are 1-based throughout, matching interval numbering.
struct GroupSequence {
  int n = 0;
  int k = 0;
  std::vector<Cost> ell;                 // ell[j-1] is the rounded maximum latency of bucket j
  std::vector<std::vector<int>> groups;  // consecutive runs of bucket indices
  std::vector<Cost> ellmax;              // ellmax[i-1]: ell of the last bucket of group i
  std::vector<int> sizes;                // sizes[i-1]: clients in the buckets of group i

  int q() const { return static_cast<int>(groups.size()); }
  // Rounded maximum latency of group i+1, with group q+1 read as group q.
  Cost ellmax_next(int i) const;
  int size(int i) const { return sizes[i - 1]; }
};

// Groups buckets: j and j+1 share a group iff ell_j = ell_{j+1} = ell_{j+2}.
// Throws std::invalid_argument unless n = 2^k - 1 and ell is non-decreasing powers of two.
GroupSequence make_group_sequence(int n, std::vector<Cost> ell);

int ceil_log2(Cost value);

// Every non-decreasing sequence of k powers of two bounded by 2^ceil(log2 T), lexicographic.
void for_each_valid_group(int n, Cost horizon, const std::function<void(const GroupSequence&)>& visit);
std::vector<GroupSequence> enumerate_valid_groups(int n, Cost horizon);

// Returns t_0 = 0 < t_1 < ... < t_q. Throws std::logic_error if 4/3 growth fails.
std::vector<Cost> thresholds_from_groups(const GroupSequence& gs);

bool is_t_short(const CostMatrix& cost, int u, int v, Cost t);

// Lowest-index host qualifying as root of group i, or nullopt.
std::optional<int> compute_root(const GroupSequence& gs, int i, const Instance& instance);

struct GuessTriple {
  std::vector<Cost> thresholds;  // t_0..t_q
  std::vector<int> a_tour;       // sorted subset of 1..q
  std::map<int, int> roots;      // interval index -> host client
  std::vector<Cost> ell;         // generating sequence (informational)

  int q() const { return static_cast<int>(thresholds.size()) - 1; }
  Cost t(int i) const { return thresholds[i]; }
  Cost t_last() const { return thresholds.back(); }
  bool is_tour(int i) const;
  // Interval index i with t in [t_{i-1}, t_i), or 0 when t >= t_q.
  int interval_of(Cost time) const;
  // Charged time of an interval: t_i for time in I_i.
  Cost upper_bound(Cost time) const { return thresholds[interval_of(time)]; }
  std::vector<int> root_hosts() const;
  std::string encoding() const;
};

void for_each_triple(const NiceInstance& nice, Cost horizon,
                     const std::function<void(const GuessTriple&)>& visit);
std::vector<GuessTriple> setup_triples(const NiceInstance& nice, Cost horizon);

}  // namespace dirlat
