#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dirlat/cost_matrix.hpp"

namespace dirlat {

using Rational = boost::rational<std::int64_t>;

// Parses "p/q" or "p". Throws std::invalid_argument on malformed text.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& r);
double to_double(const Rational& r);

struct Instance {
  CostMatrix cost;
  int s = 0;
  std::optional<int> target;
  Rational epsilon{1};

  int m() const { return cost.size(); }
  bool is_client(int v) const { return v != s && (!target || v != *target); }
  std::vector<int> clients() const;
  int client_count() const;
};

struct LatencyPath {
  std::vector<int> order;
  std::vector<Cost> latencies;  // parallel to order
  Cost total = 0;
};

// Prefix-sum evaluation of an order starting at `start`. No coverage checks.
LatencyPath evaluate_order(const CostMatrix& cost, int start, const std::vector<int>& order);

enum class ViolationKind { Diagonal, Negative, Triangle, BadDepot, BadTarget };

struct MetricViolation {
  ViolationKind kind;
  int u = -1;
  int v = -1;
  int w = -1;
  std::string describe() const;
};

// Returns at most `limit` violations; an empty list means a valid instance.
std::vector<MetricViolation> validate_metric(const Instance& instance, std::size_t limit = 1000);

enum class Scaling {
  Full,   // multiply by n^5/(gamma*eps), round up, cap
  Auto,   // keep costs untouched when already positive integers within the cap
};

struct ReductionOptions {
  Scaling scaling = Scaling::Full;
};

struct NiceInstance {
  Instance inner;   // target present, pads appended after the original vertices
  Instance original;
  int k = 0;        // client count of inner is 2^k - 1
  int pad_count = 0;
  Cost gamma = 0;
  Rational scale_back{1};
  Scaling scaling_used = Scaling::Full;

  int n() const { return (1 << k) - 1; }
  int target() const { return *inner.target; }
  int depot() const { return inner.s; }
  bool is_pad(int v) const { return v >= original.m() && v != target(); }
  // Largest upper bound on inner costs between V and s: floor(2 n^5 / eps^2).
  Cost cost_cap() const;
  // Integer used for c(s', v): ceil(2 n^5 / eps).
  Cost target_out_cost() const;
};

struct ZeroOptCertificate {
  std::vector<int> order;
};

using Reduction = std::variant<NiceInstance, ZeroOptCertificate>;

// Throws std::invalid_argument for invalid metrics, a present target or eps outside (0,1].
Reduction reduce_to_nice(const Instance& instance, Rational epsilon, ReductionOptions options = {});

// Smallest edge length whose subgraph admits a walk from s through every client.
Cost covering_threshold(const Instance& instance);

// Checks the structural invariants of a reduced instance; empty means fine.
std::vector<std::string> nice_violations(const NiceInstance& nice);

// Drops pads and the target, re-evaluates in the original table.
// Throws std::invalid_argument when an original client is missing or repeated.
LatencyPath map_solution_back(const NiceInstance& nice, const LatencyPath& path);

Instance regret_transform(const Instance& instance);

}  // namespace dirlat
