#pragma once

#include <vector>

#include "dirlat/instance.hpp"

namespace dirlat {

inline constexpr int kExactOptMaxClients = 18;
inline constexpr int kBruteForceMaxClients = 10;

// Validates that `order` is a permutation of the clients, then evaluates prefix sums.
LatencyPath latency_of(const std::vector<int>& order, const Instance& instance);

// Subset DP with position-weighted edges; throws std::length_error above the budget.
LatencyPath exact_opt(const Instance& instance);

// Enumerates permutations in lexicographic order, keeping the first minimum.
LatencyPath brute_force(const Instance& instance);

}  // namespace dirlat
