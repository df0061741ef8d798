#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirlat/guessing.hpp"
#include "dirlat/instance.hpp"
#include "dirlat/lp.hpp"
#include "dirlat/rounding.hpp"
#include "dirlat/timegraph.hpp"

namespace dirlat {

inline constexpr int kOracleCompareMaxClients = 12;

struct PipelineOptions {
  Rational epsilon{1};
  Scaling scaling = Scaling::Auto;
  NetworkMode mode = NetworkMode::Compact;
  LpMethod lp_method = LpMethod::Paths;
  RoundingParams rounding;  // rounding.solver is the --atspp choice
  std::optional<std::size_t> max_triples;
  std::optional<double> time_budget_sec;
  int threads = 1;
  std::uint64_t seed = 0;  // echoed only; the pipeline itself draws no random numbers
  std::size_t arc_cap = 30'000'000;
  bool compare_oracle = true;
  std::string dump_dir;  // when set, each triple writes network and solution dumps there
};

enum class TripleStatus { Rounded, Infeasible, IterationLimit, NetworkTooLarge, RoundingFailed, Skipped };
const char* to_string(TripleStatus status);

struct TripleRecord {
  GuessTriple triple;
  std::string encoding;
  int duplicates = 1;  // enumerated triples sharing this encoding
  TripleStatus status = TripleStatus::Skipped;
  Cost horizon = 0;
  std::size_t arcs = 0;
  double lp_objective = 0.0;
  int cuts_added = 0;
  int rounds = 0;
  long simplex_iterations = 0;
  Cost latency = 0;           // on the reduced instance
  Cost original_latency = 0;  // after mapping back
  LatencyPath original_path;
  double ratio_vs_lp = 0.0;
  double guarantee = 0.0;
  bool within_guarantee = false;
  bool heuristic = false;
  std::map<std::string, std::vector<int>> buckets;  // "v_tour", "tour:i", "nontour:i"
  double lp_seconds = 0.0;
  double rounding_seconds = 0.0;
  std::vector<std::string> diagnostics;
};

struct RunReport {
  PipelineOptions options;
  int original_vertices = 0;
  int original_clients = 0;
  bool zero_optimum = false;
  int k = 0;
  Cost gamma = 0;
  Scaling scaling_used = Scaling::Auto;
  Cost enumeration_horizon = 0;
  std::size_t triples_enumerated = 0;
  std::size_t triples_distinct = 0;
  std::size_t triples_processed = 0;
  bool capped = false;
  bool budget_exhausted = false;
  std::vector<TripleRecord> records;
  std::optional<LatencyPath> best;  // on the original instance
  std::string best_encoding;
  bool best_from_fallback = false;
  std::optional<double> min_lp_objective;
  std::optional<Cost> oracle_opt;
  std::optional<double> ratio_vs_oracle;
  std::vector<std::string> anomalies;
  double seconds = 0.0;
};

// Reduces, enumerates distinct guess triples, solves and rounds each one, and keeps the
// shortest mapped-back path (ties by triple encoding). Throws std::invalid_argument for an
// invalid instance or epsilon.
RunReport solve_pipeline(const Instance& instance, const PipelineOptions& options = {});

std::string report_to_json(const RunReport& report);

}  // namespace dirlat
