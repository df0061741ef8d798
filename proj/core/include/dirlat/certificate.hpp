#pragma once

#include <string>
#include <vector>

#include "dirlat/guessing.hpp"
#include "dirlat/instance.hpp"
#include "dirlat/lp.hpp"
#include "dirlat/timegraph.hpp"

namespace dirlat {

// Factors of the certificate bound: piece widths, threshold growth, walk delay, objective.
inline constexpr Cost kSegmentFactor = 19;
inline constexpr Cost kThresholdFactor = 4 * kSegmentFactor;
inline constexpr Cost kDelayFactor = 4 * kThresholdFactor;
inline constexpr double kCertificateFactor = kDelayFactor * 7.0 / 4.0;

struct CertificateVisit {
  int place;
  Cost time;
  int interval;  // 0 for the depot and the target
};

// An LP point built from a known optimum and the guess it is compatible with.
struct Certificate {
  std::vector<int> opt_order;
  Cost opt_reference = 0;
  GroupSequence groups;
  GuessTriple triple;
  std::vector<int> certifier;      // per interval (1-based, [0] unused): certifying vertex or -1
  std::vector<Cost> segment_cost;  // cost of the walk piece of each interval, including its entry step
  std::vector<CertificateVisit> walk;
  TimeNetwork network;
  LpSolution xz;
  double objective = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  std::string dump() const;
};

// Builds buckets, groups, tour intervals, roots and the delayed walk from an optimal order of
// nice.inner, embeds it in the compact network with horizon t_q and checks every claim:
// roots exist, piece costs stay below 19 ell(next group), t_i <= 76 ell(next group), the point is
// feasible for the strengthened LP and its objective is at most 532 opt.
Certificate certificate_from_opt(const NiceInstance& nice, const LatencyPath& opt);

}  // namespace dirlat
