#include "dirlat/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dirlat/atsp_path.hpp"
#include "dirlat/certificate.hpp"
#include "dirlat/generator.hpp"
#include "dirlat/lp.hpp"
#include "dirlat/oracle.hpp"
#include "dirlat/pipeline.hpp"
#include "dirlat/rounding.hpp"
#include "json.hpp"

namespace dirlat {

namespace {

int pick(const VerifyOptions& o, int fallback) { return o.seeds > 0 ? o.seeds : fallback; }

NiceInstance nice_of(const Instance& inst) {
  Reduction r = reduce_to_nice(inst, Rational(1), {Scaling::Auto});
  return std::get<NiceInstance>(r);
}

std::string seed_name(const char* what, int n, std::uint64_t seed) {
  return std::string(what) + " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
}

void oracle_suite(SuiteResult& out, const VerifyOptions& o) {
  const int seeds = pick(o, 30);
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = o.first_seed + i;
    const int n = 4 + i % 3;
    Instance inst = generate_instance({n, 9, seed, false});
    const Cost dp = exact_opt(inst).total;
    const LatencyPath bf = brute_force(inst);
    // Position weights: the edge into position i is paid by the n+1-i clients from there on.
    Cost weighted = 0;
    int at = inst.s;
    for (int i2 = 0; i2 < n; ++i2) {
      weighted += static_cast<Cost>(n - i2) * inst.cost(at, bf.order[i2]);
      at = bf.order[i2];
    }
    out.checks.push_back({seed_name("dp-vs-permutations", n, seed), dp == bf.total && weighted == bf.total,
                          "dp " + std::to_string(dp) + ", permutations " + std::to_string(bf.total) +
                              ", position-weighted " + std::to_string(weighted)});
  }
}

void lp_bounds_suite(SuiteResult& out, const VerifyOptions& o) {
  const int seeds = pick(o, 10);
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = o.first_seed + i;
    const int n = i % 2 == 0 ? 1 : 3;
    NiceInstance nice = nice_of(generate_instance({n, 3, seed, false}));
    const Cost opt = exact_opt(nice.inner).total;
    TimeNetwork net = build_network(nice, {}, compute_horizon(nice, nullptr, true).horizon);
    LpModel model = build_base_lp(net, nice);
    LpSolution sol = solve(model, net);
    const bool ok = sol.status == LpStatus::Optimal && sol.objective <= static_cast<double>(opt) + 1e-5;
    out.checks.push_back({seed_name("plain-lp-below-opt", n, seed), ok,
                          std::string(to_string(sol.status)) + " lp " + std::to_string(sol.objective) + ", opt " +
                              std::to_string(opt)});
  }
}

void certificate_suite(SuiteResult& out, const VerifyOptions& o) {
  const int seeds = pick(o, 10);
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = o.first_seed + i;
    const int n = i % 2 == 0 ? 3 : 7;
    NiceInstance nice = nice_of(generate_instance({n, 3, seed, false}));
    const LatencyPath opt = exact_opt(nice.inner);
    Certificate cert = certificate_from_opt(nice, opt);
    std::string detail = "objective " + std::to_string(cert.objective) + ", opt " + std::to_string(opt.total);
    for (const std::string& f : cert.failures) detail += "; " + f;
    out.checks.push_back({seed_name("certificate", n, seed), cert.ok(), detail});
  }
}

void splitting_suite(SuiteResult& out, const VerifyOptions& o) {
  const int seeds = pick(o, 30);
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = o.first_seed + i;
    std::mt19937_64 rng(seed);
    const int size = 5 + static_cast<int>(rng() % 5);
    Instance metric = generate_instance({size - 1, 6, seed, false});
    MetricFlow flow(metric.cost, 0, size - 1);
    const int paths = 2 + static_cast<int>(rng() % 4);
    for (int p = 0; p < paths; ++p) {
      const double w = 0.1 + static_cast<double>(rng() % 90) / 100.0;
      int at = 0;
      for (int v = 1; v + 1 < size; ++v)
        if (rng() % 2) {
          flow.f[at][v] += w;
          at = v;
        }
      flow.f[at][size - 1] += w;
    }
    std::vector<int> keep{0, size - 1};
    for (int v = 1; v + 1 < size; ++v)
      if (rng() % 2) keep.push_back(v);
    std::vector<double> coverage(size, 0.0);
    for (int v : keep)
      if (v != 0 && v != size - 1) coverage[v] = terminal_connectivity(flow, v);

    MetricFlow split = split_off(flow, keep, coverage);
    bool ok = std::abs(split.value() - flow.value()) <= 1e-7 && split.total_cost() <= flow.total_cost() + 1e-7;
    std::vector<int> inner;
    for (int v : keep)
      if (v != 0 && v != size - 1) inner.push_back(v);
    for (unsigned mask = 1; mask < (1u << inner.size()) && ok; ++mask) {
      std::vector<char> inside(size, 0);
      double need = 1e300;
      for (std::size_t b = 0; b < inner.size(); ++b)
        if (mask >> b & 1u) {
          inside[inner[b]] = 1;
          need = std::min(need, coverage[inner[b]]);
        }
      if (split.crossing(inside) < 2 * need - 1e-6) ok = false;
    }
    out.checks.push_back({"split-off seed=" + std::to_string(seed), ok,
                          "value " + std::to_string(flow.value()) + " -> " + std::to_string(split.value()) + ", cost " +
                              std::to_string(flow.total_cost()) + " -> " + std::to_string(split.total_cost())});
  }
}

void rounding_suite(SuiteResult& out, const VerifyOptions& o) {
  const int seeds = pick(o, 3);
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = o.first_seed + i;
    Instance inst = generate_instance({3, 2, seed, false});
    RunReport report = solve_pipeline(inst);
    bool ok = report.best && !report.best_from_fallback && report.anomalies.empty();
    int rounded = 0;
    for (const TripleRecord& r : report.records)
      if (r.status == TripleStatus::Rounded) {
        ++rounded;
        ok = ok && r.within_guarantee;
      }
    std::ostringstream detail;
    detail << rounded << " triples rounded, best " << (report.best ? report.best->total : -1) << ", opt "
           << report.oracle_opt.value_or(-1);
    out.checks.push_back({seed_name("pipeline", 3, seed), ok, detail.str()});
  }
}

void constants_suite(SuiteResult& out) {
  const double g = guarantee_constant(17 + 1e-5, 0.063, 0.196, 0.946);
  out.checks.push_back({"rounding-constant", g >= 109278 && g <= 109298, "value " + std::to_string(g)});
  out.checks.push_back({"threshold-factor", kThresholdFactor == 4 * 19 && kThresholdFactor == 76,
                        std::to_string(kThresholdFactor)});
  out.checks.push_back({"delay-factor", kDelayFactor == 4 * 76 && kDelayFactor == 304, std::to_string(kDelayFactor)});
  out.checks.push_back({"certificate-factor", kCertificateFactor == 304.0 * 7 / 4 && kCertificateFactor == 532.0,
                        std::to_string(kCertificateFactor)});
}

}  // namespace

bool SuiteResult::passed() const {
  for (const SuiteCheck& c : checks)
    if (!c.passed) return false;
  return true;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"oracle", "lp-bounds", "certificate", "splitting", "rounding",
                                              "constants"};
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result;
  result.suite = name;
  if (name == "oracle") oracle_suite(result, options);
  else if (name == "lp-bounds") lp_bounds_suite(result, options);
  else if (name == "certificate") certificate_suite(result, options);
  else if (name == "splitting") splitting_suite(result, options);
  else if (name == "rounding") rounding_suite(result, options);
  else if (name == "constants") constants_suite(result);
  else throw std::invalid_argument("unknown suite '" + name + "'");
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string suite_to_json(const std::vector<SuiteResult>& results) {
  using nlohmann::json;
  json suites = json::array();
  bool all = true;
  for (const SuiteResult& r : results) {
    json checks = json::array();
    for (const SuiteCheck& c : r.checks)
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    suites.push_back({{"suite", r.suite}, {"passed", r.passed()}, {"seconds", r.seconds}, {"checks", checks}});
    all = all && r.passed();
  }
  return json{{"passed", all}, {"suites", suites}}.dump(2) + "\n";
}

}  // namespace dirlat
