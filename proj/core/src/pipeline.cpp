#include "dirlat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>
#include <unordered_map>

#include "dirlat/json_io.hpp"
#include "dirlat/oracle.hpp"
#include "json.hpp"

namespace dirlat {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string file_safe(std::string text) {
  for (char& c : text)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return text;
}

void fill_buckets(TripleRecord& rec, const BucketPlan& plan) {
  rec.buckets["v_tour"] = plan.v_tour;
  for (const auto& [i, members] : plan.tour_buckets) rec.buckets["tour:" + std::to_string(i)] = members;
  for (const auto& [i, members] : plan.nontour_buckets) rec.buckets["nontour:" + std::to_string(i)] = members;
}

void run_triple(TripleRecord& rec, const NiceInstance& nice, const PipelineOptions& options) {
  const GuessTriple& triple = rec.triple;
  rec.horizon = compute_horizon(nice, &triple.thresholds, true).horizon;
  NetworkOptions net_options;
  net_options.mode = options.mode;
  net_options.arc_cap = options.arc_cap;

  std::optional<TimeNetwork> network;
  try {
    network = build_network(nice, triple.root_hosts(), rec.horizon, net_options);
  } catch (const NetworkTooLarge& e) {
    rec.status = TripleStatus::NetworkTooLarge;
    rec.diagnostics.push_back(e.what());
    return;
  }
  rec.arcs = network->arcs().size();

  auto lp_start = Clock::now();
  LpModel model = build_base_lp(*network, nice);
  strengthen_lp(model, triple, nice);
  SolveOptions solve_options;
  solve_options.method = options.lp_method;
  LpSolution solution = solve(model, *network, solve_options);
  rec.lp_seconds = since(lp_start);
  rec.lp_objective = solution.objective;
  rec.cuts_added = solution.cuts_added;
  rec.rounds = solution.rounds;
  rec.simplex_iterations = solution.simplex_iterations;

  if (!options.dump_dir.empty()) {
    const std::string stem = options.dump_dir + "/" + file_safe(rec.encoding);
    write_text_file(stem + ".arcs.txt", network->dump());
    write_text_file(stem + ".solution.json", solution_to_json(solution, *network));
    write_text_file(stem + ".triple.json", triple_to_json(triple));
  }

  if (solution.status == LpStatus::Infeasible) {
    rec.status = TripleStatus::Infeasible;
    return;
  }
  if (solution.status == LpStatus::IterationLimit) {
    rec.status = TripleStatus::IterationLimit;
    return;
  }

  auto round_start = Clock::now();
  try {
    RoundingResult rounded = round_solution(solution, triple, *network, nice, options.rounding);
    rec.rounding_seconds = since(round_start);
    fill_buckets(rec, rounded.plan);
    rec.heuristic = rounded.heuristic;
    rec.diagnostics.insert(rec.diagnostics.end(), rounded.diagnostics.begin(), rounded.diagnostics.end());
    rec.latency = rounded.joined.path.total;
    rec.original_path = map_solution_back(nice, rounded.joined.path);
    rec.original_latency = rec.original_path.total;
    rec.ratio_vs_lp = rec.lp_objective > 0 ? static_cast<double>(rec.latency) / rec.lp_objective : 0.0;
    rec.guarantee = effective_guarantee(options.rounding);
    rec.within_guarantee = static_cast<double>(rec.latency) <= rec.guarantee * rec.lp_objective * (1 + 1e-9) + 1e-6;
    rec.status = TripleStatus::Rounded;
  } catch (const std::exception& e) {
    rec.rounding_seconds = since(round_start);
    rec.status = TripleStatus::RoundingFailed;
    rec.diagnostics.push_back(e.what());
  }
}

// Nearest-neighbour order on the original instance; used only when no triple produced a path.
LatencyPath greedy_path(const Instance& instance) {
  std::vector<int> left = instance.clients(), order;
  int at = instance.s;
  while (!left.empty()) {
    auto best = std::min_element(left.begin(), left.end(), [&](int a, int b) {
      return instance.cost(at, a) < instance.cost(at, b);
    });
    at = *best;
    order.push_back(at);
    left.erase(best);
  }
  return evaluate_order(instance.cost, instance.s, order);
}

}  // namespace

const char* to_string(TripleStatus status) {
  switch (status) {
    case TripleStatus::Rounded: return "rounded";
    case TripleStatus::Infeasible: return "infeasible";
    case TripleStatus::IterationLimit: return "iteration-limit";
    case TripleStatus::NetworkTooLarge: return "network-too-large";
    case TripleStatus::RoundingFailed: return "rounding-failed";
    case TripleStatus::Skipped: break;
  }
  return "skipped";
}

RunReport solve_pipeline(const Instance& instance, const PipelineOptions& options) {
  const auto start = Clock::now();
  options.rounding.validate();
  RunReport report;
  report.options = options;
  report.original_vertices = instance.m();
  report.original_clients = instance.client_count();

  ReductionOptions reduction_options;
  reduction_options.scaling = options.scaling;
  Reduction reduction = reduce_to_nice(instance, options.epsilon, reduction_options);

  if (const auto* zero = std::get_if<ZeroOptCertificate>(&reduction)) {
    report.zero_optimum = true;
    report.best = evaluate_order(instance.cost, instance.s, zero->order);
  } else {
    const NiceInstance& nice = std::get<NiceInstance>(reduction);
    report.k = nice.k;
    report.gamma = nice.gamma;
    report.scaling_used = nice.scaling_used;
    report.enumeration_horizon = compute_horizon(nice, nullptr, true).horizon;

    // Distinct encodings give distinct LPs; repeats differ only in the generating sequence.
    std::unordered_map<std::string, std::size_t> seen;
    for_each_triple(nice, report.enumeration_horizon, [&](const GuessTriple& triple) {
      ++report.triples_enumerated;
      std::string code = triple.encoding();
      auto [it, fresh] = seen.emplace(code, report.records.size());
      if (!fresh) {
        ++report.records[it->second].duplicates;
        return;
      }
      TripleRecord rec;
      rec.triple = triple;
      rec.encoding = std::move(code);
      report.records.push_back(std::move(rec));
    });
    report.triples_distinct = report.records.size();
    std::size_t limit = report.records.size();
    if (options.max_triples && *options.max_triples < limit) {
      limit = *options.max_triples;
      report.capped = true;
    }

    if (!options.dump_dir.empty()) std::filesystem::create_directories(options.dump_dir);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> out_of_time{false};
    auto worker = [&] {
      for (;;) {
        if (options.time_budget_sec && since(start) > *options.time_budget_sec) {
          out_of_time = true;
          return;
        }
        const std::size_t i = next.fetch_add(1);
        if (i >= limit) return;
        run_triple(report.records[i], nice, options);
      }
    };
    const int threads = std::max(1, options.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    report.budget_exhausted = out_of_time;

    const TripleRecord* best = nullptr;
    for (const TripleRecord& rec : report.records) {
      if (rec.status != TripleStatus::Skipped) ++report.triples_processed;
      if (rec.status == TripleStatus::Rounded || rec.status == TripleStatus::RoundingFailed) {
        if (!report.min_lp_objective || rec.lp_objective < *report.min_lp_objective)
          report.min_lp_objective = rec.lp_objective;
      }
      if (rec.status != TripleStatus::Rounded) continue;
      if (!rec.within_guarantee)
        report.anomalies.push_back("triple " + rec.encoding + " rounded above the guarantee");
      if (!best || rec.original_latency < best->original_latency ||
          (rec.original_latency == best->original_latency && rec.encoding < best->encoding))
        best = &rec;
    }
    if (best) {
      report.best = best->original_path;
      report.best_encoding = best->encoding;
    } else {
      report.anomalies.push_back(report.capped || report.budget_exhausted
                                     ? "no processed triple produced a path; nearest-neighbour fallback used"
                                     : "no triple produced a path although enumeration was complete");
      report.best = greedy_path(instance);
      report.best_from_fallback = true;
    }
  }

  if (options.compare_oracle && report.original_clients <= kOracleCompareMaxClients) {
    report.oracle_opt = exact_opt(instance).total;
    const Cost opt = *report.oracle_opt;
    if (opt > 0) report.ratio_vs_oracle = static_cast<double>(report.best->total) / static_cast<double>(opt);
    else if (report.best->total == 0) report.ratio_vs_oracle = 1.0;
    if (report.best->total < opt) report.anomalies.push_back("best path beats the exact optimum");
  }
  report.seconds = since(start);
  return report;
}

std::string report_to_json(const RunReport& report) {
  using nlohmann::json;
  const PipelineOptions& o = report.options;
  json config = {{"epsilon", format_rational(o.epsilon)},
                 {"scaling", o.scaling == Scaling::Full ? "full" : "auto"},
                 {"mode", to_string(o.mode)},
                 {"lp_method", to_string(o.lp_method)},
                 {"atspp", to_string(o.rounding.solver)},
                 {"delta", o.rounding.delta},
                 {"rho1", o.rounding.rho1},
                 {"rho2", o.rounding.rho2},
                 {"max_triples", o.max_triples ? json(*o.max_triples) : json(nullptr)},
                 {"time_budget_sec", o.time_budget_sec ? json(*o.time_budget_sec) : json(nullptr)},
                 {"threads", o.threads},
                 {"seed", o.seed}};

  json records = json::array();
  for (const TripleRecord& r : report.records) {
    if (r.status == TripleStatus::Skipped) continue;
    json roots = json::object();
    for (auto [i, host] : r.triple.roots) roots[std::to_string(i)] = host;
    json rec = {{"encoding", r.encoding},
                {"thresholds", r.triple.thresholds},
                {"a_tour", r.triple.a_tour},
                {"roots", roots},
                {"duplicates", r.duplicates},
                {"status", to_string(r.status)},
                {"horizon", r.horizon},
                {"arcs", r.arcs},
                {"lp_objective", r.lp_objective},
                {"cuts_added", r.cuts_added},
                {"rounds", r.rounds},
                {"simplex_iterations", r.simplex_iterations},
                {"lp_seconds", r.lp_seconds},
                {"rounding_seconds", r.rounding_seconds},
                {"solver_mode", r.heuristic ? "heuristic" : "exact"},
                {"diagnostics", r.diagnostics}};
    if (r.status == TripleStatus::Rounded) {
      rec["latency"] = r.latency;
      rec["original_latency"] = r.original_latency;
      rec["ratio_vs_lp"] = r.ratio_vs_lp;
      rec["guarantee"] = r.guarantee;
      rec["within_guarantee"] = r.within_guarantee;
      rec["buckets"] = r.buckets;
    }
    records.push_back(rec);
  }

  json best = nullptr;
  if (report.best)
    best = {{"order", report.best->order},
            {"latencies", report.best->latencies},
            {"latency", report.best->total},
            {"triple", report.best_encoding},
            {"fallback", report.best_from_fallback}};

  json doc = {{"config", config},
              {"instance", {{"m", report.original_vertices}, {"clients", report.original_clients}}},
              {"zero_optimum", report.zero_optimum},
              {"k", report.k},
              {"gamma", report.gamma},
              {"scaling_used", report.scaling_used == Scaling::Full ? "full" : "auto"},
              {"enumeration_horizon", report.enumeration_horizon},
              {"triples", {{"enumerated", report.triples_enumerated},
                           {"distinct", report.triples_distinct},
                           {"processed", report.triples_processed},
                           {"capped", report.capped},
                           {"budget_exhausted", report.budget_exhausted}}},
              {"records", records},
              {"best", best},
              {"min_lp_objective", report.min_lp_objective ? json(*report.min_lp_objective) : json(nullptr)},
              {"oracle", {{"opt", report.oracle_opt ? json(*report.oracle_opt) : json(nullptr)},
                          {"ratio", report.ratio_vs_oracle ? json(*report.ratio_vs_oracle) : json(nullptr)}}},
              {"anomalies", report.anomalies},
              {"seconds", report.seconds}};
  return doc.dump(2) + "\n";
}

}  // namespace dirlat
