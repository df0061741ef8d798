#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dirlat/generator.hpp"
#include "dirlat/json_io.hpp"
#include "dirlat/oracle.hpp"
#include "dirlat/pipeline.hpp"
#include "dirlat/verify.hpp"
#include "json.hpp"

using namespace dirlat;

namespace {

Instance load(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return instance_from_json(buf.str());
  }
  return read_instance_file(path);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

std::string path_json(const LatencyPath& p) {
  return nlohmann::json{{"order", p.order}, {"latencies", p.latencies}, {"total", p.total}}.dump() + "\n";
}

int print_report_table(const std::string& path) {
  const auto doc = nlohmann::json::parse(read_text_file(path));
  std::cout << std::left << std::setw(28) << "triple" << std::setw(18) << "status" << std::right << std::setw(12)
            << "lp" << std::setw(10) << "latency" << std::setw(9) << "ratio" << std::setw(7) << "cuts"
            << std::setw(9) << "sec" << "\n";
  for (const auto& r : doc.at("records")) {
    std::cout << std::left << std::setw(28) << r.at("encoding").get<std::string>() << std::setw(18)
              << r.at("status").get<std::string>() << std::right << std::fixed << std::setprecision(3)
              << std::setw(12) << r.at("lp_objective").get<double>();
    if (r.contains("latency"))
      std::cout << std::setw(10) << r.at("latency").get<long long>() << std::setw(9)
                << r.at("ratio_vs_lp").get<double>();
    else
      std::cout << std::setw(10) << "-" << std::setw(9) << "-";
    std::cout << std::setw(7) << r.at("cuts_added").get<int>() << std::setw(9)
              << r.at("lp_seconds").get<double>() + r.at("rounding_seconds").get<double>() << "\n";
  }
  const auto& t = doc.at("triples");
  std::cout << "\ntriples: " << t.at("processed") << " processed of " << t.at("distinct") << " distinct ("
            << t.at("enumerated") << " enumerated)";
  if (t.at("capped").get<bool>()) std::cout << ", capped";
  if (t.at("budget_exhausted").get<bool>()) std::cout << ", time budget hit";
  std::cout << "\n";
  if (!doc.at("best").is_null())
    std::cout << "best latency: " << doc.at("best").at("latency") << " via " << doc.at("best").at("triple") << "\n";
  if (!doc.at("oracle").at("opt").is_null())
    std::cout << "oracle optimum: " << doc.at("oracle").at("opt") << ", ratio " << doc.at("oracle").at("ratio")
              << "\n";
  for (const auto& a : doc.at("anomalies")) std::cout << "anomaly: " << a.get<std::string>() << "\n";
  return doc.at("anomalies").empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed latency approximation via guessed time-indexed LPs"};
  app.require_subcommand(1);

  GeneratorOptions gen_opts;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a random metric instance as JSON");
  gen->add_option("-n,--clients", gen_opts.clients, "Number of clients")->required()->check(CLI::PositiveNumber);
  gen->add_option("--cmax", gen_opts.cmax, "Largest arc cost before closure")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_opts.seed, "Random seed");
  gen->add_flag("--symmetric", gen_opts.symmetric, "Use c(u,v) = c(v,u)");
  gen->add_option("-o,--out", gen_out, "Output file (stdout by default)");

  std::string instance_path = "-", epsilon_text = "1", mode_text = "compact", atspp_text = "exact",
              method_text = "paths", scaling_text = "auto", report_path, dump_dir;
  PipelineOptions pipe;
  std::size_t max_triples = 0;
  double time_budget = 0;
  auto* solve_cmd = app.add_subcommand("solve", "Run the full pipeline over all guess triples");
  solve_cmd->add_option("instance", instance_path, "Instance JSON ('-' for stdin)");
  solve_cmd->add_option("--epsilon", epsilon_text, "Reduction accuracy p/q in (0,1]");
  solve_cmd->add_option("--mode", mode_text, "Time network: full or compact")->check(CLI::IsMember({"full", "compact"}));
  solve_cmd->add_option("--atspp", atspp_text, "Path solver: exact or heuristic")
      ->check(CLI::IsMember({"exact", "heuristic"}));
  solve_cmd->add_option("--lp-method", method_text, "LP strategy: paths or arcs")
      ->check(CLI::IsMember({"paths", "arcs"}));
  solve_cmd->add_option("--scaling", scaling_text, "Cost scaling: auto or full")
      ->check(CLI::IsMember({"auto", "full"}));
  solve_cmd->add_option("--max-triples", max_triples, "Process at most this many distinct triples");
  solve_cmd->add_option("--time-budget-sec", time_budget, "Stop starting new triples after this many seconds");
  solve_cmd->add_option("--threads", pipe.threads, "Worker threads")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", pipe.seed, "Seed echoed into the report");
  solve_cmd->add_option("--report", report_path, "Write the JSON run report here");
  solve_cmd->add_option("--dump-lp", dump_dir, "Directory for per-triple arc lists and LP solutions");
  solve_cmd->add_option("--delta", pipe.rounding.delta, "Rounding parameter delta");
  solve_cmd->add_option("--rho1", pipe.rounding.rho1, "Rounding parameter rho1");
  solve_cmd->add_option("--rho2", pipe.rounding.rho2, "Rounding parameter rho2");

  std::string oracle_path = "-", oracle_method = "dp";
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimum of an instance");
  oracle_cmd->add_option("instance", oracle_path, "Instance JSON ('-' for stdin)");
  oracle_cmd->add_option("--method", oracle_method, "dp or permutations")
      ->check(CLI::IsMember({"dp", "permutations"}));

  std::vector<std::string> suites;
  VerifyOptions verify_opts;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  verify_cmd->add_option("suites", suites, "Suite names or 'all'")->required();
  verify_cmd->add_option("--seeds", verify_opts.seeds, "Seeds per suite (0 for the suite default)");
  verify_cmd->add_option("--first-seed", verify_opts.first_seed, "First seed");
  verify_cmd->add_option("-o,--out", verify_out, "Write the JSON summary here (stdout by default)");

  std::string report_in;
  auto* report_cmd = app.add_subcommand("report", "Print a run report as a table");
  report_cmd->add_option("report", report_in, "Report JSON written by solve")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      emit(instance_to_json(generate_instance(gen_opts)), gen_out);
      return 0;
    }
    if (*solve_cmd) {
      Instance inst = load(instance_path);
      pipe.epsilon = parse_rational(epsilon_text);
      pipe.mode = parse_network_mode(mode_text);
      pipe.rounding.solver = parse_path_solver_mode(atspp_text);
      pipe.lp_method = parse_lp_method(method_text);
      pipe.scaling = scaling_text == "full" ? Scaling::Full : Scaling::Auto;
      if (solve_cmd->count("--max-triples")) pipe.max_triples = max_triples;
      if (solve_cmd->count("--time-budget-sec")) pipe.time_budget_sec = time_budget;
      pipe.dump_dir = dump_dir;
      RunReport report = solve_pipeline(inst, pipe);
      const std::string json = report_to_json(report);
      if (!report_path.empty()) write_text_file(report_path, json);
      std::cout << path_json(*report.best);
      for (const std::string& a : report.anomalies) std::cerr << "anomaly: " << a << "\n";
      return report.anomalies.empty() ? 0 : 1;
    }
    if (*oracle_cmd) {
      Instance inst = load(oracle_path);
      std::cout << path_json(oracle_method == "dp" ? exact_opt(inst) : brute_force(inst));
      return 0;
    }
    if (*verify_cmd) {
      if (suites.size() == 1 && suites[0] == "all") suites = suite_names();
      std::vector<SuiteResult> results;
      bool ok = true;
      for (const std::string& name : suites) {
        results.push_back(run_suite(name, verify_opts));
        ok = ok && results.back().passed();
        std::cerr << name << ": " << (results.back().passed() ? "pass" : "FAIL") << "\n";
      }
      emit(suite_to_json(results), verify_out);
      return ok ? 0 : 1;
    }
    if (*report_cmd) return print_report_table(report_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
