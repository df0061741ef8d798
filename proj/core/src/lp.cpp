#include "dirlat/lp.hpp"

#include "maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace dirlat {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

double LpSolution::x_at(int vertex, Cost t) const {
  if (vertex < 0 || vertex >= static_cast<int>(row_of_vertex.size())) return 0.0;
  const int r = row_of_vertex[vertex];
  if (r < 0 || t < 0 || t >= static_cast<Cost>(x[r].size())) return 0.0;
  return x[r][t];
}

double LpSolution::x_sum(int vertex, Cost from, Cost to) const {
  if (vertex < 0 || vertex >= static_cast<int>(row_of_vertex.size())) return 0.0;
  const int r = row_of_vertex[vertex];
  if (r < 0) return 0.0;
  double total = 0.0;
  const Cost hi = std::min<Cost>(to, static_cast<Cost>(x[r].size()));
  for (Cost t = std::max<Cost>(0, from); t < hi; ++t) total += x[r][t];
  return total;
}

namespace {

bool is_client_node(const TimeNetwork& net, int node) {
  return net.places()[net.nodes()[node].place].kind == PlaceKind::Client;
}

bool is_visit_arc(const TimeNetwork& net, const TimeArc& arc) {
  return arc.kind == ArcKind::Travel && is_client_node(net, arc.head);
}

std::vector<CutConstraint> scan_cuts(const LpSolution& sol, const TimeNetwork& net, const SeparationOptions& opt,
                                     bool stop_at_first) {
  std::vector<CutConstraint> found;
  const auto& places = net.places();
  const int P = static_cast<int>(places.size());
  const int depot = net.depot_place();
  const int target = net.target_place();

  std::vector<int> order;
  for (int a = 0; a < static_cast<int>(net.arcs().size()); ++a) {
    const TimeArc& arc = net.arcs()[a];
    if (arc.kind == ArcKind::Travel && sol.z[a] > 1e-12 && net.nodes()[arc.head].place != target)
      order.push_back(a);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return net.nodes()[net.arcs()[a].head].time < net.nodes()[net.arcs()[b].head].time;
  });

  for (std::size_t c = 0; c < sol.client_vertices.size(); ++c) {
    const int v = sol.client_vertices[c];
    const int vplace = net.client_place(v);
    std::vector<std::vector<double>> mu(P, std::vector<double>(P, 0.0));
    std::size_t next = 0;
    double prefix = 0.0;
    std::optional<CutConstraint> best;
    for (Cost t = 0; t < static_cast<Cost>(sol.x[c].size()); ++t) {
      prefix += sol.x[c][t];
      if (sol.x[c][t] <= 1e-12) continue;
      while (next < order.size() && net.nodes()[net.arcs()[order[next]].head].time <= t) {
        const TimeArc& arc = net.arcs()[order[next]];
        mu[net.nodes()[arc.tail].place][net.nodes()[arc.head].place] += sol.z[order[next]];
        ++next;
      }
      auto cap = mu;
      for (int p = 0; p < P; ++p)
        if (places[p].kind == PlaceKind::Root) cap[depot][p] = std::numeric_limits<double>::infinity();
      std::vector<char> side;
      const double value = detail::max_flow(std::move(cap), depot, vplace, &side);
      if (prefix - value > opt.tolerance) {
        CutConstraint cut;
        for (int p = 0; p < P; ++p)
          if (!side[p] && places[p].kind == PlaceKind::Client) cut.S.push_back(places[p].vertex);
        cut.v = v;
        cut.t = t;
        cut.lhs = value;
        cut.rhs = prefix;
        if (!opt.most_violated) {
          best = cut;
          break;
        }
        if (!best || cut.violation() > best->violation()) best = cut;
      }
    }
    if (best) {
      found.push_back(*best);
      if (stop_at_first) break;
    }
  }
  if (stop_at_first && opt.most_violated && found.size() > 1) {
    auto it = std::max_element(found.begin(), found.end(),
                               [](const auto& a, const auto& b) { return a.violation() < b.violation(); });
    return {*it};
  }
  return found;
}

}  // namespace

LpSolution solution_from_z(const TimeNetwork& net, std::vector<double> z) {
  LpSolution sol;
  sol.z = std::move(z);
  const auto& places = net.places();
  sol.row_of_vertex.assign(1, -1);
  for (int p : net.client_places()) {
    const int v = places[p].vertex;
    if (v >= static_cast<int>(sol.row_of_vertex.size())) sol.row_of_vertex.resize(v + 1, -1);
    sol.row_of_vertex[v] = static_cast<int>(sol.client_vertices.size());
    sol.client_vertices.push_back(v);
  }
  sol.x.assign(sol.client_vertices.size(), std::vector<double>(static_cast<std::size_t>(net.horizon()) + 2, 0.0));
  for (int a = 0; a < static_cast<int>(net.arcs().size()); ++a) {
    const TimeArc& arc = net.arcs()[a];
    if (!is_visit_arc(net, arc) || sol.z[a] == 0.0) continue;
    const TimeNode& head = net.nodes()[arc.head];
    sol.x[sol.row_of_vertex[places[head.place].vertex]][head.time] += sol.z[a];
  }
  return sol;
}

LpModel build_base_lp(const TimeNetwork& net, const NiceInstance& nice) {
  (void)nice;
  LpModel model;
  model.network_ = &net;
  const auto& arcs = net.arcs();
  model.objective_.assign(arcs.size(), 0.0);
  model.fixed_zero_.assign(arcs.size(), 0);
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a)
    if (is_visit_arc(net, arcs[a])) model.objective_[a] = static_cast<double>(net.nodes()[arcs[a].head].time);

  LinearRow source{{}, simplex::Sense::Equal, 1.0, "source", RowKind::Source};
  for (int a : net.out_arcs(net.source())) source.terms.push_back({a, 1.0});
  model.rows_.push_back(std::move(source));

  for (int node = 0; node < static_cast<int>(net.nodes().size()); ++node) {
    if (node == net.source() || node == net.sink()) continue;
    LinearRow row{{}, simplex::Sense::Equal, 0.0, "", RowKind::Flow};
    for (int a : net.in_arcs(node)) row.terms.push_back({a, 1.0});
    for (int a : net.out_arcs(node)) row.terms.push_back({a, -1.0});
    if (row.terms.empty()) continue;
    const TimeNode& n = net.nodes()[node];
    row.name = "flow(" + net.label(n.place) + "," + std::to_string(n.time) + ")";
    model.rows_.push_back(std::move(row));
  }

  for (int p : net.client_places()) {
    LinearRow row{{}, simplex::Sense::Equal, 1.0, "visit(" + net.label(p) + ")", RowKind::Visit};
    for (Cost t = 1; t <= net.horizon(); ++t) {
      const int node = net.node_at(p, t);
      if (node < 0) continue;
      for (int a : net.in_arcs(node))
        if (arcs[a].kind == ArcKind::Travel) row.terms.push_back({a, 1.0});
    }
    model.rows_.push_back(std::move(row));
  }
  return model;
}

bool crosses_tour_boundary_illegally(const TimeNetwork& net, const TimeArc& arc, const GuessTriple& triple) {
  const TimeNode& from = net.nodes()[arc.tail];
  const TimeNode& to = net.nodes()[arc.head];
  for (int i : triple.a_tour) {
    const int root = net.root_place(triple.roots.at(i));
    const Cost enter = triple.t(i - 1), leave = triple.t(i);
    const bool crosses_enter = from.time < enter && enter <= to.time;
    const bool crosses_leave = from.time < leave && leave <= to.time;
    if (arc.kind == ArcKind::Wait) {
      if ((crosses_enter || crosses_leave) && from.place != root) return true;
    } else {
      if (crosses_enter && to.place != root) return true;
      if (crosses_leave && from.place != root) return true;
    }
  }
  return false;
}

LpModel& strengthen_lp(LpModel& model, const GuessTriple& triple, const NiceInstance& nice) {
  const TimeNetwork& net = *model.network_;
  if (triple.thresholds.empty() || triple.thresholds.front() != 0)
    throw std::invalid_argument("strengthen_lp: thresholds must start at 0");
  for (int i = 1; i <= triple.q(); ++i)
    if (triple.t(i) <= triple.t(i - 1)) throw std::invalid_argument("strengthen_lp: thresholds not increasing");
  for (int i : triple.a_tour) {
    if (i < 1 || i > triple.q()) throw std::invalid_argument("strengthen_lp: tour index out of range");
    auto it = triple.roots.find(i);
    if (it == triple.roots.end() || net.root_place(it->second) < 0)
      throw std::invalid_argument("strengthen_lp: root of interval " + std::to_string(i) + " not in network");
  }
  model.triple_ = triple;
  const auto& arcs = net.arcs();
  const Cost tq = triple.t_last();
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
    const TimeArc& arc = arcs[a];
    if (crosses_tour_boundary_illegally(net, arc, triple)) {
      if (!model.fixed_zero_[a]) ++model.forbidden_arcs_;
      model.fixed_zero_[a] = 1;
    }
    if (is_visit_arc(net, arc)) {
      const Cost t = net.nodes()[arc.head].time;
      if (t >= tq) {
        model.fixed_zero_[a] = 1;
        model.objective_[a] = 0.0;
      } else {
        model.objective_[a] = static_cast<double>(triple.upper_bound(t));
      }
    }
  }

  const Instance& in = nice.inner;
  const std::vector<int> clients = in.clients();
  for (int i = 1; i + 1 <= triple.q(); ++i) {
    const Cost ti = triple.t(i), tnext = triple.t(i + 1);
    for (int u : clients)
      for (int v : clients) {
        if (u == v || is_t_short(in.cost, u, v, tnext)) continue;
        LinearRow row{{}, simplex::Sense::LessEqual, 0.0,
                      "short(" + std::to_string(u) + "," + std::to_string(v) + "," + std::to_string(i) + ")",
                      RowKind::Shortness};
        for (int pass = 0; pass < 2; ++pass) {
          const int p = net.client_place(pass == 0 ? u : v);
          for (Cost t = 1; t <= net.horizon(); ++t) {
            const int node = net.node_at(p, t);
            if (node < 0) continue;
            const double before = t <= ti - 1 ? 1.0 : 0.0;
            const int interval = triple.interval_of(t);
            const double tour = interval > 0 && triple.is_tour(interval) ? 1.0 : 0.0;
            const double coef = pass == 0 ? before - tour : -before - tour;
            if (coef == 0.0) continue;
            for (int a : net.in_arcs(node))
              if (arcs[a].kind == ArcKind::Travel) row.terms.push_back({a, coef});
          }
        }
        model.rows_.push_back(std::move(row));
        ++model.shortness_rows_;
      }
  }
  return model;
}

LinearRow cut_row(const CutConstraint& cut, const TimeNetwork& net) {
  std::vector<char> inside(net.places().size(), 0);
  for (int v : cut.S) inside[net.client_place(v)] = 1;
  std::vector<std::pair<int, double>> terms;
  const int vplace = net.client_place(cut.v);
  for (Cost t = 1; t <= cut.t; ++t) {
    for (int a : net.entering(inside, t)) terms.push_back({a, 1.0});
    const int node = net.node_at(vplace, t);
    if (node < 0) continue;
    for (int a : net.in_arcs(node))
      if (net.arcs()[a].kind == ArcKind::Travel) terms.push_back({a, -1.0});
  }
  std::sort(terms.begin(), terms.end());
  LinearRow row{{}, simplex::Sense::GreaterEqual, 0.0, "", RowKind::Cut};
  for (auto [a, c] : terms) {
    if (!row.terms.empty() && row.terms.back().first == a) row.terms.back().second += c;
    else row.terms.push_back({a, c});
  }
  std::erase_if(row.terms, [](const auto& term) { return term.second == 0.0; });
  std::ostringstream name;
  name << "cut(v=" << cut.v << ",t=" << cut.t << ",|S|=" << cut.S.size() << ")";
  row.name = name.str();
  return row;
}

std::optional<CutConstraint> separate(const LpSolution& solution, const TimeNetwork& network,
                                      const SeparationOptions& options) {
  auto cuts = scan_cuts(solution, network, options, !options.most_violated);
  if (cuts.empty()) return std::nullopt;
  if (options.most_violated)
    return *std::max_element(cuts.begin(), cuts.end(),
                             [](const auto& a, const auto& b) { return a.violation() < b.violation(); });
  return cuts.front();
}

std::vector<CutConstraint> separate_per_client(const LpSolution& solution, const TimeNetwork& network,
                                               const SeparationOptions& options) {
  return scan_cuts(solution, network, options, false);
}

double evaluate_objective(const LpModel& model, const LpSolution& solution) {
  double total = 0.0;
  for (std::size_t a = 0; a < solution.z.size(); ++a) total += model.objective()[a] * solution.z[a];
  return total;
}

const char* to_string(LpMethod method) {
  switch (method) {
    case LpMethod::Arcs: return "arcs";
    case LpMethod::Paths: return "paths";
  }
  return "?";
}

LpMethod parse_lp_method(const std::string& text) {
  if (text == "arcs") return LpMethod::Arcs;
  if (text == "paths") return LpMethod::Paths;
  throw std::invalid_argument("unknown LP method '" + text + "'");
}

namespace {

// Arcs lying on some source-sink path that avoids fixed arcs.
std::vector<char> usable_arcs(const LpModel& model, const TimeNetwork& net) {
  const auto& arcs = net.arcs();
  const int N = static_cast<int>(net.nodes().size());
  std::vector<char> fwd(N, 0), bwd(N, 0);
  std::vector<int> stack{net.source()};
  fwd[net.source()] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int a : net.out_arcs(u))
      if (!model.fixed_zero()[a] && !fwd[arcs[a].head]) {
        fwd[arcs[a].head] = 1;
        stack.push_back(arcs[a].head);
      }
  }
  stack = {net.sink()};
  bwd[net.sink()] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int a : net.in_arcs(u))
      if (!model.fixed_zero()[a] && !bwd[arcs[a].tail]) {
        bwd[arcs[a].tail] = 1;
        stack.push_back(arcs[a].tail);
      }
  }
  std::vector<char> usable(arcs.size(), 0);
  for (std::size_t a = 0; a < arcs.size(); ++a)
    usable[a] = !model.fixed_zero()[a] && fwd[arcs[a].tail] && bwd[arcs[a].head];
  return usable;
}

LpSolution infeasible_solution(const TimeNetwork& net) {
  LpSolution result = solution_from_z(net, std::vector<double>(net.arcs().size(), 0.0));
  result.status = LpStatus::Infeasible;
  result.objective = std::numeric_limits<double>::infinity();
  return result;
}

// Whether a row without usable terms holds at zero.
bool empty_row_holds(const LinearRow& row) {
  switch (row.sense) {
    case simplex::Sense::Equal: return std::abs(row.rhs) <= kFeasibilityTol;
    case simplex::Sense::LessEqual: return row.rhs >= -kFeasibilityTol;
    case simplex::Sense::GreaterEqual: return row.rhs <= kFeasibilityTol;
  }
  return false;
}

LpSolution solve_with_arcs(const LpModel& model, const TimeNetwork& net, const std::vector<char>& usable,
                           const SolveOptions& options) {
  const int A = static_cast<int>(net.arcs().size());
  simplex::Solver solver(options.simplex);
  std::vector<int> var_of_arc(A, -1);
  for (int a = 0; a < A; ++a)
    if (usable[a]) var_of_arc[a] = solver.add_variable(model.objective()[a]);

  auto add_row = [&](const LinearRow& row) -> bool {
    std::vector<simplex::Term> terms;
    for (auto [a, c] : row.terms)
      if (var_of_arc[a] >= 0) terms.push_back({var_of_arc[a], c});
    if (terms.empty()) return empty_row_holds(row);
    solver.add_row(terms, row.sense, row.rhs);
    return true;
  };
  for (const LinearRow& row : model.rows())
    if (!add_row(row)) return infeasible_solution(net);

  LpSolution result;
  int cuts_added = 0;
  for (int round = 0;; ++round) {
    const simplex::Status st = solver.solve();
    if (st == simplex::Status::Infeasible || st == simplex::Status::Unbounded) return infeasible_solution(net);
    std::vector<double> values = solver.values();
    std::vector<double> z(A, 0.0);
    for (int a = 0; a < A; ++a)
      if (var_of_arc[a] >= 0) z[a] = values[var_of_arc[a]];
    result = solution_from_z(net, std::move(z));
    result.objective = solver.objective();
    result.cuts_added = cuts_added;
    result.rounds = round + 1;
    result.simplex_iterations = solver.iterations();
    if (st == simplex::Status::IterationLimit) {
      result.status = LpStatus::IterationLimit;
      return result;
    }
    SeparationOptions sep;
    sep.tolerance = options.cut_tolerance;
    sep.most_violated = true;
    std::vector<CutConstraint> cuts = separate_per_client(result, net, sep);
    if (cuts.empty()) {
      result.status = LpStatus::Optimal;
      return result;
    }
    if (round + 1 >= options.max_rounds) {
      result.status = LpStatus::IterationLimit;
      return result;
    }
    for (const CutConstraint& cut : cuts) {
      if (!add_row(cut_row(cut, net))) return infeasible_solution(net);
      ++cuts_added;
    }
  }
}

// Column generation. Every unit source-sink flow in the acyclic time network is a convex
// combination of paths, so the master keeps only the rows that are not flow conservation
// and a path's coefficient in a row is the sum over its arcs.
class PathMaster {
 public:
  PathMaster(const LpModel& model, const TimeNetwork& net, const std::vector<char>& usable,
             const SolveOptions& options)
      : model_(model), net_(net), usable_(usable), options_(options) {
    const auto& nodes = net.nodes();
    for (int node = 0; node < static_cast<int>(nodes.size()); ++node) order_.push_back(node);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return nodes[a].time < nodes[b].time; });
    for (const LinearRow& row : model.rows())
      if (row.kind != RowKind::Flow) rows_.push_back(restrict(row));
  }

  // False when a row has no usable terms and fails at zero.
  bool consistent() const {
    for (const LinearRow& row : rows_)
      if (row.terms.empty() && !empty_row_holds(row)) return false;
    return true;
  }

  void add_row(const LinearRow& row) {
    rows_.push_back(restrict(row));
    const LinearRow& r = rows_.back();
    std::vector<double> coef(net_.arcs().size(), 0.0);
    for (auto [a, c] : r.terms) coef[a] = c;
    const int index = static_cast<int>(rows_.size()) - 1;
    std::vector<simplex::Term> terms;
    for (std::size_t j = 0; j < pool_.size(); ++j) {
      double total = 0.0;
      for (int a : pool_[j].arcs) total += coef[a];
      if (total == 0.0) continue;
      pool_[j].entries.push_back({index, total});
      terms.push_back({static_cast<int>(j), total});
    }
    if (phase2_) phase2_->add_row(terms, r.sense, r.rhs);
  }

  bool last_row_empty_and_broken() const { return rows_.back().terms.empty() && !empty_row_holds(rows_.back()); }

  enum class Outcome { Done, Infeasible, Limit };

  // Phase one minimizes artificial slack; Done means the pool supports a feasible point.
  Outcome phase_one() {
    phase2_.reset();
    simplex::Solver solver(options_.simplex);
    open_rows(solver);
    const int m = static_cast<int>(rows_.size());
    for (int r = 0; r < m; ++r) {
      switch (rows_[r].sense) {
        case simplex::Sense::Equal:
          solver.add_column(1.0, {{r, 1.0}});
          solver.add_column(1.0, {{r, -1.0}});
          break;
        case simplex::Sense::LessEqual: solver.add_column(1.0, {{r, -1.0}}); break;
        case simplex::Sense::GreaterEqual: solver.add_column(1.0, {{r, 1.0}}); break;
      }
    }
    for (const Path& p : pool_) solver.add_column(0.0, to_terms(p.entries));
    const Outcome out = generate(solver, true);
    if (out != Outcome::Done) return out;
    double scale = 1.0;
    for (const LinearRow& row : rows_) scale = std::max(scale, std::abs(row.rhs));
    return solver.objective() > 1e-7 * scale ? Outcome::Infeasible : Outcome::Done;
  }

  // Infeasible here means the current pool does not support a feasible point. The solver
  // survives between calls so that cut rows warm-start with dual simplex.
  Outcome phase_two() {
    if (!phase2_) {
      phase2_ = std::make_unique<simplex::Solver>(options_.simplex);
      open_rows(*phase2_);
      for (const Path& p : pool_) phase2_->add_column(p.cost, to_terms(p.entries));
    }
    simplex::Solver& solver = *phase2_;
    const Outcome out = generate(solver, false);
    if (out == Outcome::Infeasible) phase2_.reset();
    if (out != Outcome::Done) return out;
    std::vector<double> lambda = solver.values();
    z_.assign(net_.arcs().size(), 0.0);
    for (std::size_t j = 0; j < pool_.size(); ++j)
      if (lambda[j] > 0.0)
        for (int a : pool_[j].arcs) z_[a] += lambda[j];
    objective_ = solver.objective();
    return Outcome::Done;
  }

  const std::vector<double>& z() const { return z_; }
  double objective() const { return objective_; }
  long iterations() const { return iterations_; }
  std::size_t columns() const { return pool_.size(); }

 private:
  struct Path {
    std::vector<int> arcs;
    double cost = 0.0;
    std::vector<std::pair<int, double>> entries;
  };

  LinearRow restrict(const LinearRow& row) const {
    LinearRow out = row;
    std::erase_if(out.terms, [&](const auto& t) { return !usable_[t.first]; });
    return out;
  }

  void open_rows(simplex::Solver& solver) const {
    for (const LinearRow& row : rows_) solver.add_row({}, row.sense, row.rhs);
  }

  static std::vector<simplex::Term> to_terms(const std::vector<std::pair<int, double>>& entries) {
    std::vector<simplex::Term> out;
    for (auto [r, v] : entries) out.push_back({r, v});
    return out;
  }

  Outcome generate(simplex::Solver& solver, bool phase1) {
    const long before = solver.iterations();
    auto finish = [&](Outcome out) {
      iterations_ += solver.iterations() - before;
      return out;
    };
    for (long round = 0;; ++round) {
      const simplex::Status st = solver.solve();
      if (st == simplex::Status::IterationLimit) return finish(Outcome::Limit);
      if (st != simplex::Status::Optimal) return finish(Outcome::Infeasible);
      if (round >= options_.max_pricing_rounds) return finish(Outcome::Limit);
      std::optional<Path> path = price(solver.duals(), phase1);
      if (!path) return finish(Outcome::Done);
      solver.add_column(phase1 ? 0.0 : path->cost, to_terms(path->entries));
      pool_.push_back(std::move(*path));
    }
  }

  // Most negative reduced-cost path by dynamic programming in time order.
  std::optional<Path> price(const std::vector<double>& y, bool phase1) {
    const auto& arcs = net_.arcs();
    const int A = static_cast<int>(arcs.size());
    weight_.assign(A, 0.0);
    for (int a = 0; a < A; ++a)
      if (usable_[a] && !phase1) weight_[a] = model_.objective()[a];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (y[r] == 0.0) continue;
      for (auto [a, c] : rows_[r].terms) weight_[a] -= y[r] * c;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    dist_.assign(net_.nodes().size(), inf);
    via_.assign(net_.nodes().size(), -1);
    dist_[net_.source()] = 0.0;
    for (int node : order_) {
      if (dist_[node] == inf) continue;
      for (int a : net_.out_arcs(node)) {
        if (!usable_[a]) continue;
        const double d = dist_[node] + weight_[a];
        if (d < dist_[arcs[a].head] - 1e-12) {
          dist_[arcs[a].head] = d;
          via_[arcs[a].head] = a;
        }
      }
    }
    // Rows without usable terms still hold a dual; they contribute nothing to a path.
    if (dist_[net_.sink()] == inf || dist_[net_.sink()] > -options_.simplex.optimality_tol * 1e3)
      return std::nullopt;
    Path p;
    for (int node = net_.sink(); node != net_.source(); node = arcs[via_[node]].tail) p.arcs.push_back(via_[node]);
    std::reverse(p.arcs.begin(), p.arcs.end());
    for (int a : p.arcs) p.cost += model_.objective()[a];
    uses_.resize(A, 0);
    for (int a : p.arcs) ++uses_[a];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      double coef = 0.0;
      for (auto [a, c] : rows_[r].terms)
        if (uses_[a]) coef += c * uses_[a];
      if (coef != 0.0) p.entries.push_back({static_cast<int>(r), coef});
    }
    for (int a : p.arcs) uses_[a] = 0;
    return p;
  }

  const LpModel& model_;
  const TimeNetwork& net_;
  const std::vector<char>& usable_;
  const SolveOptions& options_;
  std::vector<int> order_;
  std::vector<LinearRow> rows_;
  std::vector<Path> pool_;
  std::unique_ptr<simplex::Solver> phase2_;
  std::vector<double> weight_, dist_, z_;
  std::vector<int> via_, uses_;
  double objective_ = 0.0;
  long iterations_ = 0;
};

LpSolution solve_with_paths(const LpModel& model, const TimeNetwork& net, const std::vector<char>& usable,
                            const SolveOptions& options) {
  PathMaster master(model, net, usable, options);
  if (!master.consistent()) return infeasible_solution(net);
  LpSolution result;
  int cuts_added = 0;
  bool need_phase_one = true;
  int restarts = 0;
  for (int round = 0;;) {
    if (need_phase_one) {
      const auto out = master.phase_one();
      if (out == PathMaster::Outcome::Infeasible) return infeasible_solution(net);
      if (out == PathMaster::Outcome::Limit) {
        result = infeasible_solution(net);
        result.status = LpStatus::IterationLimit;
        return result;
      }
    }
    const auto out = master.phase_two();
    if (out == PathMaster::Outcome::Infeasible) {
      // The pool lost feasibility after new cuts; phase one grows it again.
      if (++restarts > options.max_rounds) {
        result = infeasible_solution(net);
        result.status = LpStatus::IterationLimit;
        return result;
      }
      need_phase_one = true;
      continue;
    }
    need_phase_one = false;
    result = solution_from_z(net, master.z());
    result.objective = master.objective();
    result.cuts_added = cuts_added;
    result.rounds = round + 1;
    result.simplex_iterations = master.iterations();
    if (out == PathMaster::Outcome::Limit) {
      result.status = LpStatus::IterationLimit;
      return result;
    }
    SeparationOptions sep;
    sep.tolerance = options.cut_tolerance;
    sep.most_violated = true;
    std::vector<CutConstraint> cuts = separate_per_client(result, net, sep);
    if (cuts.empty()) {
      result.status = LpStatus::Optimal;
      return result;
    }
    if (++round >= options.max_rounds) {
      result.status = LpStatus::IterationLimit;
      return result;
    }
    for (const CutConstraint& cut : cuts) {
      master.add_row(cut_row(cut, net));
      if (master.last_row_empty_and_broken()) return infeasible_solution(net);
      ++cuts_added;
    }
  }
}

}  // namespace

LpSolution solve(const LpModel& model, const TimeNetwork& net, const SolveOptions& options) {
  const std::vector<char> usable = usable_arcs(model, net);
  return options.method == LpMethod::Arcs ? solve_with_arcs(model, net, usable, options)
                                  : solve_with_paths(model, net, usable, options);
}

std::vector<std::string> feasibility_report(const LpModel& model, const LpSolution& sol, double tol) {
  std::vector<std::string> out;
  const auto& arcs = model.network().arcs();
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (sol.z[a] < -tol) out.push_back("negative z on arc " + std::to_string(a));
    if (model.fixed_zero()[a] && std::abs(sol.z[a]) > tol) {
      const TimeNetwork& net = model.network();
      const TimeNode& u = net.nodes()[arcs[a].tail];
      const TimeNode& v = net.nodes()[arcs[a].head];
      out.push_back("fixed arc (" + net.label(u.place) + "," + std::to_string(u.time) + ")->(" +
                    net.label(v.place) + "," + std::to_string(v.time) + ") carries " + std::to_string(sol.z[a]));
    }
  }
  for (const LinearRow& row : model.rows()) {
    double lhs = 0.0;
    for (auto [a, c] : row.terms) lhs += c * sol.z[a];
    bool ok = true;
    switch (row.sense) {
      case simplex::Sense::Equal: ok = std::abs(lhs - row.rhs) <= tol; break;
      case simplex::Sense::LessEqual: ok = lhs <= row.rhs + tol; break;
      case simplex::Sense::GreaterEqual: ok = lhs >= row.rhs - tol; break;
    }
    if (!ok) out.push_back("row " + row.name + " violated: lhs " + std::to_string(lhs) + " rhs " + std::to_string(row.rhs));
  }
  if (auto cut = separate(sol, model.network()))
    out.push_back("cut violated: v=" + std::to_string(cut->v) + " t=" + std::to_string(cut->t) +
                  " lhs=" + std::to_string(cut->lhs) + " rhs=" + std::to_string(cut->rhs));
  return out;
}

}  // namespace dirlat
