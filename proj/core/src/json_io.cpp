#include "dirlat/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dirlat {

using nlohmann::json;

constexpr double kDumpEps = 1e-12;

namespace {

const json& field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw std::invalid_argument(std::string("instance: missing field '") + name + "'");
  return *it;
}

int small_int(const json& value, const char* name) {
  if (!value.is_number_integer()) throw std::invalid_argument(std::string("instance: '") + name + "' is not an integer");
  return value.get<int>();
}

json triple_json(const GuessTriple& triple) {
  json roots = json::object();
  for (auto [i, host] : triple.roots) roots[std::to_string(i)] = host;
  return {{"thresholds", triple.thresholds}, {"a_tour", triple.a_tour}, {"roots", roots}};
}

}  // namespace

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("instance: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("instance: top level must be an object");

  const int m = small_int(field(doc, "m"), "m");
  if (m < 1) throw std::invalid_argument("instance: 'm' must be positive");
  const json& rows = field(doc, "cost");
  if (!rows.is_array() || static_cast<int>(rows.size()) != m)
    throw std::invalid_argument("instance: 'cost' must have m rows");

  Instance inst;
  inst.cost = CostMatrix(m);
  for (int u = 0; u < m; ++u) {
    const json& row = rows[u];
    if (!row.is_array() || static_cast<int>(row.size()) != m)
      throw std::invalid_argument("instance: cost row " + std::to_string(u) + " must have m entries");
    for (int v = 0; v < m; ++v) {
      if (!row[v].is_number_integer())
        throw std::invalid_argument("instance: cost[" + std::to_string(u) + "][" + std::to_string(v) +
                                    "] is not an integer");
      inst.cost(u, v) = row[v].get<Cost>();
    }
  }
  inst.s = small_int(field(doc, "s"), "s");
  if (inst.s < 0 || inst.s >= m) throw std::invalid_argument("instance: 's' out of range");
  if (auto it = doc.find("target"); it != doc.end() && !it->is_null()) {
    inst.target = small_int(*it, "target");
    if (*inst.target < 0 || *inst.target >= m) throw std::invalid_argument("instance: 'target' out of range");
  }
  if (auto it = doc.find("epsilon"); it != doc.end()) {
    if (it->is_string()) inst.epsilon = parse_rational(it->get<std::string>());
    else if (it->is_number_integer()) inst.epsilon = Rational(it->get<std::int64_t>());
    else throw std::invalid_argument("instance: 'epsilon' must be a \"p/q\" string");
  }
  return inst;
}

std::string instance_to_json(const Instance& instance) {
  json rows = json::array();
  for (int u = 0; u < instance.m(); ++u) {
    json row = json::array();
    for (int v = 0; v < instance.m(); ++v) row.push_back(instance.cost(u, v));
    rows.push_back(row);
  }
  json doc = {{"m", instance.m()},
              {"s", instance.s},
              {"target", instance.target ? json(*instance.target) : json(nullptr)},
              {"epsilon", format_rational(instance.epsilon)},
              {"cost", rows}};
  return doc.dump() + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

Instance read_instance_file(const std::string& path) { return instance_from_json(read_text_file(path)); }

std::string solution_to_json(const LpSolution& solution, const TimeNetwork& network) {
  json x = json::array();
  for (std::size_t r = 0; r < solution.x.size(); ++r)
    for (std::size_t t = 0; t < solution.x[r].size(); ++t)
      if (std::abs(solution.x[r][t]) > kDumpEps) x.push_back({solution.client_vertices[r], t, solution.x[r][t]});
  json z = json::array();
  const auto& arcs = network.arcs();
  const auto& nodes = network.nodes();
  for (std::size_t a = 0; a < solution.z.size() && a < arcs.size(); ++a) {
    if (std::abs(solution.z[a]) <= kDumpEps || arcs[a].kind != ArcKind::Travel) continue;
    const TimeNode& u = nodes[arcs[a].tail];
    const TimeNode& v = nodes[arcs[a].head];
    z.push_back({network.places()[u.place].vertex, u.time, network.places()[v.place].vertex, v.time, solution.z[a]});
  }
  json doc = {{"objective", solution.objective},
              {"status", to_string(solution.status)},
              {"x", x},
              {"z_support", z},
              {"cuts_added", solution.cuts_added}};
  return doc.dump() + "\n";
}

std::string triple_to_json(const GuessTriple& triple) { return triple_json(triple).dump() + "\n"; }

std::string certificate_to_json(const Certificate& c) {
  json walk = json::array();
  for (const CertificateVisit& v : c.walk) walk.push_back({c.network.label(v.place), v.time, v.interval});
  json doc = {{"ok", c.ok()},
              {"opt_order", c.opt_order},
              {"opt_reference", c.opt_reference},
              {"ell", c.groups.ell},
              {"groups", c.groups.groups},
              {"triple", triple_json(c.triple)},
              {"certifier", c.certifier},
              {"segment_cost", c.segment_cost},
              {"walk", walk},
              {"objective", c.objective},
              {"failures", c.failures}};
  return doc.dump(2) + "\n";
}

}  // namespace dirlat
