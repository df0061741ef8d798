#include "dirlat/instance.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dirlat {

namespace {

using Wide = __int128;

Wide pow5(Wide n) { return n * n * n * n * n; }

Cost ceil_div(Wide a, Wide b) { return static_cast<Cost>((a + b - 1) / b); }

// Kosaraju on the subgraph of arcs with cost <= threshold among s and the clients.
// A walk from s covering every client exists iff the component DAG is a chain
// starting at s's component. On success `order` lists clients chain by chain.
bool covering_walk(const Instance& inst, Cost threshold, std::vector<int>* order) {
  std::vector<int> members{inst.s};
  for (int v : inst.clients()) members.push_back(v);
  const int k = static_cast<int>(members.size());
  auto arc = [&](int a, int b) { return a != b && inst.cost(members[a], members[b]) <= threshold; };

  std::vector<int> finish;
  std::vector<char> seen(k, 0);
  for (int root = 0; root < k; ++root) {
    if (seen[root]) continue;
    std::vector<std::pair<int, int>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
      auto& [a, next] = stack.back();
      if (next < k) {
        int b = next++;
        if (!seen[b] && arc(a, b)) {
          seen[b] = 1;
          stack.push_back({b, 0});
        }
      } else {
        finish.push_back(a);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(k, -1);
  int comps = 0;
  for (auto it = finish.rbegin(); it != finish.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<int> stack{*it};
    comp[*it] = comps;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < k; ++b)
        if (comp[b] < 0 && arc(b, a)) {
          comp[b] = comps;
          stack.push_back(b);
        }
    }
    ++comps;
  }
  // Components come out in topological order; the chain needs an arc between neighbours.
  if (comp[0] != 0) return false;
  for (int c = 0; c + 1 < comps; ++c) {
    bool linked = false;
    for (int a = 0; a < k && !linked; ++a)
      if (comp[a] == c)
        for (int b = 0; b < k; ++b)
          if (comp[b] == c + 1 && arc(a, b)) {
            linked = true;
            break;
          }
    if (!linked) return false;
  }
  if (order) {
    order->clear();
    for (int c = 0; c < comps; ++c)
      for (int a = 1; a < k; ++a)
        if (comp[a] == c) order->push_back(members[a]);
  }
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      std::int64_t p = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing text");
      return Rational(p);
    }
    std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    std::int64_t p = std::stoll(num, &used);
    if (used != num.size()) throw std::invalid_argument("trailing text");
    std::int64_t q = std::stoll(den, &used);
    if (used != den.size() || q == 0) throw std::invalid_argument("bad denominator");
    return Rational(p, q);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
}

std::string format_rational(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::vector<int> Instance::clients() const {
  std::vector<int> out;
  for (int v = 0; v < m(); ++v)
    if (is_client(v)) out.push_back(v);
  return out;
}

int Instance::client_count() const { return static_cast<int>(clients().size()); }

LatencyPath evaluate_order(const CostMatrix& cost, int start, const std::vector<int>& order) {
  LatencyPath path;
  path.order = order;
  path.latencies.reserve(order.size());
  Cost clock = 0;
  int at = start;
  for (int v : order) {
    clock += cost(at, v);
    path.latencies.push_back(clock);
    path.total += clock;
    at = v;
  }
  return path;
}

std::string MetricViolation::describe() const {
  std::ostringstream out;
  switch (kind) {
    case ViolationKind::Diagonal: out << "cost(" << u << "," << u << ") != 0"; break;
    case ViolationKind::Negative: out << "cost(" << u << "," << v << ") < 0"; break;
    case ViolationKind::Triangle:
      out << "cost(" << u << "," << w << ") > cost(" << u << "," << v << ") + cost(" << v
          << "," << w << ")";
      break;
    case ViolationKind::BadDepot: out << "depot index " << u << " out of range"; break;
    case ViolationKind::BadTarget: out << "target index " << u << " invalid"; break;
  }
  return out.str();
}

std::vector<MetricViolation> validate_metric(const Instance& inst, std::size_t limit) {
  std::vector<MetricViolation> out;
  const int m = inst.m();
  auto push = [&](MetricViolation v) {
    if (out.size() < limit) out.push_back(v);
  };
  if (inst.s < 0 || inst.s >= m) push({ViolationKind::BadDepot, inst.s});
  if (inst.target && (*inst.target < 0 || *inst.target >= m || *inst.target == inst.s))
    push({ViolationKind::BadTarget, *inst.target});
  for (int u = 0; u < m; ++u) {
    if (inst.cost(u, u) != 0) push({ViolationKind::Diagonal, u, u});
    for (int v = 0; v < m; ++v)
      if (inst.cost(u, v) < 0) push({ViolationKind::Negative, u, v});
  }
  for (int u = 0; u < m && out.size() < limit; ++u)
    for (int v = 0; v < m; ++v)
      for (int w = 0; w < m; ++w)
        if (inst.cost(u, w) > inst.cost(u, v) + inst.cost(v, w))
          push({ViolationKind::Triangle, u, v, w});
  return out;
}

Cost covering_threshold(const Instance& inst) {
  std::vector<Cost> lengths;
  for (int u = 0; u < inst.m(); ++u)
    for (int v = 0; v < inst.m(); ++v)
      if (u != v) lengths.push_back(inst.cost(u, v));
  lengths.push_back(0);
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  for (Cost g : lengths)
    if (covering_walk(inst, g, nullptr)) return g;
  return lengths.back();
}

Cost NiceInstance::cost_cap() const {
  const Wide p = original.epsilon.numerator(), q = original.epsilon.denominator();
  return static_cast<Cost>(2 * pow5(n()) * q * q / (p * p));
}

Cost NiceInstance::target_out_cost() const {
  const Wide p = original.epsilon.numerator(), q = original.epsilon.denominator();
  return ceil_div(2 * pow5(n()) * q, p);
}

Reduction reduce_to_nice(const Instance& instance, Rational epsilon, ReductionOptions options) {
  if (instance.target) throw std::invalid_argument("reduce_to_nice: instance already has a target");
  if (epsilon <= 0 || epsilon > 1) throw std::invalid_argument("reduce_to_nice: epsilon outside (0,1]");
  if (auto bad = validate_metric(instance, 1); !bad.empty())
    throw std::invalid_argument("reduce_to_nice: invalid metric: " + bad.front().describe());

  if (ZeroOptCertificate zero; covering_walk(instance, 0, &zero.order)) return zero;

  NiceInstance nice;
  nice.original = instance;
  nice.original.epsilon = epsilon;
  const int n0 = instance.client_count();
  int k = 0;
  while ((1 << k) - 1 < n0) ++k;
  nice.k = k;
  nice.pad_count = ((1 << k) - 1) - n0;

  const int m0 = instance.m();
  const int m_pad = m0 + nice.pad_count;
  CostMatrix padded(m_pad);
  auto source_of = [&](int v) { return v < m0 ? v : instance.s; };
  for (int u = 0; u < m_pad; ++u)
    for (int v = 0; v < m_pad; ++v)
      padded(u, v) = (u == v) ? 0 : instance.cost(source_of(u), source_of(v));

  Instance scaled_in{padded, instance.s, std::nullopt, epsilon};
  nice.gamma = covering_threshold(scaled_in);

  const Cost cap = nice.cost_cap();
  bool already_nice = true;
  for (int u = 0; u < m_pad && already_nice; ++u)
    for (int v = 0; v < m_pad; ++v)
      if (u != v && (padded(u, v) < 1 || padded(u, v) > cap)) {
        already_nice = false;
        break;
      }

  CostMatrix scaled(m_pad);
  if (options.scaling == Scaling::Auto && already_nice) {
    scaled = padded;
    nice.scaling_used = Scaling::Auto;
    nice.scale_back = 1;
  } else {
    const Wide n5 = pow5(nice.n());
    const Wide p = epsilon.numerator(), q = epsilon.denominator();
    const Wide denom = Wide(nice.gamma) * p;
    for (int u = 0; u < m_pad; ++u)
      for (int v = 0; v < m_pad; ++v) {
        if (u == v) continue;
        Cost c = ceil_div(Wide(padded(u, v)) * n5 * q, denom);
        scaled(u, v) = std::min(cap, std::max<Cost>(1, c));
      }
    Instance check{scaled, instance.s, std::nullopt, epsilon};
    if (!validate_metric(check, 1).empty()) scaled.close_metric();
    nice.scaling_used = Scaling::Full;
    nice.scale_back = Rational(nice.gamma * epsilon.numerator(),
                               static_cast<std::int64_t>(n5) * epsilon.denominator());
  }

  const int target = m_pad;
  CostMatrix full(m_pad + 1);
  const Cost out_cost = nice.target_out_cost();
  for (int u = 0; u < m_pad; ++u) {
    for (int v = 0; v < m_pad; ++v) full(u, v) = scaled(u, v);
    full(u, target) = 1;
    full(target, u) = out_cost;
  }
  nice.inner = Instance{full, instance.s, target, epsilon};
  return nice;
}

std::vector<std::string> nice_violations(const NiceInstance& nice) {
  std::vector<std::string> out;
  const Instance& in = nice.inner;
  if (!in.target) {
    out.push_back("target missing");
    return out;
  }
  const int t = *in.target;
  if (in.client_count() != nice.n())
    out.push_back("client count " + std::to_string(in.client_count()) + " != 2^k-1");
  const Cost cap = nice.cost_cap(), tout = nice.target_out_cost();
  for (int u = 0; u < in.m(); ++u) {
    if (in.cost(u, u) != 0) out.push_back("nonzero diagonal at " + std::to_string(u));
    for (int v = 0; v < in.m(); ++v) {
      if (u == v) continue;
      Cost c = in.cost(u, v);
      if (v == t && u != t && c != 1)
        out.push_back("cost to target from " + std::to_string(u) + " is not 1");
      else if (u == t && c != tout)
        out.push_back("cost from target to " + std::to_string(v) + " is not 2n^5/eps");
      else if (u != t && v != t && (c < 1 || c > cap))
        out.push_back("cost(" + std::to_string(u) + "," + std::to_string(v) + ") outside [1,cap]");
    }
  }
  // The target is a path endpoint, never an intermediate vertex.
  for (int u = 0; u < in.m(); ++u)
    for (int v = 0; v < in.m(); ++v)
      for (int w = 0; w < in.m(); ++w)
        if (v != t && in.cost(u, w) > in.cost(u, v) + in.cost(v, w))
          out.push_back("triangle violated at (" + std::to_string(u) + "," + std::to_string(v) +
                        "," + std::to_string(w) + ")");
  return out;
}

LatencyPath map_solution_back(const NiceInstance& nice, const LatencyPath& path) {
  const Instance& orig = nice.original;
  std::vector<int> order;
  std::vector<char> seen(orig.m(), 0);
  for (int v : path.order) {
    if (v == nice.target() || nice.is_pad(v)) continue;
    if (v < 0 || v >= orig.m() || !orig.is_client(v))
      throw std::invalid_argument("map_solution_back: unknown vertex " + std::to_string(v));
    if (seen[v]) throw std::invalid_argument("map_solution_back: repeated client " + std::to_string(v));
    seen[v] = 1;
    order.push_back(v);
  }
  for (int v : orig.clients())
    if (!seen[v]) throw std::invalid_argument("map_solution_back: missing client " + std::to_string(v));
  return evaluate_order(orig.cost, orig.s, order);
}

Instance regret_transform(const Instance& instance) {
  Instance out = instance;
  const int s = instance.s;
  for (int u = 0; u < instance.m(); ++u)
    for (int v = 0; v < instance.m(); ++v)
      out.cost(u, v) = instance.cost(s, u) + instance.cost(u, v) - instance.cost(s, v);
  return out;
}

}  // namespace dirlat
