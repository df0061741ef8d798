#include "dirlat/guessing.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dirlat {

namespace {

bool is_power_of_two(Cost v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(int n_plus_one) {
  int k = 0;
  while ((1 << k) < n_plus_one) ++k;
  return k;
}

}  // namespace

Cost GroupSequence::ellmax_next(int i) const {
  return i < q() ? ellmax[i] : ellmax[q() - 1];
}

GroupSequence make_group_sequence(int n, std::vector<Cost> ell) {
  const int k = log2_exact(n + 1);
  if ((1 << k) - 1 != n) throw std::invalid_argument("make_group_sequence: n is not 2^k-1");
  if (static_cast<int>(ell.size()) != k)
    throw std::invalid_argument("make_group_sequence: sequence length differs from k");
  for (int j = 0; j < k; ++j) {
    if (!is_power_of_two(ell[j])) throw std::invalid_argument("make_group_sequence: not a power of two");
    if (j > 0 && ell[j] < ell[j - 1]) throw std::invalid_argument("make_group_sequence: decreasing");
  }
  GroupSequence gs;
  gs.n = n;
  gs.k = k;
  gs.ell = std::move(ell);
  std::vector<int> current{1};
  for (int j = 1; j < k; ++j) {
    // Bucket j joins bucket j+1 (1-based j, j+1) when ell_j = ell_{j+1} = ell_{j+2}.
    const bool merge = j + 1 < k && gs.ell[j - 1] == gs.ell[j] && gs.ell[j] == gs.ell[j + 1];
    if (!merge) {
      gs.groups.push_back(current);
      current.clear();
    }
    current.push_back(j + 1);
  }
  gs.groups.push_back(current);
  for (const auto& g : gs.groups) {
    gs.ellmax.push_back(gs.ell[g.back() - 1]);
    int size = 0;
    for (int j : g) size += (n + 1) >> j;
    gs.sizes.push_back(size);
  }
  return gs;
}

int ceil_log2(Cost value) {
  int h = 0;
  while ((Cost{1} << h) < value) ++h;
  return h;
}

void for_each_valid_group(int n, Cost horizon, const std::function<void(const GroupSequence&)>& visit) {
  const int k = log2_exact(n + 1);
  const int h = ceil_log2(std::max<Cost>(1, horizon));
  if (k == 0) return;
  std::vector<int> exps(k, 0);
  while (true) {
    std::vector<Cost> ell(k);
    for (int j = 0; j < k; ++j) ell[j] = Cost{1} << exps[j];
    visit(make_group_sequence(n, std::move(ell)));
    int j = k - 1;
    while (j >= 0 && exps[j] == h) --j;
    if (j < 0) break;
    ++exps[j];
    for (int r = j + 1; r < k; ++r) exps[r] = exps[j];
  }
}

std::vector<GroupSequence> enumerate_valid_groups(int n, Cost horizon) {
  std::vector<GroupSequence> out;
  for_each_valid_group(n, horizon, [&](const GroupSequence& gs) { out.push_back(gs); });
  return out;
}

std::vector<Cost> thresholds_from_groups(const GroupSequence& gs) {
  std::vector<Cost> t{0};
  for (int i = 1; i <= gs.q(); ++i) t.push_back(t.back() + 19 * gs.ellmax_next(i));
  for (int i = 1; i + 1 <= gs.q(); ++i)
    if (3 * t[i + 1] < 4 * t[i]) throw std::logic_error("thresholds_from_groups: growth below 4/3");
  return t;
}

bool is_t_short(const CostMatrix& cost, int u, int v, Cost t) {
  return cost(u, v) <= std::max(cost(v, u), t);
}

std::optional<int> compute_root(const GroupSequence& gs, int i, const Instance& instance) {
  if (i < 1 || i > gs.q()) throw std::out_of_range("compute_root: group index");
  const Cost radius = 2 * gs.ellmax_next(i);
  const int need_two_way = gs.size(i);
  const int need_inbound = gs.n - gs.size(i) + 1;
  const std::vector<int> clients = instance.clients();
  for (int host : clients) {
    int two_way = 0, inbound = 0;
    for (int w : clients) {
      const Cost in = instance.cost(w, host), out = instance.cost(host, w);
      if (in <= radius) ++inbound;
      if (in <= radius && out <= radius) ++two_way;
    }
    if (two_way >= need_two_way && inbound >= need_inbound) return host;
  }
  return std::nullopt;
}

bool GuessTriple::is_tour(int i) const {
  return std::binary_search(a_tour.begin(), a_tour.end(), i);
}

int GuessTriple::interval_of(Cost time) const {
  auto it = std::upper_bound(thresholds.begin(), thresholds.end(), time);
  if (it == thresholds.end()) return 0;
  return static_cast<int>(it - thresholds.begin());
}

std::vector<int> GuessTriple::root_hosts() const {
  std::set<int> hosts;
  for (const auto& [i, h] : roots) hosts.insert(h);
  return {hosts.begin(), hosts.end()};
}

std::string GuessTriple::encoding() const {
  std::ostringstream out;
  out << "t=";
  for (std::size_t i = 0; i < thresholds.size(); ++i) out << (i ? "," : "") << thresholds[i];
  out << "|A=";
  for (std::size_t i = 0; i < a_tour.size(); ++i) out << (i ? "," : "") << a_tour[i];
  out << "|R=";
  bool first = true;
  for (const auto& [i, h] : roots) {
    out << (first ? "" : ",") << i << ":" << h;
    first = false;
  }
  return out.str();
}

void for_each_triple(const NiceInstance& nice, Cost horizon,
                     const std::function<void(const GuessTriple&)>& visit) {
  for_each_valid_group(nice.n(), horizon, [&](const GroupSequence& gs) {
    const std::vector<Cost> t = thresholds_from_groups(gs);
    const int q = gs.q();
    std::vector<std::optional<int>> root(q + 1);
    for (int i = 1; i <= q; ++i) root[i] = compute_root(gs, i, nice.inner);
    for (unsigned mask = 0; mask < (1u << q); ++mask) {
      GuessTriple triple;
      triple.thresholds = t;
      triple.ell = gs.ell;
      bool ok = true;
      for (int i = 1; i <= q && ok; ++i) {
        if (!(mask >> (i - 1) & 1)) continue;
        if (!root[i]) ok = false;
        else {
          triple.a_tour.push_back(i);
          triple.roots[i] = *root[i];
        }
      }
      if (ok) visit(triple);
    }
  });
}

std::vector<GuessTriple> setup_triples(const NiceInstance& nice, Cost horizon) {
  std::vector<GuessTriple> out;
  for_each_triple(nice, horizon, [&](const GuessTriple& t) { out.push_back(t); });
  return out;
}

}  // namespace dirlat
