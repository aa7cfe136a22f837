#include "ringx/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ringx/algorithms.hpp"

namespace ringx {

Objective parse_objective(const std::string& name) {
  if (name == "perpetual") return Objective::Perpetual;
  if (name == "terminating") return Objective::Terminating;
  throw ParseError("unknown objective '" + name + "'");
}

const char* objective_name(Objective o) {
  return o == Objective::Perpetual ? "perpetual" : "terminating";
}

namespace {

// --- pair graph: (system state, visited mask) -------------------------------------

std::uint64_t pack_robots(const SystemState& s) {
  std::uint64_t key = 0;
  for (const auto& r : s.robots) {
    std::uint64_t bits = (static_cast<std::uint64_t>(r.node) << 8) |
                         (static_cast<std::uint64_t>(r.color) << 6) |
                         (static_cast<std::uint64_t>(r.phase) << 4) |
                         (static_cast<std::uint64_t>(r.staged_color) << 2) |
                         static_cast<std::uint64_t>(r.staged_move + 1);
    key = (key << 12) | bits;
  }
  return key;
}

struct PairKey {
  std::uint64_t robots;
  std::uint32_t visited;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    std::uint64_t h = k.robots * 0x9e3779b97f4a7c15ull;
    h ^= (h >> 32) ^ (static_cast<std::uint64_t>(k.visited) * 0x85ebca6bull);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct PairEdge {
  std::uint32_t to;
  AdversaryChoice choice;
  std::array<std::uint8_t, kMaxRobots> slot_map;
  std::uint8_t acted;
  bool reset;
  bool config_changed;
};

struct PairGraph {
  std::vector<SystemState> states;
  std::vector<std::uint32_t> visited;
  std::vector<std::uint8_t> relevant;
  std::vector<std::vector<PairEdge>> out;
  std::vector<std::pair<std::int64_t, std::uint32_t>> parent;  // node, edge
  std::uint32_t full_mask = 0;
  std::uint64_t edge_count = 0;
  int robot_count = 0;
};

PairGraph build_pair_graph(const SystemState& initial,
                           const Algorithm& algorithm, bool reset_on_full,
                           const CheckOptions& options) {
  if (initial.n > 16)
    throw ParseError("checker supports rings of at most 16 nodes");
  PairGraph g;
  g.full_mask = (initial.n >= 32) ? 0xffffffffu : ((1u << initial.n) - 1);
  g.robot_count = initial.robot_count();

  std::unordered_map<PairKey, std::uint32_t, PairKeyHash> index;
  auto intern = [&](const SystemState& s, std::uint32_t mask,
                    std::int64_t parent_node,
                    std::uint32_t parent_edge) -> std::pair<std::uint32_t, bool> {
    PairKey key{pack_robots(s), mask};
    auto it = index.find(key);
    if (it != index.end()) return {it->second, false};
    std::uint32_t id = static_cast<std::uint32_t>(g.states.size());
    index.emplace(key, id);
    g.states.push_back(s);
    g.visited.push_back(mask);
    g.relevant.push_back(relevant_mask(s, algorithm));
    g.out.emplace_back();
    g.parent.emplace_back(parent_node, parent_edge);
    return {id, true};
  };

  std::uint32_t init_mask = initial.occupied_mask();
  if (reset_on_full && init_mask == g.full_mask)
    init_mask = initial.occupied_mask();
  intern(initial, init_mask, -1, 0);

  std::deque<std::uint32_t> frontier{0};
  while (!frontier.empty()) {
    std::uint32_t u = frontier.front();
    frontier.pop_front();
    SystemState state = g.states[u];
    std::uint32_t mask = g.visited[u];
    for (Successor& s : successors(state, algorithm, options.sym_mode)) {
      std::uint32_t next_mask = mask | s.state.occupied_mask();
      bool reset = next_mask == g.full_mask;
      if (reset && reset_on_full) next_mask = s.state.occupied_mask();
      std::uint32_t edge_idx = static_cast<std::uint32_t>(g.out[u].size());
      auto [v, fresh] = intern(s.state, next_mask, u, edge_idx);
      PairEdge e;
      e.to = v;
      e.choice = std::move(s.choice);
      e.slot_map = s.slot_map;
      e.acted = s.acted_mask;
      e.reset = reset;
      e.config_changed = s.config_changed;
      g.out[u].push_back(std::move(e));
      ++g.edge_count;
      if (fresh) {
        if (g.states.size() > options.state_limit)
          throw StateLimitExceeded(frontier.size());
        frontier.push_back(v);
      }
    }
  }
  return g;
}

// --- iterative Tarjan ---------------------------------------------------------------

// adjacency: for node u, call visit(v) for each edge target considered.
std::vector<std::int32_t> tarjan_components(
    std::size_t count,
    const std::function<void(std::uint32_t, const std::function<void(std::uint32_t)>&)>&
        for_each_target) {
  std::vector<std::int32_t> comp(count, -1);
  std::vector<std::int32_t> low(count, -1), num(count, -1);
  std::vector<std::uint32_t> stack;
  std::vector<bool> on_stack(count, false);
  std::int32_t counter = 0, comp_count = 0;

  struct Frame {
    std::uint32_t node;
    std::vector<std::uint32_t> targets;
    std::size_t next = 0;
  };
  std::vector<Frame> call_stack;

  for (std::uint32_t root = 0; root < count; ++root) {
    if (num[root] >= 0) continue;
    call_stack.push_back({root, {}, 0});
    num[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    for_each_target(root, [&](std::uint32_t v) {
      call_stack.back().targets.push_back(v);
    });
    while (!call_stack.empty()) {
      Frame& f = call_stack.back();
      if (f.next < f.targets.size()) {
        std::uint32_t v = f.targets[f.next++];
        if (num[v] < 0) {
          call_stack.push_back({v, {}, 0});
          num[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = true;
          for_each_target(v, [&](std::uint32_t w) {
            call_stack.back().targets.push_back(w);
          });
        } else if (on_stack[v]) {
          low[f.node] = std::min(low[f.node], num[v]);
        }
      } else {
        if (low[f.node] == num[f.node]) {
          while (true) {
            std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = comp_count;
            if (w == f.node) break;
          }
          ++comp_count;
        }
        std::uint32_t done = f.node;
        call_stack.pop_back();
        if (!call_stack.empty()) {
          Frame& p = call_stack.back();
          low[p.node] = std::min(low[p.node], low[done]);
        }
      }
    }
  }
  return comp;
}

// --- fair cycle search -----------------------------------------------------------------
//
// Within each SCC of the (optionally reset-filtered) pair graph, robot
// identities are unfolded into every assignment of ids to slots. A component
// of the unfolded graph admits a fair cycle exactly when, for every robot id,
// it contains a state where that robot is irrelevant or an edge where it
// acts. Such a cycle is stitched from paths through one witness per robot.

struct CycleStep {
  std::uint32_t node;
  std::uint32_t edge;
};

struct PermTable {
  std::vector<std::array<std::uint8_t, kMaxRobots>> perms;
  std::unordered_map<std::uint64_t, std::uint32_t> ids;

  static std::uint64_t pack(const std::array<std::uint8_t, kMaxRobots>& p) {
    std::uint64_t key = 0;
    for (int i = 0; i < kMaxRobots; ++i) key = (key << 8) | p[i];
    return key;
  }

  explicit PermTable(int k) {
    std::array<std::uint8_t, kMaxRobots> base{};
    for (int i = 0; i < kMaxRobots; ++i) base[i] = static_cast<std::uint8_t>(i);
    std::vector<std::uint8_t> head(base.begin(), base.begin() + k);
    std::sort(head.begin(), head.end());
    do {
      auto p = base;
      std::copy(head.begin(), head.end(), p.begin());
      ids.emplace(pack(p), static_cast<std::uint32_t>(perms.size()));
      perms.push_back(p);
    } while (std::next_permutation(head.begin(), head.end()));
  }

  std::uint32_t compose(std::uint32_t perm_id,
                        const std::array<std::uint8_t, kMaxRobots>& slot_map,
                        int k) const {
    std::array<std::uint8_t, kMaxRobots> out{};
    for (int i = 0; i < kMaxRobots; ++i)
      out[i] = i < k ? slot_map[perms[perm_id][i]]
                     : static_cast<std::uint8_t>(i);
    return ids.at(pack(out));
  }
};

std::optional<std::vector<CycleStep>> fair_cycle_search(const PairGraph& g,
                                                        bool exclude_reset) {
  auto edge_allowed = [&](const PairEdge& e) {
    return !(exclude_reset && e.reset);
  };
  std::vector<std::int32_t> comp = tarjan_components(
      g.states.size(), [&](std::uint32_t u, const std::function<void(std::uint32_t)>& f) {
        for (const PairEdge& e : g.out[u])
          if (edge_allowed(e)) f(e.to);
      });

  int ncomp = 1 + *std::max_element(comp.begin(), comp.end());
  std::vector<bool> has_internal_edge(ncomp, false);
  for (std::uint32_t u = 0; u < g.states.size(); ++u)
    for (const PairEdge& e : g.out[u])
      if (edge_allowed(e) && comp[e.to] == comp[u])
        has_internal_edge[comp[u]] = true;

  int k = g.robot_count;
  PermTable table(k);
  std::uint32_t nperms = static_cast<std::uint32_t>(table.perms.size());

  // Deterministic component order: by smallest member node id.
  std::vector<std::uint32_t> comp_seed(ncomp, 0xffffffffu);
  for (std::uint32_t u = 0; u < g.states.size(); ++u)
    comp_seed[comp[u]] = std::min(comp_seed[comp[u]], u);
  std::vector<int> comp_order(ncomp);
  for (int c = 0; c < ncomp; ++c) comp_order[c] = c;
  std::sort(comp_order.begin(), comp_order.end(),
            [&](int a, int b) { return comp_seed[a] < comp_seed[b]; });

  for (int c : comp_order) {
    if (!has_internal_edge[c]) continue;

    // Local node table for this SCC.
    std::vector<std::uint32_t> members;
    for (std::uint32_t u = 0; u < g.states.size(); ++u)
      if (comp[u] == c) members.push_back(u);
    std::unordered_map<std::uint32_t, std::uint32_t> local;
    for (std::uint32_t i = 0; i < members.size(); ++i)
      local.emplace(members[i], i);

    auto product_id = [&](std::uint32_t local_node, std::uint32_t perm) {
      return local_node * nperms + perm;
    };

    // Explore the unfolded graph from every assignment at the seed node.
    std::vector<std::int8_t> discovered(members.size() * nperms, 0);
    std::deque<std::uint64_t> queue;
    for (std::uint32_t p = 0; p < nperms; ++p) {
      queue.push_back(product_id(local.at(comp_seed[c]), p));
      discovered[queue.back()] = 1;
    }
    std::vector<std::uint64_t> product_nodes;
    while (!queue.empty()) {
      std::uint64_t pn = queue.front();
      queue.pop_front();
      product_nodes.push_back(pn);
      std::uint32_t u = members[pn / nperms];
      std::uint32_t perm = static_cast<std::uint32_t>(pn % nperms);
      for (const PairEdge& e : g.out[u]) {
        if (!edge_allowed(e) || comp[e.to] != c) continue;
        std::uint64_t target =
            product_id(local.at(e.to), table.compose(perm, e.slot_map, k));
        if (!discovered[target]) {
          discovered[target] = 1;
          queue.push_back(target);
        }
      }
    }

    // Compact product node ids.
    std::sort(product_nodes.begin(), product_nodes.end());
    std::unordered_map<std::uint64_t, std::uint32_t> pindex;
    for (std::uint32_t i = 0; i < product_nodes.size(); ++i)
      pindex.emplace(product_nodes[i], i);

    auto product_targets = [&](std::uint32_t pi,
                               const std::function<void(std::uint32_t)>& f) {
      std::uint64_t pn = product_nodes[pi];
      std::uint32_t u = members[pn / nperms];
      std::uint32_t perm = static_cast<std::uint32_t>(pn % nperms);
      for (const PairEdge& e : g.out[u]) {
        if (!edge_allowed(e) || comp[e.to] != c) continue;
        f(pindex.at(
            product_id(local.at(e.to), table.compose(perm, e.slot_map, k))));
      }
    };
    std::vector<std::int32_t> pcomp =
        tarjan_components(product_nodes.size(), product_targets);

    int npcomp = 1 + *std::max_element(pcomp.begin(), pcomp.end());
    for (int pc = 0; pc < npcomp; ++pc) {
      // Witness per robot id: a product node where it is irrelevant, or a
      // product edge where it acts. Edges are (source product node, edge idx).
      std::vector<std::optional<std::pair<std::uint32_t, std::int32_t>>>
          witness(k);
      bool internal = false;
      for (std::uint32_t pi = 0; pi < product_nodes.size(); ++pi) {
        if (pcomp[pi] != pc) continue;
        std::uint64_t pn = product_nodes[pi];
        std::uint32_t u = members[pn / nperms];
        std::uint32_t perm = static_cast<std::uint32_t>(pn % nperms);
        for (int i = 0; i < k; ++i) {
          std::uint8_t slot = table.perms[perm][i];
          if (!(g.relevant[u] & (1u << slot)) && !witness[i])
            witness[i] = {pi, -1};
        }
        for (std::uint32_t ei = 0; ei < g.out[u].size(); ++ei) {
          const PairEdge& e = g.out[u][ei];
          if (!edge_allowed(e) || comp[e.to] != c) continue;
          std::uint32_t ti =
              pindex.at(product_id(local.at(e.to),
                                   table.compose(perm, e.slot_map, k)));
          if (pcomp[ti] != pc) continue;
          internal = true;
          for (int i = 0; i < k; ++i) {
            std::uint8_t slot = table.perms[perm][i];
            if ((e.acted & (1u << slot)) && !witness[i])
              witness[i] = {pi, static_cast<std::int32_t>(ei)};
          }
        }
      }
      if (!internal) continue;
      bool fair = true;
      for (int i = 0; i < k; ++i) fair = fair && witness[i].has_value();
      if (!fair) continue;

      // Stitch a closed walk through all witnesses inside this product SCC.
      auto bfs_path = [&](std::uint32_t from,
                          std::uint32_t to) -> std::vector<CycleStep> {
        std::unordered_map<std::uint32_t, std::pair<std::uint32_t, CycleStep>>
            prev;
        std::deque<std::uint32_t> q{from};
        prev.emplace(from, std::pair<std::uint32_t, CycleStep>{from, {}});
        while (!q.empty()) {
          std::uint32_t pi = q.front();
          q.pop_front();
          if (pi == to && pi != from) break;
          std::uint64_t pn = product_nodes[pi];
          std::uint32_t u = members[pn / nperms];
          std::uint32_t perm = static_cast<std::uint32_t>(pn % nperms);
          for (std::uint32_t ei = 0; ei < g.out[u].size(); ++ei) {
            const PairEdge& e = g.out[u][ei];
            if (!edge_allowed(e) || comp[e.to] != c) continue;
            std::uint32_t ti = pindex.at(product_id(
                local.at(e.to), table.compose(perm, e.slot_map, k)));
            if (pcomp[ti] != pc || prev.count(ti)) continue;
            prev.emplace(ti, std::pair<std::uint32_t, CycleStep>{pi, {u, ei}});
            q.push_back(ti);
          }
        }
        std::vector<CycleStep> path;
        if (from == to) return path;
        std::uint32_t cur = to;
        while (cur != from) {
          auto& [p, step] = prev.at(cur);
          path.push_back(step);
          cur = p;
        }
        std::reverse(path.begin(), path.end());
        return path;
      };

      std::vector<CycleStep> walk;
      std::uint32_t start = witness[0]->first;
      std::uint32_t at = start;
      auto advance_via = [&](std::uint32_t pi, std::int32_t ei) {
        auto seg = bfs_path(at, pi);
        walk.insert(walk.end(), seg.begin(), seg.end());
        at = pi;
        if (ei >= 0) {
          std::uint64_t pn = product_nodes[pi];
          std::uint32_t u = members[pn / nperms];
          std::uint32_t perm = static_cast<std::uint32_t>(pn % nperms);
          const PairEdge& e = g.out[u][ei];
          walk.push_back({u, static_cast<std::uint32_t>(ei)});
          at = pindex.at(product_id(local.at(e.to),
                                    table.compose(perm, e.slot_map, k)));
        }
      };
      for (int i = 0; i < k; ++i) advance_via(witness[i]->first, witness[i]->second);
      if (at != start) {
        auto seg = bfs_path(at, start);
        walk.insert(walk.end(), seg.begin(), seg.end());
        at = start;
      }
      if (walk.empty()) {
        // All witnesses sit on one node; close through any internal edge.
        std::uint64_t pn = product_nodes[start];
        std::uint32_t u = members[pn / nperms];
        std::uint32_t perm = static_cast<std::uint32_t>(pn % nperms);
        for (std::uint32_t ei = 0; ei < g.out[u].size(); ++ei) {
          const PairEdge& e = g.out[u][ei];
          if (!edge_allowed(e) || comp[e.to] != c) continue;
          std::uint32_t ti = pindex.at(product_id(
              local.at(e.to), table.compose(perm, e.slot_map, k)));
          if (pcomp[ti] != pc) continue;
          walk.push_back({u, ei});
          at = ti;
          auto seg = bfs_path(at, start);
          walk.insert(walk.end(), seg.begin(), seg.end());
          break;
        }
      }
      if (!walk.empty()) return walk;
    }
  }
  return std::nullopt;
}

// --- verdict assembly ---------------------------------------------------------------

std::vector<CycleStep> stem_to(const PairGraph& g, std::uint32_t target) {
  std::vector<CycleStep> stem;
  std::uint32_t cur = target;
  while (g.parent[cur].first >= 0) {
    auto [p, ei] = g.parent[cur];
    stem.push_back({static_cast<std::uint32_t>(p), ei});
    cur = static_cast<std::uint32_t>(p);
  }
  std::reverse(stem.begin(), stem.end());
  return stem;
}

Trace steps_to_trace(const PairGraph& g, const std::vector<CycleStep>& steps) {
  Trace trace;
  trace.initial = g.states[0];
  for (const CycleStep& s : steps) {
    const PairEdge& e = g.out[s.node][s.edge];
    trace.steps.emplace_back(e.choice, g.states[e.to]);
  }
  return trace;
}

std::vector<int> mask_complement(std::uint32_t mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!(mask & (1u << i))) out.push_back(i);
  return out;
}

Verdict lasso_verdict(const PairGraph& g, const std::vector<CycleStep>& cycle) {
  Verdict v;
  v.outcome = Verdict::Outcome::Fails;
  v.witness_kind = Verdict::WitnessKind::Lasso;
  std::vector<CycleStep> steps = stem_to(g, cycle.front().node);
  v.cycle_begin = steps.size();
  steps.insert(steps.end(), cycle.begin(), cycle.end());
  v.witness = steps_to_trace(g, steps);
  v.state_count = g.states.size();
  v.edge_count = g.edge_count;
  return v;
}

Verdict terminal_verdict(const PairGraph& g, std::uint32_t sink,
                         std::uint32_t covered_mask) {
  Verdict v;
  v.outcome = Verdict::Outcome::Fails;
  v.witness_kind = Verdict::WitnessKind::Terminal;
  v.witness = steps_to_trace(g, stem_to(g, sink));
  v.uncovered = mask_complement(covered_mask, g.states[0].n);
  v.state_count = g.states.size();
  v.edge_count = g.edge_count;
  return v;
}

}  // namespace

Verdict check_perpetual_exploration(const SystemState& initial,
                                    const Algorithm& algorithm,
                                    const CheckOptions& options) {
  PairGraph g = build_pair_graph(initial, algorithm, true, options);
  for (std::uint32_t u = 0; u < g.states.size(); ++u) {
    if (!g.out[u].empty()) continue;
    std::uint32_t occupied = g.states[u].occupied_mask();
    if (occupied != g.full_mask) return terminal_verdict(g, u, occupied);
  }
  if (auto cycle = fair_cycle_search(g, /*exclude_reset=*/true))
    return lasso_verdict(g, *cycle);
  Verdict v;
  v.state_count = g.states.size();
  v.edge_count = g.edge_count;
  return v;
}

Verdict check_terminating_exploration(const SystemState& initial,
                                      const Algorithm& algorithm,
                                      const CheckOptions& options) {
  PairGraph g = build_pair_graph(initial, algorithm, false, options);
  for (std::uint32_t u = 0; u < g.states.size(); ++u) {
    if (!g.out[u].empty()) continue;
    if (g.visited[u] != g.full_mask) return terminal_verdict(g, u, g.visited[u]);
  }
  if (auto cycle = fair_cycle_search(g, /*exclude_reset=*/false))
    return lasso_verdict(g, *cycle);
  Verdict v;
  v.state_count = g.states.size();
  v.edge_count = g.edge_count;
  return v;
}

Verdict check_objective(const SystemState& initial, const Algorithm& algorithm,
                        Objective objective, const CheckOptions& options) {
  return objective == Objective::Perpetual
             ? check_perpetual_exploration(initial, algorithm, options)
             : check_terminating_exploration(initial, algorithm, options);
}

bool replay_witness(const Algorithm& algorithm, const Verdict& verdict,
                    SymMode sym_mode) {
  if (verdict.holds()) return true;
  SystemState state = verdict.witness.initial;
  std::vector<SystemState> states{state};
  for (const auto& [choice, recorded] : verdict.witness.steps) {
    SystemState next = apply_choice(state, choice, algorithm, sym_mode);
    if (!(next == recorded)) return false;
    state = next;
    states.push_back(state);
  }
  if (verdict.witness_kind == Verdict::WitnessKind::Lasso) {
    if (verdict.cycle_begin >= states.size()) return false;
    if (!(states.back() == states[verdict.cycle_begin])) return false;
    if (states.size() - 1 == verdict.cycle_begin) return false;
  }
  return true;
}

bool has_fair_cycle(const SystemState& initial, const Algorithm& algorithm,
                    const CheckOptions& options) {
  PairGraph g = build_pair_graph(initial, algorithm, false, options);
  return fair_cycle_search(g, /*exclude_reset=*/false).has_value();
}

bool has_changing_cycle(const SystemState& initial, const Algorithm& algorithm,
                        const CheckOptions& options) {
  PairGraph g = build_pair_graph(initial, algorithm, false, options);
  std::vector<std::int32_t> comp = tarjan_components(
      g.states.size(),
      [&](std::uint32_t u, const std::function<void(std::uint32_t)>& f) {
        for (const PairEdge& e : g.out[u]) f(e.to);
      });
  for (std::uint32_t u = 0; u < g.states.size(); ++u)
    for (const PairEdge& e : g.out[u])
      if (comp[e.to] == comp[u] && e.config_changed) return true;
  return false;
}

// --- territory sets ------------------------------------------------------------------

std::optional<TerritorySet> find_independent_territory_set(
    const Configuration& config) {
  int n = config.n();
  std::vector<int> occupied;
  for (int i = 0; i < n; ++i) {
    const ColorMultiset& node = config.nodes[i];
    if (node.empty()) continue;
    int colors = 0;
    for (int c = 0; c < config.palette.size(); ++c)
      if (node.count(static_cast<ColorId>(c)) > 0) ++colors;
    if (colors > 1) return std::nullopt;  // mixed tower: hypotheses fail
    occupied.push_back(i);
  }
  if (occupied.empty()) return std::nullopt;
  for (size_t a = 0; a < occupied.size(); ++a)
    for (size_t b = a + 1; b < occupied.size(); ++b)
      if (config.distance(occupied[a], occupied[b]) <= 1) return std::nullopt;

  int m = static_cast<int>(occupied.size());
  for (unsigned assignment = 0; assignment < (1u << m); ++assignment) {
    TerritorySet ts;
    for (int j = 0; j < m; ++j) {
      int dir = (assignment & (1u << j)) ? -1 : +1;
      ts.territories.push_back({occupied[j], config.mod(occupied[j] + dir)});
    }
    bool independent = true;
    for (int a = 0; a < m && independent; ++a) {
      for (int b = a + 1; b < m && independent; ++b) {
        const auto& ta = ts.territories[a];
        const auto& tb = ts.territories[b];
        for (int x : {ta.first, ta.second})
          for (int y : {tb.first, tb.second})
            if (config.distance(x, y) < 2) independent = false;
      }
    }
    if (independent) return ts;
  }
  return std::nullopt;
}

// --- certificate catalog -----------------------------------------------------------------

const char* certificate_kind_name(Certificate::Kind k) {
  switch (k) {
    case Certificate::Kind::Territory: return "territory";
    case Certificate::Kind::PairSameColor: return "pair-same-color";
    case Certificate::Kind::SameColorTower: return "same-color-tower";
    case Certificate::Kind::DistanceClass: return "distance-class";
    case Certificate::Kind::TowerDistance2: return "tower-distance-2";
    case Certificate::Kind::SymmetricXYX: return "symmetric-xyx";
    case Certificate::Kind::SymmetricClass: return "symmetric-class";
  }
  return "?";
}

namespace {

struct ConfigFacts {
  int n = 0;
  int k = 0;
  std::vector<int> occupied;
  int longest_distance = 0;  // max ring distance between occupied robots
  bool has_tower = false;
  bool has_same_color_pair_on_node = false;
};

ConfigFacts gather_facts(const Configuration& config) {
  ConfigFacts f;
  f.n = config.n();
  f.k = config.robot_count();
  for (int i = 0; i < f.n; ++i) {
    const ColorMultiset& node = config.nodes[i];
    if (node.empty()) continue;
    f.occupied.push_back(i);
    if (node.is_tower()) f.has_tower = true;
    for (int c = 0; c < config.palette.size(); ++c)
      if (node.count(static_cast<ColorId>(c)) >= 2)
        f.has_same_color_pair_on_node = true;
  }
  for (size_t a = 0; a < f.occupied.size(); ++a)
    for (size_t b = a + 1; b < f.occupied.size(); ++b)
      f.longest_distance = std::max(
          f.longest_distance, config.distance(f.occupied[a], f.occupied[b]));
  return f;
}

bool semi_synchronous(Model model) {
  return model == Model::Ssync || model == Model::Async;
}

}  // namespace

std::optional<Certificate> classify_configuration(const Configuration& config,
                                                  Model model,
                                                  Objective objective) {
  (void)objective;  // each catalog entry rules out both exploration tasks
  ConfigFacts f = gather_facts(config);

  // Confinement by territories (all schedulers, any k).
  if (auto ts = find_independent_territory_set(config)) {
    Certificate c{Certificate::Kind::Territory, "", std::move(ts), 0};
    c.detail = "independent territory set confines every robot";
    return c;
  }

  // k=2 adjacent same-color pair (n >= 6, all schedulers).
  if (f.k == 2 && f.n >= 6 && f.occupied.size() == 2 &&
      f.longest_distance == 1) {
    const ColorMultiset& a = config.nodes[f.occupied[0]];
    const ColorMultiset& b = config.nodes[f.occupied[1]];
    if (a == b) {
      return Certificate{Certificate::Kind::PairSameColor,
                         "adjacent robots share one color", std::nullopt, 1};
    }
  }

  // Same-color robots stacked on one node (semi-synchronous schedulers).
  if (f.has_same_color_pair_on_node && semi_synchronous(model) &&
      ((f.k == 3 && f.n >= 6) || f.k == 4)) {
    return Certificate{Certificate::Kind::SameColorTower,
                       "two robots of one color share a node", std::nullopt,
                       f.longest_distance};
  }

  if (f.k == 3 && f.n >= 9 && semi_synchronous(model)) {
    if (f.longest_distance >= 4 || f.longest_distance == 3) {
      Certificate c{Certificate::Kind::DistanceClass, "", std::nullopt,
                    f.longest_distance};
      c.detail = f.longest_distance >= 4 ? "longest robot distance at least 4"
                                         : "longest robot distance exactly 3";
      return c;
    }
    if (f.longest_distance == 2 && f.has_tower) {
      return Certificate{Certificate::Kind::TowerDistance2,
                         "tower with the third robot at distance 2",
                         std::nullopt, 2};
    }
    if (f.occupied.size() == 3 && f.longest_distance == 2) {
      // Three consecutive singletons; outer colors equal?
      for (int start : f.occupied) {
        if (config.at(start).empty() || config.at(start + 1).empty() ||
            config.at(start + 2).empty())
          continue;
        if (config.at(start) == config.at(start + 2)) {
          return Certificate{Certificate::Kind::SymmetricXYX,
                             "consecutive robots with equal outer colors",
                             std::nullopt, 2};
        }
      }
    }
  }

  if (f.k == 4 && semi_synchronous(model)) {
    for (const SubConfiguration& pattern : csym_members()) {
      if (contains_subconfiguration(config, pattern)) {
        return Certificate{Certificate::Kind::SymmetricClass,
                           "contains symmetric pattern " +
                               format_nodes(pattern, config.palette),
                           std::nullopt, f.longest_distance};
      }
    }
  }
  return std::nullopt;
}

// --- enumeration ---------------------------------------------------------------------------

std::vector<Configuration> enumerate_initial_configurations(
    int n, int k, const Palette& palette, PlacementFilter filter) {
  if (n < 3) throw ParseError("ring size must be at least 3");
  if (k < 1 || k > kMaxRobots) throw ParseError("unsupported robot count");

  int kappa = palette.size();
  int slots = n * kappa;
  std::vector<int> chosen(k, 0);
  std::map<std::string, Configuration> canon;

  auto accept = [&](const Configuration& config) {
    switch (filter) {
      case PlacementFilter::All:
        return true;
      case PlacementFilter::NoTowers: {
        for (const auto& node : config.nodes)
          if (node.is_tower()) return false;
        return true;
      }
      case PlacementFilter::AdjacentOnly: {
        std::vector<int> occupied;
        for (int i = 0; i < n; ++i) {
          if (config.nodes[i].is_tower()) return false;
          if (!config.nodes[i].empty()) occupied.push_back(i);
        }
        if (static_cast<int>(occupied.size()) != k) return false;
        // One contiguous run (allowing the wrap seam).
        int gaps = 0;
        for (size_t i = 0; i < occupied.size(); ++i) {
          int next = occupied[(i + 1) % occupied.size()];
          if (config.mod(next - occupied[i]) != 1) ++gaps;
        }
        return gaps <= 1 || static_cast<int>(occupied.size()) == n;
      }
    }
    return true;
  };

  std::function<void(int, int)> recurse = [&](int depth, int min_slot) {
    if (depth == k) {
      Configuration config{palette, std::vector<ColorMultiset>(n)};
      for (int slot : chosen)
        config.nodes[slot / kappa].add(static_cast<ColorId>(slot % kappa));
      if (!accept(config)) return;
      auto [canonical, transform] = canonicalize(config);
      (void)transform;
      canon.emplace(canonical_key(canonical), canonical);
      return;
    }
    for (int slot = min_slot; slot < slots; ++slot) {
      chosen[depth] = slot;
      recurse(depth + 1, slot);
    }
  };
  recurse(0, 0);

  std::vector<Configuration> out;
  out.reserve(canon.size());
  for (auto& [key, config] : canon) out.push_back(std::move(config));
  return out;
}

// --- audits ----------------------------------------------------------------------------------

const char* audit_status_name(AuditEntry::Status s) {
  switch (s) {
    case AuditEntry::Status::AlgorithmSolves: return "solves";
    case AuditEntry::Status::CertifiedUnsolvable: return "certified-unsolvable";
    case AuditEntry::Status::Discrepancy: return "discrepancy";
    case AuditEntry::Status::LimitExceeded: return "limit-exceeded";
  }
  return "?";
}

int UniversalityReport::count(AuditEntry::Status s) const {
  int c = 0;
  for (const auto& e : entries) c += e.status == s;
  return c;
}

UniversalityReport universality_audit(const Algorithm& algorithm, Model model,
                                      Objective objective,
                                      const std::vector<int>& ring_sizes,
                                      int k, const AuditOptions& options) {
  UniversalityReport report;
  report.algorithm_name = algorithm.name;
  report.model = model;
  report.objective = objective;

  std::vector<Configuration> configs;
  for (int n : ring_sizes) {
    auto batch = enumerate_initial_configurations(n, k, algorithm.palette,
                                                  options.filter);
    configs.insert(configs.end(), batch.begin(), batch.end());
  }
  report.entries.resize(configs.size());

  auto run_entry = [&](std::size_t i) {
    AuditEntry& entry = report.entries[i];
    entry.config = configs[i];
    auto start = std::chrono::steady_clock::now();
    entry.certificate = classify_configuration(entry.config, model, objective);
    try {
      Verdict v = check_objective(initial_state(entry.config, model), algorithm,
                                  objective, options.check);
      entry.state_count = v.state_count;
      bool holds = v.holds();
      entry.verdict = std::move(v);
      if (holds && !entry.certificate)
        entry.status = AuditEntry::Status::AlgorithmSolves;
      else if (!holds && entry.certificate)
        entry.status = AuditEntry::Status::CertifiedUnsolvable;
      else
        entry.status = AuditEntry::Status::Discrepancy;
    } catch (const StateLimitExceeded&) {
      entry.status = AuditEntry::Status::LimitExceeded;
    }
    entry.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  };

  int threads = std::max(1, options.threads);
  if (threads == 1 || configs.size() <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) run_entry(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    int count = std::min<std::size_t>(threads, configs.size());
    for (int t = 0; t < count; ++t) {
      pool.emplace_back([&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= configs.size()) break;
          run_entry(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return report;
}

// --- canonical reachable graph ------------------------------------------------------------------

SystemState canonical_state(const SystemState& state) {
  int n = state.n;
  std::optional<std::uint64_t> best_key;
  SystemState best = state;
  for (int refl = 0; refl < 2; ++refl) {
    for (int shift = 0; shift < n; ++shift) {
      RingTransform t{shift, refl != 0};
      SystemState candidate = state;
      for (RobotState& r : candidate.robots) {
        r.node = static_cast<std::uint8_t>(t.apply_index(r.node, n));
        if (refl) r.staged_move = static_cast<std::int8_t>(-r.staged_move);
      }
      candidate.normalize();
      std::uint64_t key = pack_robots(candidate);
      if (!best_key || key < *best_key) {
        best_key = key;
        best = std::move(candidate);
      }
    }
  }
  return best;
}

ReachableGraph build_reachable_graph(const SystemState& initial,
                                     const Algorithm& algorithm,
                                     std::uint64_t bound, SymMode sym_mode) {
  ReachableGraph graph;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  auto intern = [&](const SystemState& s) -> std::pair<std::uint32_t, bool> {
    SystemState canon = canonical_state(s);
    std::uint64_t key = pack_robots(canon);
    auto it = index.find(key);
    if (it != index.end()) return {it->second, false};
    std::uint32_t id = static_cast<std::uint32_t>(graph.states.size());
    index.emplace(key, id);
    graph.states.push_back(std::move(canon));
    graph.edges.emplace_back();
    return {id, true};
  };

  intern(initial);
  std::deque<std::uint32_t> frontier{0};
  while (!frontier.empty()) {
    std::uint32_t u = frontier.front();
    frontier.pop_front();
    SystemState rep = graph.states[u];
    for (const Successor& s : successors(rep, algorithm, sym_mode)) {
      auto [v, fresh] = intern(s.state);
      graph.edges[u].push_back(
          {format_choice(rep, s.choice, algorithm.palette), v});
      ++graph.edge_count;
      if (fresh) {
        if (graph.states.size() > bound)
          throw StateLimitExceeded(frontier.size());
        frontier.push_back(v);
      }
    }
  }
  return graph;
}

}  // namespace ringx
