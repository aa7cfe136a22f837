#include "ringx/algorithms.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ringx {

namespace {

const char* kFp2 = R"(name: FP2
init: G,W
init: W,G
0GW : . | (G) | W :: G, left
0WG : . | (W) | G :: W, right
)";

const char* kFt3 = R"(name: FT3
init: W,W,W
init: G,W,W
init: W,W,G
init: G,W,G
0GW : . | (G) | W :: G, left
0WG : . | (W) | G :: W, right
0WW : . | (W) | W :: G, stay
GWW : G | (W) | W :: W, left
GWG : G | (W) | G :: W, either
)";

const char* kAp3 = R"(name: AP3
init: W,W,G
init: W,G,G
init: G,W,W
init: G,G,W
init: W,GW
init: GW,W
init: G,GW
init: GW,G
0GW : . | (G) | W :: G, right
0TW : . | G(W) | W :: G, right
0TG : . | W(G) | G :: W, left
0WG : . | (W) | G :: W, right
)";

const char* kAt4 = R"(name: AT4
init: W,W,G,G
init: W,W,W,G
init: W,W,G,W
init: G,G,W,W
init: G,W,W,W
init: W,G,W,W
0GW : . | (G) | W :: G, right
GGW : G | (G) | W :: G, right
0TW : . | G(W) | W :: G, right
GTW : G | G(W) | W :: G, right
0TG : . | W(G) | G :: W, left
0WG : . | (W) | G :: W, right
)";

const char* kAppendix = R"(name: appendix
R1 : . | W(G) | G :: W, left
R2 : . | (W) | W :: G, right
R3 : . | W(G) | G :: W, right
R4 : . | G(W) | W :: G, right
R5 : . | G(W) | G :: W, left
R6 : . | (W) | G :: W, right
R7 : . | W(G) | W :: G, left
R8 : . | (G) | W :: G, right
R9 : . | G(W) | W :: G, left
R10 : . | (G) | G :: W, right
R11 : . | G(W) | G :: W, right
R12 : . | W(G) | W :: G, right
R13 : . | (G) | WG :: W, stay
R14 : . | (W) | GW :: G, stay
R15 : G | (W) | W :: G, stay
R16 : G | (G) | W :: W, stay
)";

std::vector<SubConfiguration> parse_patterns(
    const std::vector<std::string>& texts) {
  std::vector<SubConfiguration> out;
  Palette p;
  for (const auto& t : texts) out.push_back(parse_nodes(t, p));
  return out;
}

}  // namespace

Algorithm builtin_algorithm(const std::string& name) {
  if (name == "FP2") return parse_algorithm_text(kFp2);
  if (name == "FT3") return parse_algorithm_text(kFt3);
  if (name == "AP3") return parse_algorithm_text(kAp3);
  if (name == "AT4") return parse_algorithm_text(kAt4);
  throw ParseError("unknown builtin algorithm '" + name + "'");
}

std::vector<std::string> builtin_algorithm_names() {
  return {"FP2", "FT3", "AP3", "AT4"};
}

Algorithm resolve_algorithm(const std::string& ref) {
  for (const auto& name : builtin_algorithm_names())
    if (ref == name) return builtin_algorithm(ref);
  return load_algorithm_file(ref);
}

Algorithm color_swapped(const Algorithm& algorithm) {
  if (algorithm.palette.size() != 2)
    throw ParseError("color swap requires a two-color palette");
  std::vector<ColorId> perm{1, 0};
  auto swap_set = [&](const ColorMultiset& m) {
    ColorMultiset out;
    if (int c0 = m.count(0)) out.add(1, c0);
    if (int c1 = m.count(1)) out.add(0, c1);
    return out;
  };
  Algorithm out = algorithm;
  constexpr const char* kSuffix = "~swap";
  if (out.name.size() >= 5 && out.name.substr(out.name.size() - 5) == kSuffix)
    out.name.resize(out.name.size() - 5);
  else
    out.name += kSuffix;
  for (Rule& r : out.rules) {
    r.guard.self_color = perm[r.guard.self_color];
    r.guard.minus = swap_set(r.guard.minus);
    r.guard.zero = swap_set(r.guard.zero);
    r.guard.plus = swap_set(r.guard.plus);
    r.action.new_color = perm[r.action.new_color];
  }
  for (SubConfiguration& init : out.initial_configs)
    for (ColorMultiset& node : init) node = swap_set(node);
  return out;
}

std::vector<Rule> appendix_rules() {
  return parse_algorithm_text(kAppendix).rules;
}

std::vector<SubConfiguration> cpe_members() {
  return parse_patterns({"W,W,G", "W,GW", "GW,G"});
}

std::vector<SubConfiguration> cexp_members() {
  return parse_patterns(
      {"W,G,G", "G,G,W", "G,W,W", "W,W,G", "W,GW", "GW,W", "G,GW", "GW,G"});
}

std::vector<SubConfiguration> csym_members() {
  return parse_patterns({"W,G,G,W", "G,W,W,G", "W,W,W,W", "G,G,G,G", "WW,WW",
                         "GG,GG", "GW,GW"});
}

std::vector<SubConfiguration> csol_members() {
  return parse_patterns({"W,W,G,G", "W,W,W,G", "W,W,G,W", "G,G,W,W", "G,W,W,W",
                         "W,G,W,W", "G,G,G,W", "G,G,W,G", "W,G,G,G",
                         "G,W,G,G"});
}

// --- exploration-class transition graph -----------------------------------------

namespace {

constexpr int kReferenceRing = 12;
constexpr int kReferenceOffset = 4;

// Applies one rule as an atomic full cycle of one matching robot. Returns all
// distinct results (several robots or orientations may match).
std::vector<Configuration> apply_rule_once(const Configuration& config,
                                           const Rule& rule) {
  std::vector<Configuration> results;
  Algorithm probe;
  probe.palette = config.palette;
  probe.rules = {rule};
  for (int node = 0; node < config.n(); ++node) {
    for (int c = 0; c < config.palette.size(); ++c) {
      ColorId color = static_cast<ColorId>(c);
      if (!config.nodes[node].contains(color)) continue;
      auto [fwd, bwd] = robot_views(config, node, color);
      for (const RuleMatch& m : match_rules(probe, fwd, bwd)) {
        std::vector<int> moves;
        switch (rule.action.movement) {
          case Movement::Stay: moves = {0}; break;
          case Movement::TowardMinus:
            if (m.forward) moves.push_back(-1);
            if (m.backward) moves.push_back(+1);
            break;
          case Movement::TowardPlus:
            if (m.forward) moves.push_back(+1);
            if (m.backward) moves.push_back(-1);
            break;
          case Movement::Either: moves = {-1, +1}; break;
        }
        for (int mv : moves) {
          Configuration next = config;
          next.at(node).remove(color);
          next.at(node + mv).add(rule.action.new_color);
          if (std::find(results.begin(), results.end(), next) == results.end())
            results.push_back(next);
        }
      }
    }
  }
  return results;
}

// The occupied window of a configuration whose robots sit well inside the
// reference ring: (start node, linear pattern).
std::pair<int, SubConfiguration> occupied_window(const Configuration& config) {
  int lo = config.n(), hi = -1;
  for (int i = 0; i < config.n(); ++i) {
    if (!config.nodes[i].empty()) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  if (hi < 0) throw std::logic_error("empty configuration");
  if (hi - lo >= config.n() / 2)
    throw std::logic_error("occupied window strays across the ring seam");
  SubConfiguration pattern(config.nodes.begin() + lo,
                           config.nodes.begin() + hi + 1);
  return {lo, pattern};
}

SubConfiguration reversed(const SubConfiguration& pattern) {
  return SubConfiguration(pattern.rbegin(), pattern.rend());
}

// Index of the class matching `pattern` (directly or reflected); -1 if none.
std::pair<int, bool> match_class(const std::vector<SubConfiguration>& classes,
                                 const SubConfiguration& pattern) {
  for (size_t i = 0; i < classes.size(); ++i) {
    if (pattern == classes[i]) return {static_cast<int>(i), false};
    if (pattern == reversed(classes[i])) return {static_cast<int>(i), true};
  }
  return {-1, false};
}

}  // namespace

CexpGraph cexp_transition_graph(const std::vector<Rule>& rules) {
  CexpGraph graph;
  Palette palette;
  graph.classes = parse_patterns({"G,W,W", "W,G,G", "W,GW", "G,GW"});
  for (const auto& c : graph.classes)
    graph.class_names.push_back(format_nodes(c, palette));

  for (size_t ci = 0; ci < graph.classes.size(); ++ci) {
    Configuration base =
        place_on_ring(graph.classes[ci], kReferenceRing, kReferenceOffset);
    for (const Rule& rule : rules) {
      for (const Configuration& next : apply_rule_once(base, rule)) {
        auto [start, pattern] = occupied_window(next);
        auto [to, mirrored] = match_class(graph.classes, pattern);
        CexpEdge edge;
        edge.from = static_cast<int>(ci);
        edge.to = to;
        edge.rule = rule.label;
        edge.mirrored = mirrored;
        edge.window_shift = start - kReferenceOffset;
        edge.result = pattern;
        graph.edges.push_back(std::move(edge));
      }
    }
  }
  return graph;
}

namespace {

// Net displacement of one traversal of a rule cycle, simulated concretely on
// the reference ring. A traversal that returns the mirrored representative
// oscillates in place (two traversals cancel), so its net is zero.
int cycle_net_displacement(const CexpGraph& graph,
                           const std::vector<const CexpEdge*>& cycle,
                           const std::vector<Rule>& rules) {
  Configuration config = place_on_ring(graph.classes[cycle.front()->from],
                                       kReferenceRing, kReferenceOffset);
  for (const CexpEdge* edge : cycle) {
    const Rule* rule = nullptr;
    for (const Rule& r : rules)
      if (r.label == edge->rule) rule = &r;
    assert(rule);
    auto results = apply_rule_once(config, *rule);
    if (results.size() != 1)
      throw std::logic_error("ambiguous rule application along a cycle");
    config = results.front();
  }
  auto [start, pattern] = occupied_window(config);
  auto [cls, mirrored] = match_class(graph.classes, pattern);
  if (cls != cycle.front()->from)
    throw std::logic_error("cycle simulation did not return to its class");
  return mirrored ? 0 : start - kReferenceOffset;
}

}  // namespace

std::vector<CycleAnalysis> find_progressing_rule_cycles(
    const std::vector<Rule>& catalog,
    const std::vector<std::string>& exclusions) {
  std::vector<Rule> rules;
  for (const Rule& r : catalog) {
    if (std::find(exclusions.begin(), exclusions.end(), r.label) ==
        exclusions.end())
      rules.push_back(r);
  }
  CexpGraph graph = cexp_transition_graph(rules);

  // Class-level edges only (drop exits).
  std::vector<const CexpEdge*> edges;
  for (const CexpEdge& e : graph.edges)
    if (e.to >= 0) edges.push_back(&e);

  std::vector<CycleAnalysis> cycles;
  int nclasses = static_cast<int>(graph.classes.size());

  // Simple cycles, each reported once with its smallest class first.
  std::vector<const CexpEdge*> path;
  std::vector<bool> visited(nclasses, false);
  auto dfs = [&](auto&& self, int root, int at) -> void {
    for (const CexpEdge* e : edges) {
      if (e->from != at) continue;
      if (e->to == root) {
        path.push_back(e);
        std::vector<const CexpEdge*> cycle = path;
        CycleAnalysis analysis;
        for (const CexpEdge* ce : cycle) {
          analysis.rule_labels.push_back(ce->rule);
          analysis.transition_sequence.push_back(
              {graph.class_names[ce->from], ce->rule});
        }
        analysis.net_displacement = cycle_net_displacement(graph, cycle, rules);
        cycles.push_back(std::move(analysis));
        path.pop_back();
      } else if (e->to > root && !visited[e->to]) {
        visited[e->to] = true;
        path.push_back(e);
        self(self, root, e->to);
        path.pop_back();
        visited[e->to] = false;
      }
    }
  };
  for (int root = 0; root < nclasses; ++root) {
    std::fill(visited.begin(), visited.end(), false);
    visited[root] = true;
    dfs(dfs, root, root);
  }

  std::sort(cycles.begin(), cycles.end(),
            [](const CycleAnalysis& a, const CycleAnalysis& b) {
              if (a.rule_labels.size() != b.rule_labels.size())
                return a.rule_labels.size() < b.rule_labels.size();
              return a.rule_labels < b.rule_labels;
            });
  return cycles;
}

}  // namespace ringx
