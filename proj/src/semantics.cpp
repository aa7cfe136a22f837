#include "ringx/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

namespace ringx {

Model parse_model(const std::string& name) {
  if (name == "fsync") return Model::Fsync;
  if (name == "ssync") return Model::Ssync;
  if (name == "async") return Model::Async;
  throw ParseError("unknown scheduler model '" + name + "'");
}

const char* model_name(Model m) {
  switch (m) {
    case Model::Fsync: return "fsync";
    case Model::Ssync: return "ssync";
    case Model::Async: return "async";
  }
  return "?";
}

void SystemState::normalize() { std::sort(robots.begin(), robots.end()); }

bool SystemState::all_idle() const {
  for (const auto& r : robots)
    if (r.phase != Phase::Idle) return false;
  return true;
}

Configuration SystemState::config(const Palette& palette) const {
  Configuration c{palette, std::vector<ColorMultiset>(n)};
  for (const auto& r : robots) c.nodes[r.node].add(r.color);
  return c;
}

std::uint32_t SystemState::occupied_mask() const {
  std::uint32_t mask = 0;
  for (const auto& r : robots) mask |= 1u << r.node;
  return mask;
}

SystemState initial_state(const Configuration& config, Model model) {
  SystemState s;
  s.n = static_cast<std::uint8_t>(config.n());
  s.model = model;
  for (int i = 0; i < config.n(); ++i) {
    for (int c = 0; c < config.palette.size(); ++c) {
      for (int m = 0; m < config.nodes[i].count(static_cast<ColorId>(c)); ++m) {
        RobotState r;
        r.node = static_cast<std::uint8_t>(i);
        r.color = static_cast<ColorId>(c);
        s.robots.push_back(r);
      }
    }
  }
  if (s.robots.size() > kMaxRobots)
    throw ParseError("more robots than supported maximum");
  s.normalize();
  return s;
}

std::vector<RobotOutcome> robot_outcomes(const SystemState& state, int slot,
                                         const Algorithm& algorithm) {
  const RobotState& robot = state.robots[slot];
  std::vector<RobotOutcome> outcomes;
  if (robot.phase != Phase::Idle) return outcomes;
  Configuration config = state.config(algorithm.palette);
  auto [fwd, bwd] = robot_views(config, robot.node, robot.color);
  for (const RuleMatch& m : match_rules(algorithm, fwd, bwd)) {
    const Rule& rule = algorithm.rules[m.rule_index];
    auto push = [&](std::int8_t move) {
      for (const auto& o : outcomes)
        if (o.new_color == rule.action.new_color && o.move == move) return;
      outcomes.push_back(RobotOutcome{static_cast<std::int16_t>(m.rule_index),
                                      rule.action.new_color, move});
    };
    // Forward orientation: the guard's minus side is node-1. Backward: node+1.
    switch (rule.action.movement) {
      case Movement::Stay:
        push(0);
        break;
      case Movement::TowardMinus:
        if (m.forward) push(-1);
        if (m.backward) push(+1);
        break;
      case Movement::TowardPlus:
        if (m.forward) push(+1);
        if (m.backward) push(-1);
        break;
      case Movement::Either:
        push(-1);
        push(+1);
        break;
    }
  }
  return outcomes;
}

std::vector<int> enabled_robots(const SystemState& state,
                                const Algorithm& algorithm) {
  std::vector<int> enabled;
  for (int i = 0; i < state.robot_count(); ++i)
    if (!robot_outcomes(state, i, algorithm).empty()) enabled.push_back(i);
  return enabled;
}

std::uint8_t relevant_mask(const SystemState& state,
                           const Algorithm& algorithm) {
  std::uint8_t mask = 0;
  for (int i = 0; i < state.robot_count(); ++i) {
    if (state.robots[i].phase != Phase::Idle ||
        !robot_outcomes(state, i, algorithm).empty())
      mask |= static_cast<std::uint8_t>(1u << i);
  }
  return mask;
}

bool is_quiescent(const SystemState& state, const Algorithm& algorithm) {
  return state.all_idle() && enabled_robots(state, algorithm).empty();
}

namespace {

int wrap(int node, int n) { return ((node % n) + n) % n; }

// Erased identity of a choice: what the adversary observably did.
std::string choice_key(const SystemState& state, const AdversaryChoice& c) {
  std::string key;
  key.push_back(static_cast<char>(c.kind));
  std::vector<std::string> acts;
  for (const Resolution& r : c.acts) {
    const RobotState& robot = state.robots[r.slot];
    std::string a;
    a.push_back(static_cast<char>(robot.node));
    a.push_back(static_cast<char>(robot.color));
    a.push_back(static_cast<char>(robot.phase));
    a.push_back(static_cast<char>(robot.staged_color));
    a.push_back(static_cast<char>(robot.staged_move + 1));
    a.push_back(static_cast<char>(r.new_color));
    a.push_back(static_cast<char>(r.move + 1));
    acts.push_back(std::move(a));
  }
  std::sort(acts.begin(), acts.end());
  for (const auto& a : acts) key += a;
  return key;
}

Successor build_successor(const SystemState& state, AdversaryChoice choice) {
  int n = state.n;
  std::vector<RobotState> next = state.robots;
  std::uint8_t acted = 0;
  for (const Resolution& r : choice.acts) {
    RobotState& robot = next[r.slot];
    acted |= static_cast<std::uint8_t>(1u << r.slot);
    switch (choice.kind) {
      case AdversaryChoice::Kind::FsyncStep:
      case AdversaryChoice::Kind::SsyncStep:
        robot.color = r.new_color;
        robot.node = static_cast<std::uint8_t>(wrap(robot.node + r.move, n));
        break;
      case AdversaryChoice::Kind::AsyncLook:
        robot.phase = Phase::Looked;
        robot.staged_color = r.new_color;
        robot.staged_move = r.move;
        break;
      case AdversaryChoice::Kind::AsyncCompute:
        robot.color = robot.staged_color;
        if (robot.staged_move == 0) {
          robot.phase = Phase::Idle;
          robot.staged_color = 0;
        } else {
          robot.phase = Phase::MovePending;
          robot.staged_color = robot.color;
        }
        break;
      case AdversaryChoice::Kind::AsyncMove:
        robot.node =
            static_cast<std::uint8_t>(wrap(robot.node + robot.staged_move, n));
        robot.phase = Phase::Idle;
        robot.staged_color = 0;
        robot.staged_move = 0;
        break;
    }
  }

  // Sort while tracking where each source slot went.
  int k = state.robot_count();
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return next[a].key() < next[b].key();
  });
  Successor succ;
  succ.choice = std::move(choice);
  succ.state.n = state.n;
  succ.state.model = state.model;
  succ.state.robots.resize(k);
  for (int pos = 0; pos < k; ++pos) {
    succ.state.robots[pos] = next[order[pos]];
    succ.slot_map[order[pos]] = static_cast<std::uint8_t>(pos);
  }
  succ.acted_mask = acted;

  for (int i = 0; i < k && !succ.config_changed; ++i) {
    succ.config_changed = state.robots[i].node != succ.state.robots[i].node ||
                          state.robots[i].color != succ.state.robots[i].color;
  }
  return succ;
}

// Enumerates resolution vectors over the given slots. Under Locked, robots
// sharing a node and color receive identical outcomes.
void enumerate_resolution_vectors(
    const SystemState& state, const std::vector<int>& slots,
    const std::vector<std::vector<RobotOutcome>>& options, SymMode sym_mode,
    const std::function<void(const std::vector<Resolution>&)>& emit) {
  // Group indices into `slots`.
  std::vector<int> group_of(slots.size(), -1);
  std::vector<int> group_rep;
  for (size_t i = 0; i < slots.size(); ++i) {
    if (sym_mode == SymMode::Locked) {
      for (size_t j = 0; j < i; ++j) {
        const RobotState& a = state.robots[slots[i]];
        const RobotState& b = state.robots[slots[j]];
        if (a.node == b.node && a.color == b.color) {
          group_of[i] = group_of[j];
          break;
        }
      }
    }
    if (group_of[i] < 0) {
      group_of[i] = static_cast<int>(group_rep.size());
      group_rep.push_back(static_cast<int>(i));
    }
  }

  std::vector<size_t> pick(group_rep.size(), 0);
  std::vector<Resolution> acts(slots.size());
  while (true) {
    for (size_t i = 0; i < slots.size(); ++i) {
      const RobotOutcome& o = options[i][pick[group_of[i]] %
                                         options[i].size()];
      // Locked groups share outcome sets, so the modulo never truncates.
      acts[i] = Resolution{static_cast<std::uint8_t>(slots[i]), o.rule_index,
                           o.new_color, o.move};
    }
    emit(acts);
    size_t g = 0;
    for (; g < pick.size(); ++g) {
      if (++pick[g] < options[group_rep[g]].size()) break;
      pick[g] = 0;
    }
    if (g == pick.size()) break;
  }
}

}  // namespace

std::vector<Successor> successors(const SystemState& state,
                                  const Algorithm& algorithm,
                                  SymMode sym_mode) {
  std::vector<Successor> result;
  std::unordered_set<std::string> seen;
  auto emit = [&](AdversaryChoice choice) {
    std::string key = choice_key(state, choice);
    if (!seen.insert(key).second) return;
    result.push_back(build_successor(state, std::move(choice)));
  };

  if (state.model == Model::Fsync || state.model == Model::Ssync) {
    if (!state.all_idle())
      throw std::logic_error("mid-cycle robot under a synchronous scheduler");
    std::vector<int> enabled = enabled_robots(state, algorithm);
    if (enabled.empty()) return result;
    std::vector<std::vector<RobotOutcome>> all_options;
    for (int slot : enabled)
      all_options.push_back(robot_outcomes(state, slot, algorithm));

    if (state.model == Model::Fsync) {
      enumerate_resolution_vectors(
          state, enabled, all_options, sym_mode,
          [&](const std::vector<Resolution>& acts) {
            emit(AdversaryChoice{AdversaryChoice::Kind::FsyncStep, acts});
          });
    } else {
      int m = static_cast<int>(enabled.size());
      for (unsigned subset = 1; subset < (1u << m); ++subset) {
        std::vector<int> slots;
        std::vector<std::vector<RobotOutcome>> options;
        for (int i = 0; i < m; ++i) {
          if (subset & (1u << i)) {
            slots.push_back(enabled[i]);
            options.push_back(all_options[i]);
          }
        }
        enumerate_resolution_vectors(
            state, slots, options, sym_mode,
            [&](const std::vector<Resolution>& acts) {
              emit(AdversaryChoice{AdversaryChoice::Kind::SsyncStep, acts});
            });
      }
    }
    return result;
  }

  // ASYNC: one phase of one robot per choice.
  for (int slot = 0; slot < state.robot_count(); ++slot) {
    const RobotState& robot = state.robots[slot];
    if (robot.phase == Phase::Idle) {
      for (const RobotOutcome& o : robot_outcomes(state, slot, algorithm)) {
        AdversaryChoice c{AdversaryChoice::Kind::AsyncLook,
                          {Resolution{static_cast<std::uint8_t>(slot),
                                      o.rule_index, o.new_color, o.move}}};
        emit(std::move(c));
      }
    } else if (robot.phase == Phase::Looked) {
      AdversaryChoice c{AdversaryChoice::Kind::AsyncCompute,
                        {Resolution{static_cast<std::uint8_t>(slot), -1,
                                    robot.staged_color, robot.staged_move}}};
      emit(std::move(c));
    } else {
      AdversaryChoice c{AdversaryChoice::Kind::AsyncMove,
                        {Resolution{static_cast<std::uint8_t>(slot), -1,
                                    robot.color, robot.staged_move}}};
      emit(std::move(c));
    }
  }
  return result;
}

SystemState apply_choice(const SystemState& state,
                         const AdversaryChoice& choice,
                         const Algorithm& algorithm, SymMode sym_mode) {
  std::string key = choice_key(state, choice);
  for (const Successor& s : successors(state, algorithm, sym_mode)) {
    if (choice_key(state, s.choice) == key) return s.state;
  }
  throw std::invalid_argument("choice not applicable to state");
}

// --- formatting -------------------------------------------------------------------

namespace {

std::string robot_token(const SystemState& state, const Resolution& r,
                        const Palette& palette, AdversaryChoice::Kind kind) {
  const RobotState& robot = state.robots[r.slot];
  std::string tok(1, palette.letter(robot.color));
  tok += "@" + std::to_string(robot.node);
  if (kind == AdversaryChoice::Kind::AsyncCompute ||
      kind == AdversaryChoice::Kind::AsyncMove) {
    return tok;
  }
  tok += ":";
  tok += (r.move < 0 ? "-1" : r.move > 0 ? "+1" : "0");
  if (r.new_color != robot.color) {
    tok += "=";
    tok += palette.letter(r.new_color);
  }
  return tok;
}

const char* choice_verb(AdversaryChoice::Kind kind) {
  switch (kind) {
    case AdversaryChoice::Kind::FsyncStep: return "step";
    case AdversaryChoice::Kind::SsyncStep: return "act";
    case AdversaryChoice::Kind::AsyncLook: return "look";
    case AdversaryChoice::Kind::AsyncCompute: return "compute";
    case AdversaryChoice::Kind::AsyncMove: return "move";
  }
  return "?";
}

}  // namespace

std::string format_choice(const SystemState& state,
                          const AdversaryChoice& choice,
                          const Palette& palette) {
  std::string out = choice_verb(choice.kind);
  std::vector<std::string> tokens;
  for (const Resolution& r : choice.acts)
    tokens.push_back(robot_token(state, r, palette, choice.kind));
  std::sort(tokens.begin(), tokens.end());
  for (const auto& t : tokens) out += " " + t;
  return out;
}

std::string format_trace_text(const Trace& trace, const Palette& palette) {
  std::ostringstream out;
  out << "init ⊢ " << format_configuration(trace.initial.config(palette))
      << "\n";
  const SystemState* prev = &trace.initial;
  for (const auto& [choice, state] : trace.steps) {
    out << format_choice(*prev, choice, palette) << " ⊢ "
        << format_configuration(state.config(palette)) << "\n";
    prev = &state;
  }
  return out.str();
}

// --- scripted choice matching --------------------------------------------------------

namespace {

struct TokenPattern {
  char color_letter;
  int node;
  std::optional<int> move;
  std::optional<char> new_color_letter;
};

struct ChoicePattern {
  AdversaryChoice::Kind kind;
  std::vector<TokenPattern> tokens;
};

ChoicePattern parse_choice_line(const std::string& line) {
  std::istringstream in(line);
  std::string verb;
  in >> verb;
  ChoicePattern pat;
  if (verb == "step") pat.kind = AdversaryChoice::Kind::FsyncStep;
  else if (verb == "act") pat.kind = AdversaryChoice::Kind::SsyncStep;
  else if (verb == "look") pat.kind = AdversaryChoice::Kind::AsyncLook;
  else if (verb == "compute") pat.kind = AdversaryChoice::Kind::AsyncCompute;
  else if (verb == "move") pat.kind = AdversaryChoice::Kind::AsyncMove;
  else throw ParseError("unknown choice verb '" + verb + "'");

  std::string tok;
  while (in >> tok) {
    TokenPattern t{};
    size_t at = tok.find('@');
    if (at != 1) throw ParseError("bad robot token '" + tok + "'");
    t.color_letter = tok[0];
    size_t pos = 2;
    size_t colon = tok.find(':', pos);
    size_t eq = tok.find('=', pos);
    size_t node_end = std::min(colon, eq);
    t.node = std::stoi(tok.substr(pos, node_end - pos));
    if (colon != std::string::npos) {
      size_t dir_end = (eq == std::string::npos) ? tok.size() : eq;
      std::string dir = tok.substr(colon + 1, dir_end - colon - 1);
      if (dir == "-1") t.move = -1;
      else if (dir == "+1" || dir == "1") t.move = +1;
      else if (dir == "0") t.move = 0;
      else throw ParseError("bad direction in token '" + tok + "'");
    }
    if (eq != std::string::npos) {
      if (eq + 2 != tok.size())
        throw ParseError("bad new color in token '" + tok + "'");
      t.new_color_letter = tok[eq + 1];
    }
    pat.tokens.push_back(t);
  }
  return pat;
}

bool token_matches(const SystemState& state, const Palette& palette,
                   const TokenPattern& t, const Resolution& r) {
  const RobotState& robot = state.robots[r.slot];
  if (robot.node != t.node) return false;
  if (palette.letter(robot.color) != t.color_letter) return false;
  if (t.move && *t.move != r.move) return false;
  if (t.new_color_letter && palette.letter(r.new_color) != *t.new_color_letter)
    return false;
  return true;
}

bool assign_tokens(const SystemState& state, const Palette& palette,
                   const std::vector<TokenPattern>& tokens,
                   const std::vector<Resolution>& acts, size_t next,
                   std::vector<bool>& used) {
  if (next == tokens.size()) return true;
  for (size_t i = 0; i < acts.size(); ++i) {
    if (used[i] || !token_matches(state, palette, tokens[next], acts[i]))
      continue;
    used[i] = true;
    if (assign_tokens(state, palette, tokens, acts, next + 1, used))
      return true;
    used[i] = false;
  }
  return false;
}

bool choice_matches(const SystemState& state, const Palette& palette,
                    const ChoicePattern& pat, const AdversaryChoice& choice) {
  if (choice.kind != pat.kind) return false;
  // A bare "step" matches the mandatory full cycle; tokens only pin down the
  // adversary-resolved robots. All other verbs name their robots exactly.
  if (pat.kind == AdversaryChoice::Kind::FsyncStep) {
    if (pat.tokens.size() > choice.acts.size()) return false;
  } else if (choice.acts.size() != pat.tokens.size()) {
    return false;
  }
  std::vector<bool> used(choice.acts.size(), false);
  return assign_tokens(state, palette, pat.tokens, choice.acts, 0, used);
}

}  // namespace

Trace simulate(const SystemState& state, const Algorithm& algorithm,
               const Policy& policy, int max_steps, SymMode sym_mode) {
  Trace trace;
  trace.initial = state;
  SystemState current = state;
  std::mt19937_64 rng(policy.seed);
  size_t script_pos = 0;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<Successor> succs = successors(current, algorithm, sym_mode);
    if (succs.empty()) break;
    size_t pick = 0;
    if (policy.kind == Policy::Kind::Random) {
      pick = static_cast<size_t>(rng() % succs.size());
    } else if (policy.kind == Policy::Kind::Scripted) {
      if (script_pos >= policy.script.size()) break;
      ChoicePattern pat = parse_choice_line(policy.script[script_pos++]);
      bool found = false;
      for (size_t i = 0; i < succs.size(); ++i) {
        if (choice_matches(current, algorithm.palette, pat, succs[i].choice)) {
          if (found)
            throw ParseError("ambiguous scripted choice '" +
                             policy.script[script_pos - 1] + "'");
          pick = i;
          found = true;
        }
      }
      if (!found)
        throw ParseError("scripted choice '" + policy.script[script_pos - 1] +
                         "' is not among the successors");
    }
    trace.steps.emplace_back(succs[pick].choice, succs[pick].state);
    current = succs[pick].state;
  }
  return trace;
}

}  // namespace ringx
