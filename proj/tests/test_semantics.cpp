#include "ringx/semantics.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "ringx/algorithms.hpp"

using namespace ringx;

namespace {

SystemState state_of(const std::string& text, int n, Model model) {
  return initial_state(parse_configuration(text, n), model);
}

std::string config_text(const SystemState& s) {
  return format_configuration(s.config(Palette()));
}

std::set<std::string> successor_configs(const SystemState& s,
                                        const Algorithm& alg) {
  std::set<std::string> out;
  for (const Successor& succ : successors(s, alg)) {
    auto [canon, t] = canonicalize(succ.state.config(Palette()));
    (void)t;
    out.insert(format_configuration(canon));
  }
  return out;
}

}  // namespace

TEST_CASE("enabled_robots") {
  Algorithm ap3 = builtin_algorithm("AP3");
  SystemState s = state_of("W,W,G", 5, Model::Ssync);
  auto enabled = enabled_robots(s, ap3);
  REQUIRE(enabled.size() == 1);
  CHECK(s.robots[enabled[0]].color == 0);  // the G robot, rule 0GW

  Algorithm fp2 = builtin_algorithm("FP2");
  CHECK(enabled_robots(state_of("G,.,.,G", 6, Model::Fsync), fp2).empty());

  // Isolated robot with no isolated-view guard.
  CHECK(enabled_robots(state_of(".,G,.", 5, Model::Fsync), fp2).empty());
}

TEST_CASE("fsync walker has a single forced successor") {
  Algorithm fp2 = builtin_algorithm("FP2");
  SystemState s = state_of("G,W", 6, Model::Fsync);
  auto succs = successors(s, fp2);
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].choice.kind == AdversaryChoice::Kind::FsyncStep);
  CHECK(succs[0].choice.acts.size() == 2);
  // Both robots advance one node against the G robot's old position.
  CHECK(config_text(succs[0].state) == "W,.,.,.,.,G");
  CHECK(succs[0].config_changed);
}

TEST_CASE("symmetric-view resolution branches the step") {
  Algorithm ft3 = builtin_algorithm("FT3");
  SystemState s = state_of("G,W,G", 5, Model::Fsync);
  auto succs = successors(s, ft3);
  REQUIRE(succs.size() == 2);
  auto shapes = successor_configs(s, ft3);
  // One shape and its mirror collapse to a single canonical form.
  CHECK(shapes == std::set<std::string>{"G,G,W,.,."});
}

TEST_CASE("ssync subsets include the disconnection move") {
  Algorithm fp2 = builtin_algorithm("FP2");
  SystemState s = state_of("G,W", 6, Model::Ssync);
  auto succs = successors(s, fp2);
  CHECK(succs.size() == 3);  // {G}, {W}, {G,W}
  bool found_disconnect = false;
  for (const Successor& succ : succs) {
    if (succ.choice.acts.size() == 1) {
      const RobotState& actor = s.robots[succ.choice.acts[0].slot];
      if (actor.color == 0) {
        CHECK(config_text(succ.state) == ".,W,.,.,.,G");
        found_disconnect = true;
      }
    }
  }
  CHECK(found_disconnect);
}

TEST_CASE("async cycle splits into look, compute, move") {
  Algorithm ap3 = builtin_algorithm("AP3");
  SystemState s = state_of(".,WG,W", 5, Model::Async);
  auto succs = successors(s, ap3);
  REQUIRE(succs.size() == 1);  // only the tower's W robot is enabled
  CHECK(succs[0].choice.kind == AdversaryChoice::Kind::AsyncLook);
  const SystemState& looked = succs[0].state;
  CHECK(config_text(looked) == ".,GW,W,.,.");  // look changes nothing visible

  auto after_look = successors(looked, ap3);
  REQUIRE(after_look.size() == 1);
  CHECK(after_look[0].choice.kind == AdversaryChoice::Kind::AsyncCompute);
  const SystemState& computed = after_look[0].state;
  // Color applied: the tower is now {G,G}; the move is still pending.
  CHECK(config_text(computed) == ".,GG,W,.,.");
  CHECK(!computed.all_idle());

  // No other robot matches the intermediate configuration.
  auto after_compute = successors(computed, ap3);
  REQUIRE(after_compute.size() == 1);
  CHECK(after_compute[0].choice.kind == AdversaryChoice::Kind::AsyncMove);
  // The pending move lands on the lone W's node.
  CHECK(config_text(after_compute[0].state) == ".,G,GW,.,.");
  CHECK(is_quiescent(after_compute[0].state, ap3) == false);
}

TEST_CASE("async move applies its stale direction") {
  // A robot committed to a hop keeps it even though the target node has
  // meanwhile been occupied.
  Algorithm dummy = parse_algorithm_text("x : G | (G) | G :: G, stay\n");
  SystemState s;
  s.n = 4;
  s.model = Model::Async;
  RobotState mover;
  mover.node = 0;
  mover.color = 1;
  mover.phase = Phase::MovePending;
  mover.staged_color = 1;
  mover.staged_move = +1;
  RobotState blocker;
  blocker.node = 1;
  blocker.color = 0;
  s.robots = {mover, blocker};
  s.normalize();

  auto succs = successors(s, dummy);
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].choice.kind == AdversaryChoice::Kind::AsyncMove);
  CHECK(config_text(succs[0].state) == ".,GW,.,.");
}

TEST_CASE("quiescence") {
  Algorithm fp2 = builtin_algorithm("FP2");
  CHECK(is_quiescent(state_of("G,.,.,G", 6, Model::Fsync), fp2));
  CHECK(!is_quiescent(state_of("G,W", 6, Model::Fsync), fp2));

  Algorithm ft3 = builtin_algorithm("FT3");
  CHECK(is_quiescent(state_of(".,.,.,G,GW", 5, Model::Fsync), ft3));

  SystemState pending = state_of("G,.,.,G", 6, Model::Async);
  pending.robots[0].phase = Phase::MovePending;
  pending.robots[0].staged_move = 1;
  pending.robots[0].staged_color = pending.robots[0].color;
  CHECK(!is_quiescent(pending, fp2));
}

TEST_CASE("apply_choice accepts only applicable choices") {
  Algorithm fp2 = builtin_algorithm("FP2");
  SystemState s = state_of("G,W", 6, Model::Fsync);
  auto succs = successors(s, fp2);
  REQUIRE(!succs.empty());
  CHECK(apply_choice(s, succs[0].choice, fp2) == succs[0].state);

  SystemState other = state_of("G,.,W", 6, Model::Fsync);
  CHECK_THROWS_AS(apply_choice(other, succs[0].choice, fp2),
                  std::invalid_argument);
}

TEST_CASE("robot count is conserved") {
  for (const char* name : {"FP2", "FT3", "AP3", "AT4"}) {
    Algorithm alg = builtin_algorithm(name);
    for (Model model : {Model::Fsync, Model::Ssync, Model::Async}) {
      for (const SubConfiguration& init : alg.initial_configs) {
        SystemState s = initial_state(place_on_ring(init, 6), model);
        for (const Successor& succ : successors(s, alg)) {
          CHECK(succ.state.robot_count() == s.robot_count());
          CHECK(succ.state.config(alg.palette).robot_count() ==
                s.robot_count());
        }
      }
    }
  }
}

TEST_CASE("scripted simulation replays a terminating run") {
  Algorithm ft3 = builtin_algorithm("FT3");
  SystemState s = state_of("W,W,W", 7, Model::Fsync);
  Policy policy;
  policy.kind = Policy::Kind::Scripted;
  policy.script = {"step", "step W@1:-1", "step", "step", "step"};
  Trace trace = simulate(s, ft3, policy, 100);
  REQUIRE(trace.steps.size() == 5);
  const SystemState& last = trace.steps.back().second;
  CHECK(is_quiescent(last, ft3));
  auto [canon, t] = canonicalize(last.config(Palette()));
  (void)t;
  CHECK(format_configuration(canon) == "G,GW,.,.,.,.,.");

  Policy bad;
  bad.kind = Policy::Kind::Scripted;
  bad.script = {"act W@0"};
  CHECK_THROWS_AS(simulate(s, ft3, bad, 10), ParseError);
}

TEST_CASE("deterministic policies stop at quiescence") {
  Algorithm ap3 = builtin_algorithm("AP3");
  SystemState s = state_of("W,W,G", 5, Model::Async);
  Policy first;
  first.kind = Policy::Kind::First;
  Trace trace = simulate(s, ap3, first, 50);
  std::uint32_t covered = s.occupied_mask();
  for (const auto& [choice, st] : trace.steps) covered |= st.occupied_mask();
  CHECK(covered == 0b11111u);  // perpetual walker covers all five nodes
  CHECK(trace.steps.size() == 50);

  Policy seeded;
  seeded.kind = Policy::Kind::Random;
  seeded.seed = 7;
  Trace t1 = simulate(s, ap3, seeded, 30);
  Trace t2 = simulate(s, ap3, seeded, 30);
  REQUIRE(t1.steps.size() == t2.steps.size());
  for (size_t i = 0; i < t1.steps.size(); ++i)
    CHECK(t1.steps[i].second == t2.steps[i].second);

  // Quiescent start: empty step list.
  Algorithm fp2 = builtin_algorithm("FP2");
  Trace idle = simulate(state_of("G,.,.,G", 6, Model::Fsync), fp2, first, 10);
  CHECK(idle.steps.empty());
}

TEST_CASE("choice text round-trips through the scripted matcher") {
  Algorithm at4 = builtin_algorithm("AT4");
  SystemState s = state_of("G,W,W,G", 7, Model::Async);
  for (const Successor& succ : successors(s, at4)) {
    Policy policy;
    policy.kind = Policy::Kind::Scripted;
    policy.script = {format_choice(s, succ.choice, at4.palette)};
    Trace trace = simulate(s, at4, policy, 1);
    REQUIRE(trace.steps.size() == 1);
    CHECK(trace.steps[0].second == succ.state);
  }
}

TEST_CASE("trace text serialization") {
  Algorithm fp2 = builtin_algorithm("FP2");
  Policy first;
  first.kind = Policy::Kind::First;
  Trace trace = simulate(state_of("G,W", 6, Model::Fsync), fp2, first, 2);
  std::string text = format_trace_text(trace, fp2.palette);
  CHECK(text.find("init ⊢ G,W,.,.,.,.\n") != std::string::npos);
  CHECK(text.find("step") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
