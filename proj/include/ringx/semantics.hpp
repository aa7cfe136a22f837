#pragma once

// Execution semantics for the FSYNC, SSYNC, and ASYNC schedulers, with
// exhaustive enumeration of every adversary choice.
//
// ASYNC splits each robot cycle into three separately scheduled actions:
//   Look    — snapshot the views and fix the computed outcome,
//   Compute — apply the new color (now visible to neighbors),
//   Move    — hop one edge in the direction fixed at Look time.
// A robot whose computed movement is "stay" finishes its cycle at Compute.
// Moves use the direction recorded at Look time even if the neighborhood
// changed since (stale-view semantics).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ringx/core.hpp"

namespace ringx {

enum class Model : std::uint8_t { Fsync, Ssync, Async };

Model parse_model(const std::string& name);
const char* model_name(Model m);

// Direction resolution for simultaneously activated same-color robots on one
// node: independent picks per robot, or locked to identical picks.
enum class SymMode : std::uint8_t { Independent, Locked };

enum class Phase : std::uint8_t { Idle, Looked, MovePending };

struct RobotState {
  std::uint8_t node = 0;
  ColorId color = 0;
  Phase phase = Phase::Idle;
  // Looked: decided outcome, not yet applied. MovePending: staged_move only.
  ColorId staged_color = 0;
  std::int8_t staged_move = 0;  // -1, 0, +1 (absolute ring direction)

  auto key() const {
    return std::tuple(node, color, phase, staged_color, staged_move);
  }
  bool operator==(const RobotState& o) const { return key() == o.key(); }
  bool operator<(const RobotState& o) const { return key() < o.key(); }
};

struct SystemState {
  std::uint8_t n = 0;
  Model model = Model::Fsync;
  std::vector<RobotState> robots;  // kept sorted; robots are anonymous

  void normalize();
  int robot_count() const { return static_cast<int>(robots.size()); }
  bool all_idle() const;
  Configuration config(const Palette& palette) const;
  std::uint32_t occupied_mask() const;

  bool operator==(const SystemState&) const = default;
};

SystemState initial_state(const Configuration& config, Model model);

// One robot's resolved compute outcome. `move` is an absolute direction.
struct Resolution {
  std::uint8_t slot = 0;
  std::int16_t rule_index = -1;
  ColorId new_color = 0;
  std::int8_t move = 0;
};

struct AdversaryChoice {
  enum class Kind : std::uint8_t {
    FsyncStep,     // full cycles of all enabled robots
    SsyncStep,     // full cycles of a chosen non-empty subset
    AsyncLook,     // one robot snapshots and commits an outcome
    AsyncCompute,  // one Looked robot applies its color
    AsyncMove,     // one MovePending robot hops
  };
  Kind kind = Kind::FsyncStep;
  std::vector<Resolution> acts;  // Look/Compute/Move carry exactly one entry
};

struct Successor {
  AdversaryChoice choice;
  SystemState state;
  std::array<std::uint8_t, kMaxRobots> slot_map{};  // source slot -> new slot
  std::uint8_t acted_mask = 0;                      // source slots that acted
  bool config_changed = false;
};

// Outcomes available to one robot (empty = not enabled).
struct RobotOutcome {
  std::int16_t rule_index;
  ColorId new_color;
  std::int8_t move;
};
std::vector<RobotOutcome> robot_outcomes(const SystemState& state, int slot,
                                         const Algorithm& algorithm);

// Idle robots whose views match some rule. Mid-cycle robots are not enabled.
std::vector<int> enabled_robots(const SystemState& state,
                                const Algorithm& algorithm);

// Slots that are enabled or mid-cycle; fairness constrains exactly these.
std::uint8_t relevant_mask(const SystemState& state,
                           const Algorithm& algorithm);

// Exhaustive, duplicate-free one-step outcomes under the state's scheduler.
std::vector<Successor> successors(const SystemState& state,
                                  const Algorithm& algorithm,
                                  SymMode sym_mode = SymMode::Independent);

// Applies one of successors()' choices. Throws std::invalid_argument when the
// choice is not applicable to the state.
SystemState apply_choice(const SystemState& state,
                         const AdversaryChoice& choice,
                         const Algorithm& algorithm,
                         SymMode sym_mode = SymMode::Independent);

// No robot enabled and no robot mid-cycle.
bool is_quiescent(const SystemState& state, const Algorithm& algorithm);

// --- traces ----------------------------------------------------------------------

struct Trace {
  SystemState initial;
  std::vector<std::pair<AdversaryChoice, SystemState>> steps;
};

// Textual choice grammar (also accepted by scripted policies):
//   step  [TOKEN ...]      FSYNC full step
//   act   TOKEN [TOKEN...] SSYNC subset step
//   look  TOKEN            ASYNC look+decide
//   compute TOKEN          ASYNC color application
//   move  TOKEN            ASYNC pending hop
// TOKEN = COLOR@NODE[:DIR][=NEWCOLOR], DIR in {-1,0,+1}.
std::string format_choice(const SystemState& state,
                          const AdversaryChoice& choice,
                          const Palette& palette);

std::string format_trace_text(const Trace& trace, const Palette& palette);

// --- simulation --------------------------------------------------------------------

struct Policy {
  enum class Kind : std::uint8_t { Scripted, Random, First };
  Kind kind = Kind::First;
  std::vector<std::string> script;  // Scripted
  std::uint64_t seed = 0;           // Random
};

// Runs at most max_steps choices, stopping early at quiescence. Scripted
// policies throw ParseError when a scripted choice is not among successors.
Trace simulate(const SystemState& state, const Algorithm& algorithm,
               const Policy& policy, int max_steps,
               SymMode sym_mode = SymMode::Independent);

}  // namespace ringx
