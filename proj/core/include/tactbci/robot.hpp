#pragma once

#include <string>
#include <vector>

#include "tactbci/types.hpp"

namespace tactbci {

// The six arm commands, in bijection with CommandId 0..5.
enum class RobotCommand { kLeft = 0, kRight = 1, kForward = 2, kBack = 3, kGrasp = 4, kRelease = 5 };

RobotCommand command_from_id(CommandId id);
CommandId command_to_id(RobotCommand cmd);
const char* command_name(RobotCommand cmd);
RobotCommand command_from_name(const std::string& name);

enum class ActionEffect { kNone, kApplied, kNoOp };

struct GridPos {
  int x = 0;
  int y = 0;
  bool operator==(const GridPos&) const = default;
};

inline int manhattan(GridPos a, GridPos b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

// Gripper on a bounded grid with one object and one goal cell. Moves clamp
// at the edges; a held object travels with the gripper.
struct RobotState {
  GridPos gripper;
  bool holding = false;
  GridPos object;  // meaningful only while not holding
  GridPos goal;
  int width = 5;
  int height = 5;
  ActionEffect last_action_effect = ActionEffect::kNone;

  GridPos object_position() const { return holding ? gripper : object; }
  void validate() const;

  bool operator==(const RobotState&) const = default;
};

struct TaskSpec {
  RobotState start;
  std::string description;

  void validate() const;  // start valid, object != goal
};

// Pure, total transition. Invalid transitions (move off grid, grasp away
// from the object, release while empty) are no-ops flagged in
// last_action_effect; a misdecoded command must never crash the loop.
RobotState apply(const RobotState& state, RobotCommand cmd);

// Shortest command sequence completing the task: Manhattan moves to the
// object, GRASP, Manhattan moves to the goal, RELEASE. Ties between axis
// orders are broken x-axis-first.
std::vector<RobotCommand> optimal_script(const TaskSpec& task);

struct TaskRun {
  std::vector<RobotState> trace;  // state after each command
  bool success = false;           // object at goal and not holding
};

TaskRun run_task(const TaskSpec& task, const std::vector<RobotCommand>& commands);

// The six-step pick-and-move task: object two cells right of the gripper,
// goal two cells forward of the object.
TaskSpec default_task();

// ASCII rendering of the grid for terminal output.
std::string render(const RobotState& state);

}  // namespace tactbci
